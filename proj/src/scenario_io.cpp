#include "avsup/io.hpp"

#include "json.hpp"

#include <fstream>
#include <sstream>

namespace avsup {

namespace {

using nlohmann::ordered_json;

template <typename T>
void read(const nlohmann::json& j, const char* key, T& field)
{
    if (j.contains(key)) {
        field = j.at(key).get<T>();
    }
}

} // namespace

std::string scenario_to_json(const Scenario& s)
{
    ordered_json j;
    const VehicleState& st = s.initial_state;
    j["initial_state"] = {{"x_world", st.x_world}, {"y_world", st.y_world},   {"yaw", st.yaw},
                          {"vx_body", st.vx_body}, {"vy_body", st.vy_body}, {"yaw_rate", st.yaw_rate}};
    j["target_speed"] = s.target_speed;
    j["pedestrians"] = ordered_json::array();
    for (const auto& p : s.pedestrians) {
        j["pedestrians"].push_back({{"name", p.name},
                                    {"distance_from_ego_x0", p.distance_from_ego_x0},
                                    {"crossing_speed", p.crossing_speed},
                                    {"lateral_position", p.lateral_position},
                                    {"start_delay", p.start_delay}});
    }
    j["road"] = {{"road_y_min", s.road.road_y_min},
                 {"road_y_max", s.road.road_y_max},
                 {"lane_center_y", s.road.lane_center_y}};
    j["dt"] = s.dt;
    j["decision_period"] = s.decision_period;
    j["duration"] = s.duration;
    j["exit_margin"] = s.exit_margin;
    j["nudge_offset"] = s.nudge_offset;
    j["gain_update_threshold"] = s.gain_update_threshold;
    const VehicleParams& v = s.vehicle;
    j["vehicle"] = {{"mass", v.mass},
                    {"yaw_inertia", v.yaw_inertia},
                    {"dist_front_axle", v.dist_front_axle},
                    {"dist_rear_axle", v.dist_rear_axle},
                    {"cornering_stiffness_front", v.cornering_stiffness_front},
                    {"cornering_stiffness_rear", v.cornering_stiffness_rear}};
    j["braking"] = {{"soft", s.braking.soft},
                    {"medium", s.braking.medium},
                    {"hard", s.braking.hard},
                    {"full", s.braking.full}};
    ordered_json q = ordered_json::array();
    for (int r = 0; r < 4; ++r) {
        q.push_back({s.weights.state_cost(r, 0), s.weights.state_cost(r, 1),
                     s.weights.state_cost(r, 2), s.weights.state_cost(r, 3)});
    }
    j["lqr"] = {{"state_cost", q}, {"input_cost", s.weights.input_cost}};
    return j.dump(2) + "\n";
}

Scenario scenario_from_json(std::string_view text)
{
    Scenario s;
    try {
        const auto j = nlohmann::json::parse(text);
        if (j.contains("initial_state")) {
            const auto& st = j.at("initial_state");
            read(st, "x_world", s.initial_state.x_world);
            read(st, "y_world", s.initial_state.y_world);
            read(st, "yaw", s.initial_state.yaw);
            read(st, "vx_body", s.initial_state.vx_body);
            read(st, "vy_body", s.initial_state.vy_body);
            read(st, "yaw_rate", s.initial_state.yaw_rate);
        }
        read(j, "target_speed", s.target_speed);
        if (j.contains("pedestrians")) {
            for (const auto& pj : j.at("pedestrians")) {
                Pedestrian p;
                p.name = pj.at("name").get<std::string>();
                p.distance_from_ego_x0 = pj.at("distance_from_ego_x0").get<double>();
                p.crossing_speed = pj.at("crossing_speed").get<double>();
                read(pj, "lateral_position", p.lateral_position);
                read(pj, "start_delay", p.start_delay);
                s.pedestrians.push_back(std::move(p));
            }
        }
        if (j.contains("road")) {
            const auto& r = j.at("road");
            read(r, "road_y_min", s.road.road_y_min);
            read(r, "road_y_max", s.road.road_y_max);
            read(r, "lane_center_y", s.road.lane_center_y);
        }
        read(j, "dt", s.dt);
        read(j, "decision_period", s.decision_period);
        read(j, "duration", s.duration);
        read(j, "exit_margin", s.exit_margin);
        read(j, "nudge_offset", s.nudge_offset);
        read(j, "gain_update_threshold", s.gain_update_threshold);
        if (j.contains("vehicle")) {
            const auto& v = j.at("vehicle");
            read(v, "mass", s.vehicle.mass);
            read(v, "yaw_inertia", s.vehicle.yaw_inertia);
            read(v, "dist_front_axle", s.vehicle.dist_front_axle);
            read(v, "dist_rear_axle", s.vehicle.dist_rear_axle);
            read(v, "cornering_stiffness_front", s.vehicle.cornering_stiffness_front);
            read(v, "cornering_stiffness_rear", s.vehicle.cornering_stiffness_rear);
        }
        if (j.contains("braking")) {
            const auto& b = j.at("braking");
            read(b, "soft", s.braking.soft);
            read(b, "medium", s.braking.medium);
            read(b, "hard", s.braking.hard);
            read(b, "full", s.braking.full);
        }
        if (j.contains("lqr")) {
            const auto& l = j.at("lqr");
            read(l, "input_cost", s.weights.input_cost);
            if (l.contains("state_cost")) {
                const auto& q = l.at("state_cost");
                if (q.size() != 4) {
                    throw IoError("lqr.state_cost must be 4x4");
                }
                for (int r = 0; r < 4; ++r) {
                    if (q.at(r).size() != 4) {
                        throw IoError("lqr.state_cost must be 4x4");
                    }
                    for (int c = 0; c < 4; ++c) {
                        s.weights.state_cost(r, c) = q.at(r).at(c).get<double>();
                    }
                }
            }
        }
    } catch (const nlohmann::json::exception& ex) {
        throw IoError(std::string("invalid scenario document: ") + ex.what());
    }
    return s;
}

Scenario load_scenario(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read scenario " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return scenario_from_json(buf.str());
}

void save_scenario(const Scenario& scenario, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << scenario_to_json(scenario);
    if (!out) {
        throw IoError("cannot write scenario " + path.string());
    }
}

} // namespace avsup
