#include "avsup/sim.hpp"

#include "avsup/context.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace avsup {

namespace {

// Start times are compared on the integration grid, so allow for rounding of k*dt.
constexpr double kTimeEps = 1e-9;

struct Supervisor {
    const Scenario& scenario;
    DecisionBackend& backend;
    Decision active = Decision::neutral();
    double accel_cmd = 0.0;
    double lateral_ref = 0.0;
    bool has_nudged = false;
    int failed_streak = 0;
};

} // namespace

bool Pedestrian::started(double t) const { return t + kTimeEps >= start_delay; }

PedestrianState Pedestrian::state(double t) const
{
    return {distance_from_ego_x0, lateral_position, crossing_speed, started(t)};
}

bool is_step_multiple(double period, double dt)
{
    if (!(period > 0.0) || !(dt > 0.0) || period + kTimeEps < dt) {
        return false;
    }
    const double ratio = period / dt;
    return std::abs(ratio - std::round(ratio)) <= 1e-9 * std::max(1.0, ratio);
}

void Scenario::validate() const
{
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
    if (!is_step_multiple(decision_period, dt))
        throw std::invalid_argument("decision period must be an integer multiple of dt");
    if (!(duration > 0.0)) throw std::invalid_argument("duration must be positive");
    if (!(target_speed > 0.0)) throw std::invalid_argument("target speed must be positive");
    if (!road.valid()) throw std::invalid_argument("road geometry is inconsistent");
    if (!vehicle.valid()) throw std::invalid_argument("vehicle parameters must be positive");
    if (!weights.valid()) throw std::invalid_argument("LQR weights must be PSD / positive");
    if (!braking.valid()) throw std::invalid_argument("braking profile must be increasing");
    if (!initial_state.finite() || initial_state.vx_body < 0.0)
        throw std::invalid_argument("initial state must be finite with vx >= 0");
    for (const auto& p : pedestrians) {
        if (!p.valid()) throw std::invalid_argument("pedestrian " + p.name + " is invalid");
    }
}

long Scenario::period_steps() const { return std::lround(decision_period / dt); }

Scenario build_paper_scenario(double decision_period)
{
    Scenario s;
    s.decision_period = decision_period;
    const double x0 = s.initial_state.x_world;
    const double soft_stop = stopping_distance(s.initial_state.vx_body, s.braking.soft);
    s.pedestrians = {
        Pedestrian{"Ped1", x0 + soft_stop + 20.0, 1.5, 0.0, 1.0},
        Pedestrian{"Ped2", x0 + soft_stop + 40.0, 2.0, 0.0, 5.0},
    };
    return s;
}

void step_pedestrians(std::span<Pedestrian> peds, double t, double dt, const RoadGeometry& road)
{
    for (auto& p : peds) {
        if (p.started(t) && p.lateral_position < road.road_y_max) {
            p.lateral_position = std::min(p.lateral_position + p.crossing_speed * dt, road.road_y_max);
        }
    }
}

bool detect_collision(const VehicleState& ego, const PedestrianState& ped)
{
    return std::abs(ego.x_world - ped.x) <= kCollisionHalfLength &&
           std::abs(ego.y_world - ped.y) <= kCollisionHalfWidth;
}

namespace {

struct Candidate {
    Decision decision;
    std::size_t pedestrian;
};

// Returns false if the run must stop.
bool decide(Supervisor& sup, const VehicleState& ego, const std::vector<Pedestrian>& peds,
            double t, SimLog& log)
{
    const Scenario& sc = sup.scenario;
    std::vector<Candidate> candidates;
    bool any_active = false;
    bool failed = false;

    for (std::size_t i = 0; i < peds.size(); ++i) {
        const PedestrianState ps = peds[i].state(t);
        RuleInputs in;
        in.phase = classify_pedestrian(ego, ps, sc.road, sc.target_speed);
        in.gap = ps.x - ego.x_world;
        in.ego_speed = ego.vx_body;
        in.target_speed = sc.target_speed;
        in.has_nudged = sup.has_nudged;
        in.profile = sc.braking;
        any_active = any_active || is_active(in.phase);

        DecisionQuery query{
            t,
            render_question(make_situation_report(ego, sc.initial_state.x_world, peds[i].name, in)),
            in};

        BackendReply reply;
        try {
            reply = sup.backend.decide(query);
        } catch (const BackendError& err) {
            ++log.summary.backend_errors;
            if (!err.transient()) {
                log.summary.aborted = true;
                log.summary.abort_kind = err.kind();
                log.summary.abort_reason = err.what();
                return false;
            }
            reply = {RawResponse{}, 0.0, std::string(to_string(sup.backend.kind()))};
        }
        log.transcript.push_back(
            {t, query.question, reply.response.text, reply.latency, reply.backend_kind});

        const ParseResult parsed = parse_response(reply.response);
        switch (parsed.status) {
        case ParseStatus::Malformed:
            ++log.summary.malformed_responses;
            failed = true;
            break;
        case ParseStatus::Inconsistent:
            ++log.summary.inconsistent_responses;
            [[fallthrough]];
        case ParseStatus::Ok:
            if (!parsed.decision->is_neutral()) {
                candidates.push_back({*parsed.decision, i});
            }
            break;
        }
    }

    DecisionEvent event;
    event.time = t;
    if (failed) {
        ++sup.failed_streak;
        if (sup.failed_streak >= 2) {
            sup.active = Decision::for_requirement(6);
            sup.accel_cmd = sup.active.accel();
            event.fail_safe = true;
        } else {
            event.held = true;
        }
        event.decision = sup.active;
        log.decisions.push_back(std::move(event));
        return true;
    }
    sup.failed_streak = 0;

    if (any_active) {
        std::erase_if(candidates,
                      [](const Candidate& c) { return c.decision.requirement_id() == 7; });
    }
    std::vector<Decision> decisions;
    decisions.reserve(candidates.size());
    for (const auto& c : candidates) {
        decisions.push_back(c.decision);
    }
    const Decision winner = arbitrate(decisions);
    const auto source = std::find_if(candidates.begin(), candidates.end(),
                                     [&](const Candidate& c) { return c.decision == winner; });

    sup.active = winner;
    sup.accel_cmd = winner.accel();
    const double center = sc.road.lane_center_y;
    switch (winner.nudge()) {
    case NudgeCode::Away: {
        const double ped_y = peds[source->pedestrian].lateral_position;
        sup.lateral_ref = ped_y < center ? center + sc.nudge_offset : center - sc.nudge_offset;
        sup.has_nudged = true;
        break;
    }
    case NudgeCode::Center:
        sup.lateral_ref = center;
        sup.has_nudged = false;
        break;
    case NudgeCode::Hold:
        break;
    }

    event.decision = winner;
    if (source != candidates.end()) {
        event.pedestrian = peds[source->pedestrian].name;
    }
    log.decisions.push_back(std::move(event));
    return true;
}

} // namespace

SimLog run(const Scenario& scenario, DecisionBackend& backend)
{
    scenario.validate();

    SimLog log;
    std::vector<Pedestrian> peds = scenario.pedestrians;
    double exit_x = std::numeric_limits<double>::infinity();
    if (!peds.empty()) {
        exit_x = -std::numeric_limits<double>::infinity();
        for (const auto& p : peds) {
            log.pedestrian_names.push_back(p.name);
            log.pedestrian_x.push_back(p.distance_from_ego_x0);
            exit_x = std::max(exit_x, p.distance_from_ego_x0 + scenario.exit_margin);
        }
    }

    Supervisor sup{scenario, backend};
    sup.lateral_ref = scenario.road.lane_center_y;
    LateralController lateral(scenario.vehicle, scenario.weights, scenario.initial_state.vx_body,
                              scenario.gain_update_threshold);

    VehicleState state = scenario.initial_state;
    std::vector<bool> overlapping(peds.size(), false);
    const long period = scenario.period_steps();
    const long last_step = std::lround(scenario.duration / scenario.dt);

    log.summary.min_gap = std::numeric_limits<double>::infinity();
    log.summary.min_speed = state.vx_body;

    for (long k = 0; k <= last_step; ++k) {
        const double t = static_cast<double>(k) * scenario.dt;

        if (k % period == 0 && !decide(sup, state, peds, t, log)) {
            break;
        }

        const double steer = lateral.command(state, sup.lateral_ref);

        StepRecord rec;
        rec.time = t;
        rec.state = state;
        rec.accel_cmd = sup.accel_cmd;
        rec.steer_cmd = steer;
        rec.decision = sup.active;
        rec.lateral_ref = sup.lateral_ref;
        for (std::size_t i = 0; i < peds.size(); ++i) {
            const PedestrianState ps = peds[i].state(t);
            rec.ped_y.push_back(ps.y);
            rec.ped_phase.push_back(classify_pedestrian(state, ps, scenario.road,
                                                        scenario.target_speed));
            const bool hit = detect_collision(state, ps);
            if (hit && !overlapping[i]) {
                log.collisions.push_back({t, peds[i].name});
            }
            overlapping[i] = hit;
            rec.collision = rec.collision || hit;
            log.summary.min_gap =
                std::min(log.summary.min_gap, std::hypot(state.x_world - ps.x, state.y_world - ps.y));
        }
        log.summary.min_speed = std::min(log.summary.min_speed, state.vx_body);
        log.steps.push_back(std::move(rec));

        if (k == last_step || state.x_world > exit_x) {
            break;
        }

        state = step_euler(state, {steer, sup.accel_cmd}, scenario.dt, scenario.vehicle);
        state.vx_body = std::clamp(state.vx_body, 0.0, scenario.target_speed);
        step_pedestrians(peds, t, scenario.dt, scenario.road);
    }

    log.summary.collision = !log.collisions.empty();
    if (!log.steps.empty()) {
        log.summary.final_speed = log.steps.back().state.vx_body;
    }
    return log;
}

SimLog run(const Scenario& scenario, const BackendConfig& config)
{
    std::unique_ptr<DecisionBackend> backend;
    try {
        backend = make_backend(config);
    } catch (const BackendError& err) {
        SimLog log;
        log.summary.aborted = true;
        log.summary.abort_kind = err.kind();
        log.summary.abort_reason = err.what();
        return log;
    }
    return run(scenario, *backend);
}

} // namespace avsup
