#include "avsup/io.hpp"

#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

using namespace avsup;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / ("avsup_io_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

SimLog run_oracle(double period)
{
    OracleBackend oracle;
    return run(build_paper_scenario(period), oracle);
}

SimLog short_log()
{
    Scenario sc;
    sc.duration = 0.02;
    sc.pedestrians.push_back({"Ped1", 45.0, 1.5, 0.0, 0.0});
    OracleBackend oracle;
    return run(sc, oracle);
}

} // namespace

TEST_CASE("csv header is pinned")
{
    const std::vector<std::string> expected{
        "time",    "x",      "y",      "yaw",    "vx",          "vy",
        "yaw_rate", "accel_cmd", "steer_cmd", "req_id", "nudge", "lateral_ref",
        "ped1_y",  "ped2_y", "collision_flag"};
    CHECK(csv_columns(2) == expected);
    CHECK(csv_columns(0) == expected);
    CHECK(csv_columns(3).size() == expected.size() + 1);
    CHECK(csv_columns(3)[14] == "ped3_y");
    CHECK(kCsvSchemaVersion == 1);
}

TEST_CASE("3-step log exports to 4 lines")
{
    const SimLog log = short_log();
    REQUIRE(log.steps.size() == 3);
    std::ostringstream ss;
    write_csv(log, ss);
    const std::string text = ss.str();
    CHECK(std::count(text.begin(), text.end(), '\n') == 4);
    CHECK(text.rfind("time,x,y,yaw,vx,vy,yaw_rate,accel_cmd,steer_cmd,req_id,nudge,lateral_ref,"
                     "ped1_y,ped2_y,collision_flag\n",
                     0) == 0);
    // the second pedestrian column is empty for a one-pedestrian run
    CHECK(text.find(",nan,") != std::string::npos);
}

TEST_CASE("csv round trip")
{
    const SimLog log = run_oracle(0.5);
    const fs::path dir = scratch("roundtrip");
    export_csv(log, dir / "t.csv");
    const CsvTable t = read_csv(dir / "t.csv");
    CHECK(t.header == csv_columns(2));
    REQUIRE(t.rows.size() == log.steps.size());
    for (std::size_t k = 0; k < log.steps.size(); ++k) {
        const StepRecord& s = log.steps[k];
        const auto& r = t.rows[k];
        REQUIRE(r.size() == 15);
        const double expected[] = {s.time,
                                   s.state.x_world,
                                   s.state.y_world,
                                   s.state.yaw,
                                   s.state.vx_body,
                                   s.state.vy_body,
                                   s.state.yaw_rate,
                                   s.accel_cmd,
                                   s.steer_cmd,
                                   static_cast<double>(s.decision.requirement_id()),
                                   static_cast<double>(static_cast<int>(s.decision.nudge())),
                                   s.lateral_ref,
                                   s.ped_y[0],
                                   s.ped_y[1],
                                   s.collision ? 1.0 : 0.0};
        for (std::size_t c = 0; c < 15; ++c) {
            REQUIRE(std::abs(r[c] - expected[c]) <= 1e-9);
        }
    }
    double min_vx = 1e9;
    for (const auto& r : t.rows) {
        min_vx = std::min(min_vx, r[4]);
    }
    CHECK(min_vx < 10.0);
    fs::remove_all(dir);
}

TEST_CASE("csv export is byte-identical across runs")
{
    const fs::path dir = scratch("det");
    export_csv(run_oracle(0.5), dir / "a.csv");
    export_csv(run_oracle(0.5), dir / "b.csv");
    CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
    fs::remove_all(dir);
}

TEST_CASE("csv io failures")
{
    CHECK_THROWS_AS(export_csv(run_oracle(0.5), "/nonexistent_dir_avsup/x.csv"), IoError);
    CHECK_THROWS_AS(read_csv("/nonexistent_dir_avsup/x.csv"), IoError);
}

TEST_CASE("scenario json round trip")
{
    Scenario sc = build_paper_scenario(0.25);
    sc.duration = 12.0;
    sc.pedestrians[1].lateral_position = 0.5;
    const Scenario back = scenario_from_json(scenario_to_json(sc));
    CHECK(back.decision_period == 0.25);
    CHECK(back.duration == 12.0);
    CHECK(back.initial_state == sc.initial_state);
    REQUIRE(back.pedestrians.size() == 2);
    CHECK(back.pedestrians[1].name == "Ped2");
    CHECK(back.pedestrians[1].lateral_position == 0.5);
    CHECK(back.pedestrians[0].distance_from_ego_x0 == sc.pedestrians[0].distance_from_ego_x0);
    CHECK(back.weights.state_cost == sc.weights.state_cost);
    CHECK(scenario_to_json(back) == scenario_to_json(sc));

    SUBCASE("missing keys keep defaults")
    {
        const Scenario partial = scenario_from_json(R"({"decision_period": 2.0})");
        CHECK(partial.decision_period == 2.0);
        CHECK(partial.dt == 0.01);
        CHECK(partial.pedestrians.empty());
    }
    SUBCASE("bad documents are IO errors")
    {
        CHECK_THROWS_AS(scenario_from_json("{"), IoError);
        CHECK_THROWS_AS(scenario_from_json(R"({"dt": "fast"})"), IoError);
        CHECK_THROWS_AS(load_scenario("/nonexistent_dir_avsup/s.json"), IoError);
    }
    SUBCASE("file round trip")
    {
        const fs::path dir = scratch("scenario");
        save_scenario(sc, dir / "s.json");
        CHECK(scenario_to_json(load_scenario(dir / "s.json")) == scenario_to_json(sc));
        fs::remove_all(dir);
    }
}

TEST_CASE("checked-in scenario file equals the built-in one")
{
    const Scenario file = load_scenario(fs::path(AVSUP_DATA_DIR) / "scenarios" / "paper.json");
    CHECK(scenario_to_json(file) == scenario_to_json(build_paper_scenario(0.5)));
}

TEST_CASE("plots")
{
    SUBCASE("collision run marks the overlap")
    {
        const SimLog log = run_oracle(2.0);
        REQUIRE(log.summary.collision);
        const std::string svg = render_trajectory_plot(log);
        CHECK(svg.find("Oups!") != std::string::npos);
        CHECK(svg.rfind("<svg", 0) == 0);
        CHECK(svg.find("</svg>") != std::string::npos);
    }
    SUBCASE("clean run has no marker")
    {
        const SimLog log = run_oracle(0.5);
        CHECK(render_trajectory_plot(log).find("Oups!") == std::string::npos);
        CHECK(render_speed_plot(log).find("Oups!") == std::string::npos);
    }
    SUBCASE("empty road gives a flat speed line")
    {
        Scenario sc;
        sc.duration = 3.0;
        OracleBackend oracle;
        const SimLog log = run(sc, oracle);
        const std::string a = render_speed_plot(log);
        const std::string b = render_speed_plot(log);
        CHECK(a == b);
        // every polyline vertex of the speed trace sits at the same height
        const auto start = a.find("<polyline");
        REQUIRE(start != std::string::npos);
        const auto pts_begin = a.find("points=\"", start) + 8;
        const auto pts_end = a.find('"', pts_begin);
        std::istringstream pts(a.substr(pts_begin, pts_end - pts_begin));
        std::string pair;
        std::set<std::string> ys;
        while (pts >> pair) {
            ys.insert(pair.substr(pair.find(',') + 1));
        }
        CHECK(ys.size() == 1);
    }
    SUBCASE("files are deterministic")
    {
        const fs::path a = scratch("plots_a");
        const fs::path b = scratch("plots_b");
        const auto fa = emit_plots(run_oracle(2.0), a);
        const auto fb = emit_plots(run_oracle(2.0), b);
        REQUIRE(fa.size() == 3);
        REQUIRE(fb.size() == 3);
        for (std::size_t i = 0; i < 3; ++i) {
            CHECK(fa[i].filename() == fb[i].filename());
            CHECK(slurp(fa[i]) == slurp(fb[i]));
            CHECK(fs::file_size(fa[i]) > 100);
        }
        fs::remove_all(a);
        fs::remove_all(b);
    }
}
