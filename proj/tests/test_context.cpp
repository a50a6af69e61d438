#include "avsup/context.hpp"

#include "doctest.h"

#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <tuple>

using namespace avsup;

namespace {

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

VehicleState ego(double x, double y, double v)
{
    VehicleState s;
    s.x_world = x;
    s.y_world = y;
    s.vx_body = v;
    return s;
}

const char* kPed1At3s =
    "EGO is traveling at 8.0 m/s I am 29.39 m longitudinally from X0 2.0 m laterally from Y0. "
    "Distance to Ped1 is 15.61 m with distanceToStopHard 5.33 m. A pedestrian is jaywalking and "
    "is expected to be close crossing the road and EGO and pedestrian are within soft braking "
    "distance. What should the EGO do?";

const char* kPed2At3s =
    "EGO is traveling at 8.0 m/s I am 29.39 m longitudinally from X0 2.0 m laterally from Y0. "
    "Distance to Ped2 is 9999 m with distanceToStopHard 5.33 m. There is not a pedestrian along "
    "the EGO's path and EGO travels with less than target speed or has nudged. What should the "
    "EGO do?";

const char* kPed1At3p5s =
    "EGO is traveling at 7.0 m/s I am 33.12 m longitudinally from X0 1.68 m laterally from Y0. "
    "Distance to Ped1 is 11.88 m with distanceToStopHard 4.08 m. A pedestrian is jaywalking and "
    "is expected to be close crossing the road and EGO and pedestrian are within soft braking "
    "distance. What should the EGO do?";

} // namespace

TEST_CASE("system prompt matches the golden file")
{
    const std::string golden = read_file(std::string(AVSUP_DATA_DIR) + "/system_prompt.txt");
    CHECK(render_system_prompt() == golden);
    CHECK(&render_system_prompt() == &render_system_prompt());

    const std::string& p = render_system_prompt();
    std::size_t count = 0;
    for (std::size_t pos = p.find("If a pedestrian is jaywalking"); pos != std::string::npos;
         pos = p.find("If a pedestrian is jaywalking", pos + 1)) {
        ++count;
    }
    // the seventh requirement is worded around the EGO rather than the pedestrian
    CHECK(count == 6);
    for (int id = 1; id <= 7; ++id) {
        const std::string head = "\n" + std::to_string(id) + ". If ";
        const auto at = p.find(head);
        REQUIRE(at != std::string::npos);
        CHECK(p.substr(at, p.find('\n', at + 1) - at).find("jaywalking") != std::string::npos);
    }
    CHECK(p.find("You can only respond with the text within the quotes") != std::string::npos);
    for (int id = 1; id <= 7; ++id) {
        CHECK(p.find(render_decision(Decision::for_requirement(id))) != std::string::npos);
    }
}

TEST_CASE("number formatting")
{
    CHECK(format_quantity(8.0) == "8.0");
    CHECK(format_quantity(29.39) == "29.39");
    CHECK(format_quantity(1.68) == "1.68");
    CHECK(format_quantity(5.3333333) == "5.33");
    CHECK(format_quantity(4.0833333) == "4.08");
    CHECK(format_quantity(2.1) == "2.1");
    CHECK(format_quantity(0.0) == "0.0");
    CHECK(format_quantity(-0.001) == "0.0");
    CHECK(format_quantity(-1.25) == "-1.25");
    CHECK(format_quantity(1e300).size() > 300);
    CHECK(format_quantity(std::nan("")) == "nan");
}

TEST_CASE("questions reproduce the logged exchanges")
{
    const BrakingProfile prof;
    SUBCASE("Ped1 at 8 m/s")
    {
        const RuleInputs in{CrossingPhase::CloseToCrossing, 15.61, 8.0, 10.0, false, prof};
        const SituationReport r = make_situation_report(ego(29.39, 2.0, 8.0), 0.0, "Ped1", in);
        CHECK(render_question(r) == kPed1At3s);
        CHECK(r.gap_to_pedestrian == 15.61);
    }
    SUBCASE("absent Ped2 at 8 m/s")
    {
        const RuleInputs in{CrossingPhase::NotOnPath, 35.61, 8.0, 10.0, false, prof};
        const SituationReport r = make_situation_report(ego(29.39, 2.0, 8.0), 0.0, "Ped2", in);
        CHECK(render_question(r) == kPed2At3s);
        CHECK(r.gap_to_pedestrian == kAbsentGap);
    }
    SUBCASE("Ped1 at 7 m/s after nudging")
    {
        const RuleInputs in{CrossingPhase::CloseToCrossing, 11.88, 7.0, 10.0, true, prof};
        const SituationReport r = make_situation_report(ego(33.12, 1.68, 7.0), 0.0, "Ped1", in);
        CHECK(render_question(r) == kPed1At3p5s);
    }
}

TEST_CASE("sentinel appears iff the pedestrian is off the path")
{
    const BrakingProfile prof;
    const CrossingPhase phases[] = {CrossingPhase::Crossed, CrossingPhase::CloseToCrossing,
                                    CrossingPhase::MiddleOfRoad, CrossingPhase::OnRoad,
                                    CrossingPhase::NotOnPath};
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> gap(0.1, 80.0);
    std::uniform_real_distribution<double> speed(0.0, 12.0);
    for (int i = 0; i < 500; ++i) {
        for (CrossingPhase ph : phases) {
            const RuleInputs in{ph, gap(rng), speed(rng), 10.0, i % 2 == 0, prof};
            const std::string q =
                render_question(make_situation_report(ego(3.0, 2.0, in.ego_speed), 0.0, "P", in));
            const bool has_sentinel = q.find(" is 9999 m") != std::string::npos;
            REQUIRE(has_sentinel == (ph == CrossingPhase::NotOnPath));
        }
    }
}

TEST_CASE("question rendering is injective at two-decimal precision")
{
    std::mt19937 rng(9);
    std::uniform_int_distribution<int> cents(0, 6000);
    std::set<std::tuple<int, int, int, int, int>> keys;
    std::set<std::string> texts;
    for (int i = 0; i < 3000; ++i) {
        SituationReport r;
        const int a = cents(rng) % 1500, b = cents(rng), c = cents(rng) % 400, d = cents(rng),
                  e = cents(rng) % 3000;
        r.ego_speed = a / 100.0;
        r.longitudinal_from_x0 = b / 100.0;
        r.lateral_from_y0 = c / 100.0;
        r.pedestrian_name = "Ped1";
        r.gap_to_pedestrian = d / 100.0 + 0.01;
        r.distance_to_stop_hard = e / 100.0;
        r.phase_sentence = "S.";
        if (keys.insert(std::make_tuple(a, b, c, d, e)).second) {
            REQUIRE(texts.insert(render_question(r)).second);
        }
    }
}

TEST_CASE("render and parse decisions")
{
    CHECK(render_decision(Decision::for_requirement(1)) == "Req=1, accel=0,nudge=0");
    CHECK(render_decision(Decision::for_requirement(6)) == "Req=6, accel=-8,nudge=0");
    CHECK(render_decision(Decision::for_requirement(7)) == "Req=7, accel=2,nudge=2");
    CHECK(render_decision(Decision::neutral()) == "Req=0, accel=0,nudge=0");
    for (int id = 1; id <= 7; ++id) {
        const Decision d = Decision::for_requirement(id);
        const ParseResult r = parse_response(render_decision(d));
        CHECK(r.status == ParseStatus::Ok);
        REQUIRE(r.decision);
        CHECK(*r.decision == d);
    }
    const ParseResult n = parse_response(render_decision(Decision::neutral()));
    CHECK(n.status == ParseStatus::Ok);
    CHECK(*n.decision == Decision::neutral());
}

TEST_CASE("parse examples")
{
    CHECK(*parse_response("Req=2, accel=-2,nudge=1").decision == Decision::for_requirement(2));
    CHECK(*parse_response(RawResponse{"Req=7, accel=2,nudge=2"}).decision ==
          Decision::for_requirement(7));
    CHECK(parse_response("  \"Req=7, accel=2,nudge=2\"\n").status == ParseStatus::Ok);
    CHECK(parse_response("Req=2,accel=-2,nudge=1").status == ParseStatus::Ok);
    CHECK(parse_response("Req=3, accel=+0,nudge=1").status != ParseStatus::Ok);

    CHECK(parse_response("Req.3, accel=-4,nudge=no").status == ParseStatus::Malformed);
    CHECK(parse_response("").status == ParseStatus::Malformed);
    CHECK(parse_response("Req=8, accel=0,nudge=0").status == ParseStatus::Malformed);
    CHECK(parse_response("Req=2, accel=-2,nudge=3").status == ParseStatus::Malformed);
    CHECK(parse_response("Req=2, accel=-2,nudge=1 please").status == ParseStatus::Malformed);
    CHECK(parse_response("\"Req=2, accel=-2,nudge=1").status == ParseStatus::Malformed);
    CHECK(parse_response("Req=0, accel=-2,nudge=0").status == ParseStatus::Malformed);
    CHECK_FALSE(parse_response("Req=1, accel=99999,nudge=0").has_decision());

    SUBCASE("inconsistent pair resolves to the table")
    {
        const ParseResult r = parse_response("Req=3, accel=-2,nudge=0");
        CHECK(r.status == ParseStatus::Inconsistent);
        REQUIRE(r.decision);
        CHECK(*r.decision == Decision::for_requirement(3));
        CHECK_FALSE(r.detail.empty());
    }
}

TEST_CASE("parser is total over arbitrary bytes")
{
    std::mt19937 rng(13);
    std::uniform_int_distribution<int> byte(0, 255);
    std::uniform_int_distribution<int> len(0, 40);
    const std::string alphabet = "Req=accelnudg,-+0123456789 \"\t\n";
    std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
    for (int i = 0; i < 20000; ++i) {
        std::string s;
        const int n = len(rng);
        for (int k = 0; k < n; ++k) {
            s.push_back(i % 2 ? static_cast<char>(byte(rng)) : alphabet[pick(rng)]);
        }
        const ParseResult r = parse_response(s);
        REQUIRE(r.has_decision() == (r.status != ParseStatus::Malformed));
    }
    // mutations of a valid reply
    const std::string base = "Req=5, accel=-6,nudge=0";
    for (std::size_t i = 0; i < base.size(); ++i) {
        for (int c = 0; c < 256; ++c) {
            std::string s = base;
            s[i] = static_cast<char>(c);
            const ParseResult r = parse_response(s);
            REQUIRE(r.has_decision() == (r.status != ParseStatus::Malformed));
        }
    }
}
