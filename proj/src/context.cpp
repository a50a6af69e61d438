#include "avsup/context.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>

namespace avsup {

namespace {

constexpr std::string_view kSystemPrompt =
    "You are an autonomous vehicle driver. The vehicle you are driving is called EGO. You need "
    "to drive subject to the following requirements:\n"
    "1. If a pedestrian is jaywalking along EGO's path AND is expected to have crossed the road "
    "by the time EGO will reach them, then the EGO shall maintain speed.\n"
    "2. If a pedestrian is jaywalking along EGO's path AND is expected to be close to crossing "
    "the road by the time EGO will reach them, and EGO and pedestrian are within soft braking "
    "distance, then the EGO shall apply soft braking and shall nudge away from the pedestrian.\n"
    "3. If a pedestrian is jaywalking along EGO's path AND is expected to be close to crossing "
    "the road by the time EGO will reach them, and EGO and pedestrian are within medium braking "
    "distance, then the EGO shall apply hard braking and shall nudge away from the pedestrian.\n"
    "4. If a pedestrian is jaywalking along EGO's path AND is expected to be in the middle of "
    "the road by the time EGO will reach them, and EGO and pedestrian are within soft braking "
    "distance, then the EGO shall apply medium braking.\n"
    "5. If a pedestrian is jaywalking along EGO's path AND is expected to be in the middle of "
    "the road by the time EGO will reach them, and EGO and pedestrian are within medium braking "
    "distance, then the EGO shall apply hard braking.\n"
    "6. If a pedestrian is jaywalking along EGO's path AND is expected to be on the road by the "
    "time EGO will reach them, and EGO and pedestrian are within hard braking distance, then the "
    "EGO shall apply full braking.\n"
    "7. If the EGO has slowed down below the route target speed OR nudged due to a pedestrian "
    "jaywalking AND there is no pedestrian on the road, then the EGO shall accelerate smoothly "
    "to the target route speed and shall go back to center of the road.\n"
    "- A requirement is met if all the AND conditions in the requirement are met.\n"
    "- You need to respond with \"Req=1, accel=0,nudge=0\" if you encounter all the conditions "
    "for Requirement 1.\n"
    "- You need to respond with \"Req=2, accel=-2,nudge=1\" if you encounter all the conditions "
    "for Requirement 2.\n"
    "- You need to respond with \"Req=3, accel=-4,nudge=1\" if you encounter all the conditions "
    "for Requirement 3.\n"
    "- You need to respond with \"Req=4, accel=-4,nudge=0\" if you encounter all the conditions "
    "for Requirement 4.\n"
    "- You need to respond with \"Req=5, accel=-6,nudge=0\" if you encounter all the conditions "
    "for Requirement 5.\n"
    "- You need to respond with \"Req=6, accel=-8,nudge=0\" if you encounter all the conditions "
    "for Requirement 6.\n"
    "- You need to respond with \"Req=7, accel=2,nudge=2\" if you encounter all the conditions "
    "for Requirement 7.\n"
    "- You can only respond with the text within the quotes \"\" but (not include the quote \" "
    "symbol itself) and not come up with your answers because there is a program that parses "
    "your responses and is expecting a fixed structure.\n";

std::string_view phase_phrase(CrossingPhase phase)
{
    switch (phase) {
    case CrossingPhase::Crossed: return "have crossed the road";
    case CrossingPhase::CloseToCrossing: return "be close crossing the road";
    case CrossingPhase::MiddleOfRoad: return "be in the middle of the road";
    case CrossingPhase::OnRoad: return "be on the road";
    case CrossingPhase::NotOnPath: break;
    }
    return "";
}

// Minimal cursor over the reply; never reads past the end.
class Cursor {
public:
    explicit Cursor(std::string_view text) : text_(text) {}

    void skip_space()
    {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
    }
    bool eat(char c)
    {
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    bool eat(std::string_view word)
    {
        if (text_.substr(pos_).starts_with(word)) {
            pos_ += word.size();
            return true;
        }
        return false;
    }
    std::optional<int> integer()
    {
        std::size_t p = pos_;
        bool negative = false;
        if (p < text_.size() && (text_[p] == '-' || text_[p] == '+')) {
            negative = text_[p] == '-';
            ++p;
        }
        const std::size_t digits_begin = p;
        while (p < text_.size() && p - digits_begin < 4 &&
               std::isdigit(static_cast<unsigned char>(text_[p]))) {
            ++p;
        }
        if (p == digits_begin ||
            (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p])))) {
            return std::nullopt;
        }
        int value = 0;
        std::from_chars(text_.data() + digits_begin, text_.data() + p, value);
        pos_ = p;
        return negative ? -value : value;
    }
    bool at_end() const { return pos_ == text_.size(); }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
};

ParseResult malformed(std::string detail)
{
    ParseResult r;
    r.status = ParseStatus::Malformed;
    r.detail = std::move(detail);
    return r;
}

} // namespace

std::string format_quantity(double value)
{
    if (!std::isfinite(value)) {
        return "nan";
    }
    std::array<char, 512> buf{};
    const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value,
                                   std::chars_format::fixed, 2);
    if (ec != std::errc{}) {
        return "nan";
    }
    std::string out(buf.data(), end);
    if (out == "-0.00") {
        out = "0.00";
    }
    if (out.ends_with('0')) {
        out.pop_back();
    }
    return out;
}

std::string describe_situation(const RuleInputs& in)
{
    if (in.phase == CrossingPhase::NotOnPath) {
        if (in.ego_speed < in.target_speed || in.has_nudged) {
            return "There is not a pedestrian along the EGO's path and EGO travels with less than "
                   "target speed or has nudged.";
        }
        return "There is not a pedestrian along the EGO's path and EGO travels at target speed "
               "in the center of the road.";
    }
    std::string s = "A pedestrian is jaywalking and is expected to ";
    s += phase_phrase(in.phase);
    const BrakingBand band = braking_band(in.gap, in.ego_speed, in.profile);
    if (band == BrakingBand::None) {
        s += " and EGO and pedestrian are not within any braking distance.";
    } else {
        s += " and EGO and pedestrian are within ";
        s += to_string(band);
        s += " braking distance.";
    }
    return s;
}

SituationReport make_situation_report(const VehicleState& ego, double origin_x,
                                      std::string pedestrian_name, const RuleInputs& in)
{
    SituationReport r;
    r.ego_speed = ego.vx_body;
    r.longitudinal_from_x0 = ego.x_world - origin_x;
    r.lateral_from_y0 = ego.y_world;
    r.pedestrian_name = std::move(pedestrian_name);
    r.gap_to_pedestrian = in.phase == CrossingPhase::NotOnPath ? kAbsentGap : in.gap;
    r.distance_to_stop_hard = stopping_distance(ego.vx_body, in.profile.hard);
    r.phase_sentence = describe_situation(in);
    return r;
}

const std::string& render_system_prompt()
{
    static const std::string prompt(kSystemPrompt);
    return prompt;
}

std::string render_question(const SituationReport& report)
{
    const std::string gap = report.gap_to_pedestrian == kAbsentGap
                                ? std::string("9999")
                                : format_quantity(report.gap_to_pedestrian);
    std::string q;
    q.reserve(256);
    q += "EGO is traveling at " + format_quantity(report.ego_speed) + " m/s I am ";
    q += format_quantity(report.longitudinal_from_x0) + " m longitudinally from X0 ";
    q += format_quantity(report.lateral_from_y0) + " m laterally from Y0. ";
    q += "Distance to " + report.pedestrian_name + " is " + gap + " m with distanceToStopHard ";
    q += format_quantity(report.distance_to_stop_hard) + " m. ";
    q += report.phase_sentence;
    q += " What should the EGO do?";
    return q;
}

std::string_view to_string(ParseStatus status)
{
    switch (status) {
    case ParseStatus::Ok: return "ok";
    case ParseStatus::Inconsistent: return "inconsistent";
    case ParseStatus::Malformed: return "malformed";
    }
    return "?";
}

ParseResult parse_response(std::string_view raw)
{
    Cursor c(raw);
    c.skip_space();
    const bool quoted = c.eat('"');
    c.skip_space();
    if (!c.eat("Req=")) {
        return malformed("expected 'Req='");
    }
    const auto id = c.integer();
    if (!id || *id < 0 || *id > Decision::kMaxRequirement) {
        return malformed("requirement id out of range");
    }
    if (!c.eat(',')) {
        return malformed("expected ',' after requirement id");
    }
    c.skip_space();
    if (!c.eat("accel=")) {
        return malformed("expected 'accel='");
    }
    const auto accel = c.integer();
    if (!accel) {
        return malformed("accel is not an integer");
    }
    if (!c.eat(',')) {
        return malformed("expected ',' after accel");
    }
    c.skip_space();
    if (!c.eat("nudge=")) {
        return malformed("expected 'nudge='");
    }
    const auto nudge = c.integer();
    if (!nudge || *nudge < 0 || *nudge > 2) {
        return malformed("nudge must be 0, 1 or 2");
    }
    c.skip_space();
    if (quoted && !c.eat('"')) {
        return malformed("unterminated quote");
    }
    c.skip_space();
    if (!c.at_end()) {
        return malformed("trailing characters");
    }

    const Decision canonical =
        *id == 0 ? Decision::neutral() : Decision::for_requirement(*id);
    ParseResult r;
    r.decision = canonical;
    if (canonical.accel() == *accel && static_cast<int>(canonical.nudge()) == *nudge) {
        r.status = ParseStatus::Ok;
    } else if (*id == 0) {
        return malformed("neutral reply must be accel=0,nudge=0");
    } else {
        r.status = ParseStatus::Inconsistent;
        r.detail = "accel/nudge contradict requirement " + std::to_string(*id);
    }
    return r;
}

std::string render_decision(const Decision& decision)
{
    return "Req=" + std::to_string(decision.requirement_id()) +
           ", accel=" + std::to_string(decision.accel()) +
           ",nudge=" + std::to_string(static_cast<int>(decision.nudge()));
}

} // namespace avsup
