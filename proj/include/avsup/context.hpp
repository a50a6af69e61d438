#pragma once

#include "avsup/dynamics.hpp"
#include "avsup/rules.hpp"

#include <optional>
#include <string>
#include <string_view>

namespace avsup {

/// Gap reported for a pedestrian that is not on the EGO's path.
inline constexpr double kAbsentGap = 9999.0;

/// Everything the supervisor is told about one pedestrian at one instant.
struct SituationReport {
    double ego_speed = 0.0;            // m/s
    double longitudinal_from_x0 = 0.0; // m
    double lateral_from_y0 = 0.0;      // m, absolute lateral position
    std::string pedestrian_name;
    double gap_to_pedestrian = kAbsentGap; // m, or kAbsentGap
    double distance_to_stop_hard = 0.0;    // m
    std::string phase_sentence;
};

/// Builds the report for one pedestrian from structured rule inputs. The gap
/// is replaced by kAbsentGap iff the phase is NotOnPath.
SituationReport make_situation_report(const VehicleState& ego, double origin_x,
                                      std::string pedestrian_name, const RuleInputs& in);

/// Sentence describing the classified situation, e.g. "A pedestrian is
/// jaywalking and is expected to be close crossing the road and ...".
std::string describe_situation(const RuleInputs& in);

/// Numbers as they appear in questions: rounded to two decimals, trailing
/// zeros dropped but at least one fractional digit kept ("8.0", "29.39").
std::string format_quantity(double value);

/// The fixed rule set and response protocol sent as the system instruction.
const std::string& render_system_prompt();

std::string render_question(const SituationReport& report);

struct RawResponse {
    std::string text;
};

enum class ParseStatus { Ok, Inconsistent, Malformed };

std::string_view to_string(ParseStatus status);

struct ParseResult {
    ParseStatus status = ParseStatus::Malformed;
    std::optional<Decision> decision; // set unless Malformed
    std::string detail;

    bool has_decision() const { return decision.has_value(); }
};

/**
 * Accepts `Req=<id>, accel=<int>,nudge=<0|1|2>` with optional surrounding
 * whitespace and double quotes. `id` is 1..7, or 0 for the neutral reply
 * `Req=0, accel=0,nudge=0`. When the stated accel/nudge disagree with the
 * requirement table the status is Inconsistent and the canonical decision
 * for the requirement id is returned.
 */
ParseResult parse_response(std::string_view raw);
inline ParseResult parse_response(const RawResponse& raw) { return parse_response(raw.text); }

/// `Req=<id>, accel=<a>,nudge=<n>`; the neutral decision renders with id 0.
std::string render_decision(const Decision& decision);

} // namespace avsup
