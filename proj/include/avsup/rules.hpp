#pragma once

#include "avsup/dynamics.hpp"

#include <optional>
#include <span>
#include <string_view>

namespace avsup {

/// Deceleration magnitudes for the four braking levels, m/s^2.
struct BrakingProfile {
    double soft = 2.0;
    double medium = 4.0;
    double hard = 6.0;
    double full = 8.0;

    bool valid() const { return 0.0 < soft && soft < medium && medium < hard && hard < full; }
};

enum class CrossingPhase { Crossed, CloseToCrossing, MiddleOfRoad, OnRoad, NotOnPath };

std::string_view to_string(CrossingPhase phase);

/// A pedestrian in this phase is still an obstacle on the EGO's path.
constexpr bool is_active(CrossingPhase phase)
{
    return phase == CrossingPhase::CloseToCrossing || phase == CrossingPhase::MiddleOfRoad ||
           phase == CrossingPhase::OnRoad;
}

enum class NudgeCode : int { Hold = 0, Away = 1, Center = 2 };

/**
 * One of the seven requirement responses, or the neutral hold used when no
 * requirement applies. The (accel, nudge) pair is always the one fixed for the
 * requirement; there is no way to construct any other combination.
 *
 *   Req 1 (0, 0)   Req 2 (-2, 1)   Req 3 (-4, 1)   Req 4 (-4, 0)
 *   Req 5 (-6, 0)  Req 6 (-8, 0)   Req 7 (+2, 2)
 */
class Decision {
public:
    static constexpr int kMinRequirement = 1;
    static constexpr int kMaxRequirement = 7;

    /// Throws std::out_of_range unless 1 <= id <= 7.
    static Decision for_requirement(int id);
    static std::optional<Decision> try_for_requirement(int id);
    /// No requirement applies: keep speed, keep lateral reference.
    static constexpr Decision neutral() { return Decision{0, 0, NudgeCode::Hold}; }

    constexpr int requirement_id() const { return requirement_id_; }
    constexpr bool is_neutral() const { return requirement_id_ == 0; }
    constexpr int accel() const { return accel_; }
    constexpr NudgeCode nudge() const { return nudge_; }

    friend constexpr bool operator==(const Decision&, const Decision&) = default;

private:
    constexpr Decision(int id, int accel, NudgeCode nudge)
        : requirement_id_(id), accel_(accel), nudge_(nudge) {}

    int requirement_id_;
    int accel_;
    NudgeCode nudge_;
};

/// Lateral extent of the road and the lane the EGO follows.
struct RoadGeometry {
    double road_y_min = 0.0;
    double road_y_max = 4.0;
    double lane_center_y = 2.0;

    double width() const { return road_y_max - road_y_min; }
    bool valid() const { return road_y_min < lane_center_y && lane_center_y < road_y_max; }
};

/// Pedestrian as seen by the supervisor at one instant.
struct PedestrianState {
    double x = 0.0;              // m, fixed crossing line
    double y = 0.0;              // m, current lateral position
    double crossing_speed = 0.0; // m/s, toward +Y
    bool started = false;
};

enum class BrakingBand { None, Soft, Medium, Hard };

std::string_view to_string(BrakingBand band);

/// Fractions of road width that separate the predicted phases.
inline constexpr double kCloseToCrossingFraction = 0.75;
inline constexpr double kMiddleOfRoadFraction = 0.25;

double stopping_distance(double speed, double decel_magnitude);

/// Mutually exclusive bands: soft is (medium, soft], medium is (hard, medium],
/// hard is [0, hard].
BrakingBand braking_band(double gap, double speed, const BrakingProfile& profile);

/// Predicts where the pedestrian will be when the EGO reaches its crossing line
/// at the current speed and classifies by the fraction of road crossed.
CrossingPhase classify_pedestrian(const VehicleState& ego, const PedestrianState& ped,
                                  const RoadGeometry& road, double target_speed);

/// Structured inputs for one rule evaluation.
struct RuleInputs {
    CrossingPhase phase = CrossingPhase::NotOnPath;
    double gap = 0.0;
    double ego_speed = 0.0;
    double target_speed = 0.0;
    bool has_nudged = false;
    BrakingProfile profile{};
};

/// Rules are tried most severe first (6, 5, 4, 3, 2, 1); rule 7 only applies
/// to a pedestrian that is not on the path. Returns nullopt if nothing matches.
std::optional<Decision> evaluate_rules(CrossingPhase phase, double gap, double ego_speed,
                                       double target_speed, bool has_nudged,
                                       const BrakingProfile& profile);
std::optional<Decision> evaluate_rules(const RuleInputs& in);

/// Most negative acceleration wins, ties go to the lower requirement id.
/// An empty list yields Decision::neutral().
Decision arbitrate(std::span<const Decision> decisions);

} // namespace avsup
