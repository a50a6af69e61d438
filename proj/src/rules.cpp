#include "avsup/rules.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

namespace avsup {

namespace {

struct TableRow {
    int accel;
    NudgeCode nudge;
};

constexpr std::array<TableRow, 7> kRequirementTable{{
    {0, NudgeCode::Hold},
    {-2, NudgeCode::Away},
    {-4, NudgeCode::Away},
    {-4, NudgeCode::Hold},
    {-6, NudgeCode::Hold},
    {-8, NudgeCode::Hold},
    {2, NudgeCode::Center},
}};

} // namespace

Decision Decision::for_requirement(int id)
{
    if (auto d = try_for_requirement(id)) {
        return *d;
    }
    throw std::out_of_range("requirement id must be in 1..7");
}

std::optional<Decision> Decision::try_for_requirement(int id)
{
    if (id < kMinRequirement || id > kMaxRequirement) {
        return std::nullopt;
    }
    const TableRow& row = kRequirementTable[static_cast<std::size_t>(id - 1)];
    return Decision{id, row.accel, row.nudge};
}

std::string_view to_string(CrossingPhase phase)
{
    switch (phase) {
    case CrossingPhase::Crossed: return "Crossed";
    case CrossingPhase::CloseToCrossing: return "CloseToCrossing";
    case CrossingPhase::MiddleOfRoad: return "MiddleOfRoad";
    case CrossingPhase::OnRoad: return "OnRoad";
    case CrossingPhase::NotOnPath: return "NotOnPath";
    }
    return "?";
}

std::string_view to_string(BrakingBand band)
{
    switch (band) {
    case BrakingBand::None: return "none";
    case BrakingBand::Soft: return "soft";
    case BrakingBand::Medium: return "medium";
    case BrakingBand::Hard: return "hard";
    }
    return "?";
}

double stopping_distance(double speed, double decel_magnitude)
{
    return speed * speed / (2.0 * decel_magnitude);
}

BrakingBand braking_band(double gap, double speed, const BrakingProfile& profile)
{
    const double soft = stopping_distance(speed, profile.soft);
    const double medium = stopping_distance(speed, profile.medium);
    const double hard = stopping_distance(speed, profile.hard);
    if (gap <= hard) {
        return BrakingBand::Hard;
    }
    if (gap <= medium) {
        return BrakingBand::Medium;
    }
    if (gap <= soft) {
        return BrakingBand::Soft;
    }
    return BrakingBand::None;
}

CrossingPhase classify_pedestrian(const VehicleState& ego, const PedestrianState& ped,
                                  const RoadGeometry& road, double /*target_speed*/)
{
    if (!ped.started || ped.x < ego.x_world || ped.y >= road.road_y_max) {
        return CrossingPhase::NotOnPath;
    }
    const double gap = ped.x - ego.x_world;
    const double time_to_reach = gap / std::max(ego.vx_body, kSlipSpeedFloor);
    const double predicted_y = ped.y + ped.crossing_speed * time_to_reach;
    const double fraction = (predicted_y - road.road_y_min) / road.width();
    if (fraction >= 1.0) {
        return CrossingPhase::Crossed;
    }
    if (fraction >= kCloseToCrossingFraction) {
        return CrossingPhase::CloseToCrossing;
    }
    if (fraction >= kMiddleOfRoadFraction) {
        return CrossingPhase::MiddleOfRoad;
    }
    return CrossingPhase::OnRoad;
}

std::optional<Decision> evaluate_rules(CrossingPhase phase, double gap, double ego_speed,
                                       double target_speed, bool has_nudged,
                                       const BrakingProfile& profile)
{
    if (phase == CrossingPhase::NotOnPath) {
        if (ego_speed < target_speed || has_nudged) {
            return Decision::for_requirement(7);
        }
        return std::nullopt;
    }

    const BrakingBand band = braking_band(gap, ego_speed, profile);
    if (phase == CrossingPhase::OnRoad && band == BrakingBand::Hard) {
        return Decision::for_requirement(6);
    }
    if (phase == CrossingPhase::MiddleOfRoad && band == BrakingBand::Medium) {
        return Decision::for_requirement(5);
    }
    if (phase == CrossingPhase::MiddleOfRoad && band == BrakingBand::Soft) {
        return Decision::for_requirement(4);
    }
    if (phase == CrossingPhase::CloseToCrossing && band == BrakingBand::Medium) {
        return Decision::for_requirement(3);
    }
    if (phase == CrossingPhase::CloseToCrossing && band == BrakingBand::Soft) {
        return Decision::for_requirement(2);
    }
    if (phase == CrossingPhase::Crossed) {
        return Decision::for_requirement(1);
    }
    return std::nullopt;
}

std::optional<Decision> evaluate_rules(const RuleInputs& in)
{
    return evaluate_rules(in.phase, in.gap, in.ego_speed, in.target_speed, in.has_nudged,
                          in.profile);
}

Decision arbitrate(std::span<const Decision> decisions)
{
    if (decisions.empty()) {
        return Decision::neutral();
    }
    return *std::min_element(decisions.begin(), decisions.end(),
                             [](const Decision& a, const Decision& b) {
                                 if (a.accel() != b.accel()) {
                                     return a.accel() < b.accel();
                                 }
                                 return a.requirement_id() < b.requirement_id();
                             });
}

} // namespace avsup
