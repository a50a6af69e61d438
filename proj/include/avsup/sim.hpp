#pragma once

#include "avsup/backend.hpp"
#include "avsup/dynamics.hpp"
#include "avsup/lateral_control.hpp"
#include "avsup/rules.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace avsup {

struct Pedestrian {
    std::string name;
    double distance_from_ego_x0 = 0.0; // m, longitudinal position of the crossing line
    double crossing_speed = 0.0;       // m/s
    double lateral_position = 0.0;     // m, current
    double start_delay = 0.0;          // s after simulation start

    bool valid() const { return crossing_speed > 0.0 && distance_from_ego_x0 > 0.0; }
    bool started(double t) const;
    PedestrianState state(double t) const;
};

/// Half extents of the overlap envelope used for collision detection.
inline constexpr double kCollisionHalfLength = 2.3;
inline constexpr double kCollisionHalfWidth = 0.9;

struct Scenario {
    VehicleState initial_state{0.0, 2.0, 0.0, 10.0, 0.0, 0.0};
    double target_speed = 10.0;
    std::vector<Pedestrian> pedestrians;
    RoadGeometry road;
    double dt = 0.01;
    double decision_period = 0.5;
    double duration = 15.0;
    /// Stop once the EGO is this far past the last crossing line.
    double exit_margin = 20.0;
    double nudge_offset = 1.0;
    double gain_update_threshold = kGainUpdateThreshold;
    VehicleParams vehicle;
    LqrWeights weights = LqrWeights::lateral_tracking();
    BrakingProfile braking;

    /// Throws std::invalid_argument naming the first violated constraint.
    void validate() const;
    /// Decision period expressed in integration steps.
    long period_steps() const;
};

/// True when `period` is a positive integer multiple of `dt` (within 1e-9 relative).
bool is_step_multiple(double period, double dt);

/// Two jaywalkers ahead of an EGO cruising at 10 m/s: Ped1 crosses 20 m past
/// the soft-braking distance, Ped2 20 m further.
Scenario build_paper_scenario(double decision_period);

/// Advances every started pedestrian that has not reached the far road edge.
void step_pedestrians(std::span<Pedestrian> peds, double t, double dt, const RoadGeometry& road);

bool detect_collision(const VehicleState& ego, const PedestrianState& ped);

struct StepRecord {
    double time = 0.0;
    VehicleState state;
    double accel_cmd = 0.0;
    double steer_cmd = 0.0;
    Decision decision = Decision::neutral();
    double lateral_ref = 0.0;
    std::vector<double> ped_y;
    std::vector<CrossingPhase> ped_phase;
    bool collision = false;
};

struct DecisionEvent {
    double time = 0.0;
    Decision decision = Decision::neutral();
    std::string pedestrian; // whose decision won, empty if none
    bool held = false;      // previous decision kept after a failed exchange
    bool fail_safe = false; // full braking after consecutive failures
};

struct CollisionEvent {
    double time = 0.0;
    std::string pedestrian;
};

struct SimSummary {
    double min_gap = 0.0;
    double min_speed = 0.0;
    double final_speed = 0.0;
    bool collision = false;
    int inconsistent_responses = 0;
    int malformed_responses = 0;
    int backend_errors = 0;
    bool aborted = false;
    std::optional<BackendErrorKind> abort_kind;
    std::string abort_reason;
};

struct SimLog {
    std::vector<std::string> pedestrian_names;
    std::vector<double> pedestrian_x;
    std::vector<StepRecord> steps;
    std::vector<TranscriptEntry> transcript;
    std::vector<DecisionEvent> decisions;
    std::vector<CollisionEvent> collisions;
    SimSummary summary;
};

/**
 * Runs the supervisory loop. Every decision period each pedestrian is turned
 * into a question for `backend`; the parsed answers are arbitrated into one
 * acceleration command and lateral reference that are held until the next
 * decision instant. Unrecoverable backend errors end the run early with
 * `summary.aborted` set.
 */
SimLog run(const Scenario& scenario, DecisionBackend& backend);
SimLog run(const Scenario& scenario, const BackendConfig& config);

} // namespace avsup
