#pragma once

#include "avsup/sim.hpp"

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace avsup {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---- scenario files (JSON) --------------------------------------------------

std::string scenario_to_json(const Scenario& scenario);
/// Missing keys keep their defaults. Throws IoError on malformed documents.
Scenario scenario_from_json(std::string_view text);
Scenario load_scenario(const std::filesystem::path& path);
void save_scenario(const Scenario& scenario, const std::filesystem::path& path);

// ---- trajectory CSV -----------------------------------------------------------

/// Bumped whenever the column set or order changes.
inline constexpr int kCsvSchemaVersion = 1;

/// time,x,y,yaw,vx,vy,yaw_rate,accel_cmd,steer_cmd,req_id,nudge,lateral_ref,
/// ped1_y,ped2_y[,ped3_y...],collision_flag
std::vector<std::string> csv_columns(std::size_t pedestrian_count);

/// Values use the shortest round-trip representation; absent pedestrians are "nan".
void write_csv(const SimLog& log, std::ostream& out);
void export_csv(const SimLog& log, const std::filesystem::path& path);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

CsvTable read_csv(const std::filesystem::path& path);

// ---- plots (SVG) ----------------------------------------------------------------

std::string render_speed_plot(const SimLog& log);
std::string render_lateral_plot(const SimLog& log);
std::string render_trajectory_plot(const SimLog& log);

/// Writes speed.svg, lateral.svg and trajectory.svg into `dir` and returns their paths.
std::vector<std::filesystem::path> emit_plots(const SimLog& log, const std::filesystem::path& dir);

} // namespace avsup
