#include "avsup/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

namespace avsup {

namespace {

std::string number(double value)
{
    if (std::isnan(value)) {
        return "nan";
    }
    std::array<char, 64> buf{};
    const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return ec == std::errc{} ? std::string(buf.data(), end) : std::string("nan");
}

double parse_number(std::string_view field)
{
    if (field == "nan") {
        return std::numeric_limits<double>::quiet_NaN();
    }
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size()) {
        throw IoError("bad CSV number '" + std::string(field) + "'");
    }
    return value;
}

} // namespace

std::vector<std::string> csv_columns(std::size_t pedestrian_count)
{
    std::vector<std::string> cols{"time", "x",         "y",         "yaw",    "vx",
                                  "vy",   "yaw_rate",  "accel_cmd", "steer_cmd", "req_id",
                                  "nudge", "lateral_ref"};
    const std::size_t ped_columns = std::max<std::size_t>(2, pedestrian_count);
    for (std::size_t i = 0; i < ped_columns; ++i) {
        cols.push_back("ped" + std::to_string(i + 1) + "_y");
    }
    cols.push_back("collision_flag");
    return cols;
}

void write_csv(const SimLog& log, std::ostream& out)
{
    const auto cols = csv_columns(log.pedestrian_names.size());
    const std::size_t ped_columns = cols.size() - 13;
    for (std::size_t i = 0; i < cols.size(); ++i) {
        out << (i ? "," : "") << cols[i];
    }
    out << '\n';
    for (const StepRecord& r : log.steps) {
        const VehicleState& s = r.state;
        out << number(r.time) << ',' << number(s.x_world) << ',' << number(s.y_world) << ','
            << number(s.yaw) << ',' << number(s.vx_body) << ',' << number(s.vy_body) << ','
            << number(s.yaw_rate) << ',' << number(r.accel_cmd) << ',' << number(r.steer_cmd)
            << ',' << r.decision.requirement_id() << ',' << static_cast<int>(r.decision.nudge())
            << ',' << number(r.lateral_ref);
        for (std::size_t i = 0; i < ped_columns; ++i) {
            out << ','
                << (i < r.ped_y.size() ? number(r.ped_y[i])
                                       : number(std::numeric_limits<double>::quiet_NaN()));
        }
        out << ',' << (r.collision ? 1 : 0) << '\n';
    }
}

void export_csv(const SimLog& log, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    write_csv(log, out);
    if (!out) {
        throw IoError("failed writing " + path.string());
    }
}

CsvTable read_csv(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read " + path.string());
    }
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) {
        throw IoError("empty CSV " + path.string());
    }
    {
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) {
            table.header.push_back(field);
        }
    }
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::vector<double> row;
        std::string_view rest(line);
        while (true) {
            const auto comma = rest.find(',');
            row.push_back(parse_number(rest.substr(0, comma)));
            if (comma == std::string_view::npos) {
                break;
            }
            rest.remove_prefix(comma + 1);
        }
        if (row.size() != table.header.size()) {
            throw IoError("CSV row width does not match header");
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

} // namespace avsup
