#include "avsup/io.hpp"

#include "avsup/context.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>

namespace avsup {

namespace {

// Fixed two-decimal coordinates keep the output byte-stable.
std::string fmt(double v)
{
    std::array<char, 64> buf{};
    const auto [end, ec] =
        std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed, 2);
    std::string s = ec == std::errc{} ? std::string(buf.data(), end) : std::string("0.00");
    return s == "-0.00" ? "0.00" : s;
}

std::string tick_label(double v)
{
    std::array<char, 64> buf{};
    const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(),
                                         std::round(v * 1000.0) / 1000.0);
    std::string s = ec == std::errc{} ? std::string(buf.data(), end) : std::string("0");
    return s == "-0" ? "0" : s;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void include(double v)
    {
        if (std::isfinite(v)) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    Range padded() const
    {
        if (!(lo <= hi)) {
            return {0.0, 1.0};
        }
        const double span = hi - lo;
        const double pad = span > 0.0 ? 0.05 * span : std::max(1.0, std::abs(lo) * 0.1);
        return {lo - pad, hi + pad};
    }
};

double nice_step(double span)
{
    const double raw = span / 6.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (const double m : {1.0, 2.0, 5.0, 10.0}) {
        if (m * mag >= raw) {
            return m * mag;
        }
    }
    return 10.0 * mag;
}

class Chart {
public:
    Chart(std::string title, std::string x_label, std::string y_label, Range x, Range y)
        : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)),
          x_(x.padded()), y_(y.padded())
    {
    }

    double px(double x) const { return kLeft + (x - x_.lo) / (x_.hi - x_.lo) * kPlotW; }
    double py(double y) const { return kTop + (1.0 - (y - y_.lo) / (y_.hi - y_.lo)) * kPlotH; }

    void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& color,
                  const std::string& label, bool dashed = false)
    {
        if (pts.empty()) {
            return;
        }
        std::string d;
        for (const auto& [x, y] : pts) {
            if (!d.empty()) {
                d += ' ';
            }
            d += fmt(px(x)) + "," + fmt(py(y));
        }
        body_ += "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.5\"" +
                 (dashed ? std::string(" stroke-dasharray=\"6,4\"") : std::string()) +
                 " points=\"" + d + "\"/>\n";
        legend_.emplace_back(label, color);
    }

    void marker(double x, double y, const std::string& color, const std::string& text)
    {
        const double cx = px(x);
        const double cy = py(y);
        body_ += "<g class=\"collision\"><line x1=\"" + fmt(cx - 6) + "\" y1=\"" + fmt(cy - 6) +
                 "\" x2=\"" + fmt(cx + 6) + "\" y2=\"" + fmt(cy + 6) + "\" stroke=\"" + color +
                 "\" stroke-width=\"2.5\"/><line x1=\"" + fmt(cx - 6) + "\" y1=\"" + fmt(cy + 6) +
                 "\" x2=\"" + fmt(cx + 6) + "\" y2=\"" + fmt(cy - 6) + "\" stroke=\"" + color +
                 "\" stroke-width=\"2.5\"/><text x=\"" + fmt(cx + 8) + "\" y=\"" + fmt(cy - 8) +
                 "\" fill=\"" + color + "\" font-size=\"13\" font-weight=\"bold\">" + text +
                 "</text></g>\n";
    }

    std::string str() const
    {
        std::string s;
        s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(kWidth) + "\" height=\"" +
             fmt(kHeight) + "\" viewBox=\"0 0 " + fmt(kWidth) + " " + fmt(kHeight) +
             "\" font-family=\"sans-serif\">\n";
        s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
        s += "<text x=\"" + fmt(kWidth / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" +
             title_ + "</text>\n";
        s += axes();
        s += body_;
        s += legend();
        s += "</svg>\n";
        return s;
    }

private:
    static constexpr double kWidth = 720;
    static constexpr double kHeight = 420;
    static constexpr double kLeft = 70;
    static constexpr double kTop = 40;
    static constexpr double kPlotW = 600;
    static constexpr double kPlotH = 310;

    std::string axes() const
    {
        std::string s;
        s += "<rect x=\"" + fmt(kLeft) + "\" y=\"" + fmt(kTop) + "\" width=\"" + fmt(kPlotW) +
             "\" height=\"" + fmt(kPlotH) + "\" fill=\"none\" stroke=\"black\"/>\n";
        const double xs = nice_step(x_.hi - x_.lo);
        for (double v = std::ceil(x_.lo / xs) * xs; v <= x_.hi; v += xs) {
            s += "<line x1=\"" + fmt(px(v)) + "\" y1=\"" + fmt(kTop) + "\" x2=\"" + fmt(px(v)) +
                 "\" y2=\"" + fmt(kTop + kPlotH) + "\" stroke=\"#dddddd\"/>\n";
            s += "<text x=\"" + fmt(px(v)) + "\" y=\"" + fmt(kTop + kPlotH + 16) +
                 "\" text-anchor=\"middle\" font-size=\"11\">" + tick_label(v) + "</text>\n";
        }
        const double ys = nice_step(y_.hi - y_.lo);
        for (double v = std::ceil(y_.lo / ys) * ys; v <= y_.hi; v += ys) {
            s += "<line x1=\"" + fmt(kLeft) + "\" y1=\"" + fmt(py(v)) + "\" x2=\"" +
                 fmt(kLeft + kPlotW) + "\" y2=\"" + fmt(py(v)) + "\" stroke=\"#dddddd\"/>\n";
            s += "<text x=\"" + fmt(kLeft - 6) + "\" y=\"" + fmt(py(v) + 4) +
                 "\" text-anchor=\"end\" font-size=\"11\">" + tick_label(v) + "</text>\n";
        }
        s += "<text x=\"" + fmt(kLeft + kPlotW / 2) + "\" y=\"" + fmt(kHeight - 12) +
             "\" text-anchor=\"middle\" font-size=\"12\">" + x_label_ + "</text>\n";
        s += "<text x=\"16\" y=\"" + fmt(kTop + kPlotH / 2) +
             "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 " +
             fmt(kTop + kPlotH / 2) + ")\">" + y_label_ + "</text>\n";
        return s;
    }

    std::string legend() const
    {
        std::string s;
        double y = kTop + 14;
        for (const auto& [label, color] : legend_) {
            if (label.empty()) {
                continue;
            }
            s += "<line x1=\"" + fmt(kLeft + kPlotW - 150) + "\" y1=\"" + fmt(y - 4) + "\" x2=\"" +
                 fmt(kLeft + kPlotW - 130) + "\" y2=\"" + fmt(y - 4) + "\" stroke=\"" + color +
                 "\" stroke-width=\"2\"/>\n";
            s += "<text x=\"" + fmt(kLeft + kPlotW - 125) + "\" y=\"" + fmt(y) +
                 "\" font-size=\"11\">" + label + "</text>\n";
            y += 16;
        }
        return s;
    }

    std::string title_;
    std::string x_label_;
    std::string y_label_;
    Range x_;
    Range y_;
    std::string body_;
    std::vector<std::pair<std::string, std::string>> legend_;
};

const std::array<const char*, 4> kPedColors{"#d62728", "#2ca02c", "#9467bd", "#8c564b"};

} // namespace

std::string render_speed_plot(const SimLog& log)
{
    Range x;
    Range y;
    std::vector<std::pair<double, double>> speed;
    for (const auto& r : log.steps) {
        x.include(r.time);
        y.include(r.state.vx_body);
        speed.emplace_back(r.time, r.state.vx_body);
    }
    y.include(0.0);
    Chart chart("EGO speed", "time [s]", "speed [m/s]", x, y);
    chart.polyline(speed, "#1f77b4", "vx");
    for (const auto& c : log.collisions) {
        const auto it = std::find_if(log.steps.begin(), log.steps.end(),
                                     [&](const StepRecord& r) { return r.time >= c.time; });
        if (it != log.steps.end()) {
            chart.marker(it->time, it->state.vx_body, "#d62728", "Oups!");
        }
    }
    return chart.str();
}

std::string render_lateral_plot(const SimLog& log)
{
    Range x;
    Range y;
    std::vector<std::pair<double, double>> pos;
    std::vector<std::pair<double, double>> ref;
    for (const auto& r : log.steps) {
        x.include(r.time);
        y.include(r.state.y_world);
        y.include(r.lateral_ref);
        pos.emplace_back(r.time, r.state.y_world);
        ref.emplace_back(r.time, r.lateral_ref);
    }
    Chart chart("EGO lateral position", "time [s]", "Y [m]", x, y);
    chart.polyline(ref, "#ff7f0e", "lateral reference", true);
    chart.polyline(pos, "#1f77b4", "Y");
    return chart.str();
}

std::string render_trajectory_plot(const SimLog& log)
{
    Range x;
    Range y;
    std::vector<std::pair<double, double>> ego;
    for (const auto& r : log.steps) {
        x.include(r.state.x_world);
        y.include(r.state.y_world);
        ego.emplace_back(r.state.x_world, r.state.y_world);
    }
    std::vector<std::vector<std::pair<double, double>>> tracks(log.pedestrian_names.size());
    for (std::size_t i = 0; i < log.pedestrian_names.size(); ++i) {
        x.include(log.pedestrian_x[i]);
        for (const auto& r : log.steps) {
            if (i < r.ped_y.size()) {
                y.include(r.ped_y[i]);
                if (tracks[i].empty() || tracks[i].back().second != r.ped_y[i]) {
                    tracks[i].emplace_back(log.pedestrian_x[i], r.ped_y[i]);
                }
            }
        }
    }
    Chart chart("Top-down trajectory", "X [m]", "Y [m]", x, y);
    chart.polyline(ego, "#1f77b4", "EGO");
    for (std::size_t i = 0; i < tracks.size(); ++i) {
        chart.polyline(tracks[i], kPedColors[i % kPedColors.size()], log.pedestrian_names[i]);
    }
    for (const auto& c : log.collisions) {
        const auto it = std::find_if(log.steps.begin(), log.steps.end(),
                                     [&](const StepRecord& r) { return r.time >= c.time; });
        if (it != log.steps.end()) {
            chart.marker(it->state.x_world, it->state.y_world, "#d62728", "Oups! " + c.pedestrian);
        }
    }
    return chart.str();
}

std::vector<std::filesystem::path> emit_plots(const SimLog& log, const std::filesystem::path& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    const std::array<std::pair<const char*, std::string>, 3> plots{{
        {"speed.svg", render_speed_plot(log)},
        {"lateral.svg", render_lateral_plot(log)},
        {"trajectory.svg", render_trajectory_plot(log)},
    }};
    std::vector<std::filesystem::path> written;
    for (const auto& [name, svg] : plots) {
        const auto path = dir / name;
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out << svg;
        if (!out) {
            throw IoError("cannot write " + path.string());
        }
        written.push_back(path);
    }
    return written;
}

} // namespace avsup
