#include "takens/report.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <fmt/format.h>

#include "takens/errors.hpp"
#include "takens/rng.hpp"
#include "takens/svg.hpp"

namespace takens {

namespace {

using nlohmann::json;

/// Rounds to 12 significant digits; the JSON writer then prints the shortest
/// representation, which has at most 12.
double sig12(double v)
{
    if (!std::isfinite(v)) {
        return v;
    }
    return std::stod(fmt::format("{:.12g}", v));
}

json sig12_array(const std::vector<double>& values)
{
    json out = json::array();
    for (double v : values) {
        out.push_back(sig12(v));
    }
    return out;
}

json optional_number(const std::optional<double>& v) { return v ? json(sig12(*v)) : json(nullptr); }

json curve_json(const CorrelationCurve& curve)
{
    json j;
    j["embedding_dimension"] = curve.embedding_dimension;
    j["radii"] = sig12_array(curve.radii);
    j["c_values"] = sig12_array(curve.c_values);
    j["pairs_used"] = curve.pairs_used;
    j["exact_pairs"] = curve.exact;
    j["theiler_window"] = curve.theiler;
    if (curve.fit) {
        j["fit"] = {{"scaling_region", {curve.fit->scaling_region.begin, curve.fit->scaling_region.end}},
                    {"slope", sig12(curve.fit->slope)},
                    {"slope_stderr", sig12(curve.fit->slope_stderr)},
                    {"r_squared", sig12(curve.fit->r_squared)}};
    } else {
        j["fit"] = nullptr;
    }
    return j;
}

json config_json(const AnalysisConfig& c)
{
    json j;
    j["embedding"] = {{"dimension", c.embedding.dimension}, {"lag", c.embedding.lag}, {"auto_lag", c.auto_lag}};
    j["theiler_window"] = c.theiler ? json(*c.theiler) : json("auto");
    j["forecast"] = {{"k", c.k}, {"test_fraction", sig12(c.test_fraction)}, {"horizon", 1}};
    j["surrogates"] = {{"count", c.n_surrogates}, {"kind", "shuffle"}};
    j["seed"] = c.seed;
    j["rng"] = Rng::kName;
    j["alpha"] = sig12(c.alpha);
    j["saturation_fraction"] = sig12(c.saturation_fraction);
    j["pair_budget"] = c.pair_budget;
    j["radii"] = {{"lo", sig12(c.radius_lo)}, {"count", c.radius_count}, {"spacing", "log"}};
    j["probe_dimensions"] = {c.probe_min, c.probe_max};
    j["scaling_region"] =
        c.scaling_region ? json{c.scaling_region->begin, c.scaling_region->end} : json("auto");
    j["normalization"] = "min-max onto [0,1], 2^-24 grid";
    j["thresholds_note"] = "alpha and the saturation rule are analysis conventions, not physical constants";
    return j;
}

} // namespace

const char* interpretation(Classification c) noexcept
{
    switch (c) {
    case Classification::DeterministicStructure:
        return "locality violated, hidden variables favored";
    case Classification::RandomConsistent:
        return "objective reality violated, orthodox randomness favored";
    case Classification::Inconclusive:
        return "no decision: the evidence neither establishes structure nor rules it out";
    }
    return "";
}

nlohmann::json to_json(const AnalysisReport& report)
{
    json j;
    j["schema"] = kReportSchema;
    j["input"] = {{"digest", report.input_digest}, {"length", report.input_length}};
    j["config"] = config_json(report.config);

    const auto& v = report.verdict;
    j["verdict"] = {{"classification", to_string(v.classification)},
                    {"dimension_estimate", optional_number(v.dimension_estimate)},
                    {"forecast_p", sig12(v.forecast_p)},
                    {"dimension_saturation", v.dimension_saturation},
                    {"evidence_summary", v.evidence_summary}};
    j["interpretation"] = interpretation(v.classification);

    json curves = json::array();
    for (const auto& c : report.curves) {
        curves.push_back(curve_json(c));
    }
    j["curves"] = curves;

    j["forecast"] = {{"horizon", report.forecast.horizon},
                     {"k", report.forecast.k},
                     {"test_points", report.forecast.test_points},
                     {"normalized_error", sig12(report.forecast.normalized_error)}};
    j["surrogate"] = {{"statistic_name", report.surrogate.statistic_name},
                      {"observed", sig12(report.surrogate.observed)},
                      {"surrogate_values", sig12_array(report.surrogate.surrogate_values)},
                      {"p_value", sig12(report.surrogate.p_value)}};
    return j;
}

std::string emit_report(const AnalysisReport& report) { return to_json(report).dump(2) + "\n"; }

std::string emit_timings(const AnalysisReport& report)
{
    json j = json::object();
    for (const auto& [stage, seconds] : report.timings) {
        j[stage] = seconds;
    }
    return j.dump(2) + "\n";
}

namespace {

constexpr double kMargin = 60.0;

struct Frame
{
    double x0, y0, w, h;
};

Frame plot_frame(const PlotStyle& style)
{
    return {kMargin, kMargin * 0.75, style.width - 1.5 * kMargin, style.height - 1.75 * kMargin};
}

std::string coordinate_label(std::size_t c, std::size_t lag)
{
    if (c == 0) {
        return "q(i)";
    }
    return fmt::format("q(i+{})", c * lag);
}

std::pair<double, double> bounds(const std::vector<double>& v)
{
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    double a = *lo;
    double b = *hi;
    if (!(b > a)) {
        a -= 0.5;
        b += 0.5;
    }
    return {a, b};
}

void axis_ticks(svg::Document& doc, const Frame& f, double lo, double hi, bool horizontal, bool log_scale)
{
    for (int t = 0; t <= 4; ++t) {
        const double frac = t / 4.0;
        const double value = lo + frac * (hi - lo);
        const std::string label = log_scale ? fmt::format("1e{:.2g}", value) : fmt::format("{:.3g}", value);
        if (horizontal) {
            const double x = f.x0 + frac * f.w;
            doc.line(x, f.y0 + f.h, x, f.y0 + f.h + 5, "black");
            doc.text(x, f.y0 + f.h + 18, label, 10, "middle");
        } else {
            const double y = f.y0 + f.h - frac * f.h;
            doc.line(f.x0 - 5, y, f.x0, y, "black");
            doc.text(f.x0 - 8, y + 3, label, 10, "end");
        }
    }
}

} // namespace

std::string render_portrait(const PhasePortrait& portrait, const std::vector<std::size_t>& projection,
                            const PlotStyle& style)
{
    if (projection.size() != 2 && projection.size() != 3) {
        throw BadProjection(fmt::format("projection needs 2 or 3 coordinates, got {}", projection.size()));
    }
    for (std::size_t c : projection) {
        if (c >= portrait.dimension()) {
            throw BadProjection(
                fmt::format("coordinate {} is out of range for a {}-dimensional portrait", c, portrait.dimension()));
        }
    }
    const std::size_t n = portrait.size();
    const std::size_t stride = std::max<std::size_t>(1, (n + style.max_points - 1) / std::max<std::size_t>(style.max_points, 1));
    const std::size_t lag = portrait.config().lag;

    std::vector<std::vector<double>> axes(projection.size());
    for (std::size_t a = 0; a < projection.size(); ++a) {
        for (std::size_t j = 0; j < n; j += stride) {
            axes[a].push_back(portrait.point(j)[projection[a]]);
        }
    }

    svg::Document doc(style.width, style.height);
    doc.rect(0, 0, style.width, style.height, "white");
    const Frame f = plot_frame(style);
    const std::string title = style.title.empty() ? portrait.source_label() : style.title;
    doc.text(style.width / 2, 24, title, 14, "middle");
    doc.text(style.width - 10, style.height - 10,
             fmt::format("N = {} points{}", n, stride > 1 ? fmt::format(" (every {}th drawn)", stride) : ""), 10,
             "end");

    if (projection.size() == 2) {
        const auto [xlo, xhi] = bounds(axes[0]);
        const auto [ylo, yhi] = bounds(axes[1]);
        doc.rect(f.x0, f.y0, f.w, f.h, "none", "black");
        axis_ticks(doc, f, xlo, xhi, true, false);
        axis_ticks(doc, f, ylo, yhi, false, false);
        doc.text(f.x0 + f.w / 2, f.y0 + f.h + 36, coordinate_label(projection[0], lag), 12, "middle");
        doc.text(18, f.y0 + f.h / 2, coordinate_label(projection[1], lag), 12, "middle", -90);
        doc.begin_group("fill=\"#1f4e9a\"");
        for (std::size_t j = 0; j < axes[0].size(); ++j) {
            const double x = f.x0 + (axes[0][j] - xlo) / (xhi - xlo) * f.w;
            const double y = f.y0 + f.h - (axes[1][j] - ylo) / (yhi - ylo) * f.h;
            doc.circle(x, y, style.point_radius, "#1f4e9a", 0.6);
        }
        doc.end_group();
        return doc.str();
    }

    // Fixed oblique view: azimuth 30°, elevation 20°, unit cube centred at 0.
    const double az = 30.0 * std::numbers::pi / 180.0;
    const double el = 20.0 * std::numbers::pi / 180.0;
    std::array<std::pair<double, double>, 3> b{bounds(axes[0]), bounds(axes[1]), bounds(axes[2])};
    auto project = [&](double x, double y, double z) {
        const double u = std::cos(az) * x - std::sin(az) * y;
        const double v = std::sin(el) * (std::sin(az) * x + std::cos(az) * y) + std::cos(el) * z;
        return std::pair{u, v};
    };
    const double scale = std::min(f.w, f.h) / 1.9;
    const double cx = f.x0 + f.w / 2;
    const double cy = f.y0 + f.h / 2;
    auto to_screen = [&](double x, double y, double z) {
        const auto [u, v] = project(x, y, z);
        return std::pair{cx + scale * u, cy - scale * v};
    };
    auto unit = [&](std::size_t a, double value) { return (value - b[a].first) / (b[a].second - b[a].first) - 0.5; };

    const auto [ox, oy] = to_screen(-0.5, -0.5, -0.5);
    const std::array<std::array<double, 3>, 3> tips{{{0.5, -0.5, -0.5}, {-0.5, 0.5, -0.5}, {-0.5, -0.5, 0.5}}};
    for (std::size_t a = 0; a < 3; ++a) {
        const auto [tx, ty] = to_screen(tips[a][0], tips[a][1], tips[a][2]);
        doc.line(ox, oy, tx, ty, "black");
        doc.text(tx + 4, ty - 4, coordinate_label(projection[a], lag), 12, "start");
    }
    doc.begin_group("fill=\"#1f4e9a\"");
    for (std::size_t j = 0; j < axes[0].size(); ++j) {
        const auto [x, y] = to_screen(unit(0, axes[0][j]), unit(1, axes[1][j]), unit(2, axes[2][j]));
        doc.circle(x, y, style.point_radius, "#1f4e9a", 0.6);
    }
    doc.end_group();
    return doc.str();
}

std::string render_curve(const CorrelationCurve& curve, const PlotStyle& style)
{
    std::vector<double> lx;
    std::vector<double> ly;
    std::vector<std::size_t> index;
    for (std::size_t k = 0; k < curve.radii.size(); ++k) {
        if (curve.c_values[k] > 0.0) {
            lx.push_back(std::log10(curve.radii[k]));
            ly.push_back(std::log10(curve.c_values[k]));
            index.push_back(k);
        }
    }
    svg::Document doc(style.width, style.height);
    doc.rect(0, 0, style.width, style.height, "white");
    const Frame f = plot_frame(style);
    const std::string title =
        style.title.empty() ? fmt::format("Correlation integral, m = {}", curve.embedding_dimension) : style.title;
    doc.text(style.width / 2, 24, title, 14, "middle");
    doc.rect(f.x0, f.y0, f.w, f.h, "none", "black");
    doc.text(f.x0 + f.w / 2, f.y0 + f.h + 36, "log10 r", 12, "middle");
    doc.text(18, f.y0 + f.h / 2, "log10 C(r)", 12, "middle", -90);

    if (lx.empty()) {
        doc.text(f.x0 + f.w / 2, f.y0 + f.h / 2, "no pairs within any radius", 14, "middle");
        return doc.str();
    }
    const auto [xlo, xhi] = bounds(lx);
    const auto [ylo, yhi] = bounds(ly);
    axis_ticks(doc, f, xlo, xhi, true, true);
    axis_ticks(doc, f, ylo, yhi, false, true);
    auto sx = [&](double v) { return f.x0 + (v - xlo) / (xhi - xlo) * f.w; };
    auto sy = [&](double v) { return f.y0 + f.h - (v - ylo) / (yhi - ylo) * f.h; };

    std::string points;
    for (std::size_t t = 0; t < lx.size(); ++t) {
        points += fmt::format("{}{:.2f},{:.2f}", t ? " " : "", sx(lx[t]), sy(ly[t]));
    }
    doc.polyline(points, "#888888");
    for (std::size_t t = 0; t < lx.size(); ++t) {
        const bool in_region = curve.fit && index[t] >= curve.fit->scaling_region.begin &&
                               index[t] < curve.fit->scaling_region.end;
        doc.circle(sx(lx[t]), sy(ly[t]), in_region ? 4.0 : 3.0, in_region ? "#c0392b" : "#1f4e9a");
    }

    if (curve.fit) {
        const auto& fit = *curve.fit;
        const std::size_t b = fit.scaling_region.begin;
        const std::size_t e = fit.scaling_region.end - 1;
        // Fitted line through the region's centroid.
        double mx = 0.0;
        double my = 0.0;
        for (std::size_t k = b; k <= e; ++k) {
            mx += std::log10(curve.radii[k]);
            my += std::log10(curve.c_values[k]);
        }
        mx /= static_cast<double>(e - b + 1);
        my /= static_cast<double>(e - b + 1);
        const double x1 = std::log10(curve.radii[b]);
        const double x2 = std::log10(curve.radii[e]);
        doc.line(sx(x1), sy(my + fit.slope * (x1 - mx)), sx(x2), sy(my + fit.slope * (x2 - mx)), "#c0392b", 2.0);
        doc.text(f.x0 + 10, f.y0 + 20,
                 fmt::format("slope = {:.3f} ± {:.3f} (R² = {:.4f}, radii {}..{})", fit.slope, fit.slope_stderr,
                             fit.r_squared, b, e),
                 12, "start");
    } else {
        doc.text(f.x0 + 10, f.y0 + 20, "no scaling region", 12, "start");
    }
    return doc.str();
}

std::string render_series(const EventSeries& series, std::size_t max_points, const PlotStyle& style)
{
    const std::size_t n = std::min(series.size(), std::max<std::size_t>(max_points, 1));
    std::vector<double> v(series.values().begin(), series.values().begin() + static_cast<std::ptrdiff_t>(n));
    svg::Document doc(style.width, style.height * 0.6);
    PlotStyle frame_style = style;
    frame_style.height = style.height * 0.6;
    const Frame f = plot_frame(frame_style);
    doc.rect(0, 0, style.width, frame_style.height, "white");
    doc.text(style.width / 2, 24, style.title.empty() ? series.label() : style.title, 14, "middle");
    doc.rect(f.x0, f.y0, f.w, f.h, "none", "black");
    const auto [ylo, yhi] = bounds(v);
    axis_ticks(doc, f, 0.0, static_cast<double>(n > 1 ? n - 1 : 1), true, false);
    axis_ticks(doc, f, ylo, yhi, false, false);
    doc.text(f.x0 + f.w / 2, f.y0 + f.h + 36, "i", 12, "middle");
    doc.text(18, f.y0 + f.h / 2, "q(i)", 12, "middle", -90);
    std::string points;
    const double span = n > 1 ? static_cast<double>(n - 1) : 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        points += fmt::format("{}{:.2f},{:.2f}", i ? " " : "", f.x0 + static_cast<double>(i) / span * f.w,
                              f.y0 + f.h - (v[i] - ylo) / (yhi - ylo) * f.h);
    }
    doc.polyline(points, "#1f4e9a", 0.8);
    doc.text(style.width - 10, frame_style.height - 10, fmt::format("first {} of {} samples", n, series.size()), 10,
             "end");
    return doc.str();
}

} // namespace takens
