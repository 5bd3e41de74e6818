#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "takens/analysis.hpp"
#include "takens/embedding.hpp"

namespace takens {

/// Everything needed to rerun an analysis bit-identically from the same input.
struct AnalysisConfig
{
    EmbeddingConfig embedding;
    bool auto_lag = false;
    /// τ·m when absent; run_analysis fills in the resolved value.
    std::optional<std::size_t> theiler;
    std::size_t k = 4;
    double test_fraction = 0.25;
    std::size_t n_surrogates = 99;
    std::uint64_t seed = 1;
    double alpha = 0.01;
    double saturation_fraction = 0.8;
    std::uint64_t pair_budget = 10'000'000;
    double radius_lo = 1e-3;
    std::size_t radius_count = 24;
    std::size_t probe_min = 2;
    std::size_t probe_max = 4;
    std::optional<IndexRange> scaling_region;
};

struct AnalysisReport
{
    std::string input_digest;
    std::size_t input_length = 0;
    AnalysisConfig config;
    Verdict verdict;
    std::vector<CorrelationCurve> curves;
    ForecastResult forecast;
    SurrogateResult surrogate;
    /// Wall-clock seconds per stage. Not part of the canonical document.
    std::map<std::string, double> timings;
};

inline constexpr const char* kReportSchema = "takens.report/1";

/// Sentence mapping a classification onto the locality/reality dichotomy.
[[nodiscard]] const char* interpretation(Classification c) noexcept;

[[nodiscard]] nlohmann::json to_json(const AnalysisReport& report);

/// Canonical document: keys sorted, floats at 12 significant digits,
/// two-space indentation, trailing newline.
[[nodiscard]] std::string emit_report(const AnalysisReport& report);

[[nodiscard]] std::string emit_timings(const AnalysisReport& report);

struct PlotStyle
{
    double width = 640.0;
    double height = 640.0;
    double point_radius = 1.2;
    /// Portraits with more points are thinned by a fixed stride.
    std::size_t max_points = 20000;
    std::string title;
};

/// Scatter of two coordinates, or a fixed oblique view (azimuth 30°,
/// elevation 20°) of three. Throws BadProjection.
[[nodiscard]] std::string render_portrait(const PhasePortrait& portrait, const std::vector<std::size_t>& projection,
                                          const PlotStyle& style = {});

/// log-log C(r) with the scaling region highlighted and the slope annotated.
[[nodiscard]] std::string render_curve(const CorrelationCurve& curve, const PlotStyle& style = {});

/// q_i against i for the first `max_points` samples.
[[nodiscard]] std::string render_series(const EventSeries& series, std::size_t max_points = 500,
                                        const PlotStyle& style = {});

} // namespace takens
