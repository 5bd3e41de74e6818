#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "takens/embedding.hpp"
#include "takens/series.hpp"

namespace takens {

/// Contiguous index interval [begin, end) into CorrelationCurve::radii.
struct IndexRange
{
    std::size_t begin = 0;
    std::size_t end = 0;
    [[nodiscard]] std::size_t size() const noexcept { return end - begin; }
    [[nodiscard]] bool operator==(const IndexRange&) const = default;
};

struct DimensionFit
{
    IndexRange scaling_region;
    double slope = 0.0;
    double slope_stderr = 0.0;
    double r_squared = 0.0;
};

struct CorrelationCurve
{
    std::size_t embedding_dimension = 0;
    std::vector<double> radii;
    std::vector<double> c_values;
    std::uint64_t pairs_used = 0;
    bool exact = false;
    std::size_t theiler = 0;
    std::optional<DimensionFit> fit;
};

struct CorrelationOptions
{
    /// Defaults to τ·m of the portrait.
    std::optional<std::size_t> theiler;
    std::uint64_t pair_budget = 10'000'000;
    std::uint64_t seed = 0;
    std::size_t min_points = 1000;
    int workers = 1;
};

/// `count` log-spaced radii from lo·diameter to diameter.
[[nodiscard]] std::vector<double> log_radii(double lo = 1e-3, double diameter = 1.0, std::size_t count = 24);

/// Max-norm diameter bound: the largest per-coordinate extent.
[[nodiscard]] double portrait_extent(const PhasePortrait& portrait);

/// C(r) over pairs with |i-j| > theiler and max-norm distance < r, exact when
/// the admissible pair count fits the budget and sampled otherwise.
[[nodiscard]] CorrelationCurve correlation_integral(const PhasePortrait& portrait, std::span<const double> radii,
                                                    const CorrelationOptions& options = {});

struct FitOptions
{
    double min_c = 1e-4;
    double max_c = 0.5;
    std::size_t min_candidates = 8;
    std::size_t min_window = 4;
    double min_r_squared = 0.98;
    /// Windows whose R² is within this of the best count as ties; the
    /// longest of them wins.
    double r_squared_tie = 1e-3;
};

/// Least-squares fit of log C against log r over the best contiguous window
/// of candidate radii (C within (min_c, max_c)). Throws NoScalingRegion.
[[nodiscard]] CorrelationCurve fit_dimension(CorrelationCurve curve, const FitOptions& options = {});

/// Fit over a caller-chosen region. Throws NoScalingRegion when the region has
/// fewer than two usable points.
[[nodiscard]] CorrelationCurve fit_dimension_in(CorrelationCurve curve, IndexRange region);

struct ForecastOptions
{
    std::size_t k = 4;
    double test_fraction = 0.25;
    /// Defaults to τ·m.
    std::optional<std::size_t> theiler;
    int workers = 1;
};

struct ForecastResult
{
    std::size_t horizon = 1;
    double normalized_error = 0.0;
    std::size_t k = 0;
    std::size_t test_points = 0;
};

/// One-step k-NN forecast over the last test_fraction of the portrait, each
/// test point predicted from earlier points only. Error is normalized by the
/// RMS error of predicting the library mean.
[[nodiscard]] ForecastResult knn_forecast_error(const EventSeries& series, const EmbeddingConfig& config,
                                                const ForecastOptions& options = {});

struct SurrogateResult
{
    std::string statistic_name;
    double observed = 0.0;
    std::vector<double> surrogate_values;
    double p_value = 1.0;
};

/// Shuffle surrogates; p = (1 + #{surrogate <= observed}) / (S + 1).
[[nodiscard]] SurrogateResult shuffle_surrogate_test(const EventSeries& series, const EmbeddingConfig& config,
                                                     std::size_t n_surrogates, std::uint64_t seed,
                                                     const ForecastOptions& options = {});

/// The permuted copy used as surrogate `index` by shuffle_surrogate_test.
[[nodiscard]] EventSeries shuffle_surrogate(const EventSeries& series, std::uint64_t seed, std::size_t index);

enum class Classification { DeterministicStructure, RandomConsistent, Inconclusive };

[[nodiscard]] const char* to_string(Classification c) noexcept;

struct ProbeSlope
{
    std::size_t dimension = 0;
    std::optional<double> slope;
};

struct Verdict
{
    Classification classification = Classification::Inconclusive;
    std::optional<double> dimension_estimate;
    double forecast_p = 1.0;
    bool dimension_saturation = false;
    std::string evidence_summary;
};

struct ClassifyOptions
{
    double alpha = 0.01;
    double saturation_fraction = 0.8;
};

/// Saturation holds when every probe has a slope >= saturation_fraction·m
/// (and there is at least one probe).
[[nodiscard]] bool dimension_saturates(std::span<const ProbeSlope> probes, double saturation_fraction = 0.8);

[[nodiscard]] Verdict classify(const std::optional<CorrelationCurve>& dimension, const SurrogateResult& forecast,
                               std::span<const ProbeSlope> saturation_probe, const ClassifyOptions& options = {});

} // namespace takens
