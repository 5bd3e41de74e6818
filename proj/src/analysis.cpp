#include "takens/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "takens/errors.hpp"
#include "takens/kernels.hpp"
#include "takens/rng.hpp"

namespace takens {

std::vector<double> log_radii(double lo, double diameter, std::size_t count)
{
    if (!(lo > 0.0 && lo < 1.0) || !(diameter > 0.0) || count < 2) {
        throw InvalidArgument("radius grid needs 0 < lo < 1, diameter > 0 and at least two radii");
    }
    std::vector<double> radii(count);
    const double log_lo = std::log(lo);
    for (std::size_t k = 0; k < count; ++k) {
        const double t = static_cast<double>(k) / static_cast<double>(count - 1);
        radii[k] = diameter * std::exp(log_lo * (1.0 - t));
    }
    radii.back() = diameter;
    return radii;
}

double portrait_extent(const PhasePortrait& portrait)
{
    double extent = 0.0;
    for (std::size_t c = 0; c < portrait.dimension(); ++c) {
        double lo = portrait.point(0)[c];
        double hi = lo;
        for (std::size_t j = 1; j < portrait.size(); ++j) {
            lo = std::min(lo, portrait.point(j)[c]);
            hi = std::max(hi, portrait.point(j)[c]);
        }
        extent = std::max(extent, hi - lo);
    }
    return extent;
}

CorrelationCurve correlation_integral(const PhasePortrait& portrait, std::span<const double> radii,
                                      const CorrelationOptions& options)
{
    if (portrait.size() < options.min_points) {
        throw InsufficientData(fmt::format("correlation integral needs at least {} points, portrait has {}",
                                           options.min_points, portrait.size()));
    }
    const std::size_t theiler = options.theiler.value_or(portrait.config().lag * portrait.dimension());
    const std::uint64_t admissible = kernels::admissible_pairs(portrait.size(), theiler);
    if (admissible == 0) {
        throw InsufficientData("no point pairs outside the Theiler window");
    }

    CorrelationCurve curve;
    curve.embedding_dimension = portrait.dimension();
    curve.radii.assign(radii.begin(), radii.end());
    curve.theiler = theiler;
    curve.exact = admissible <= options.pair_budget;
    const auto counts =
        curve.exact ? kernels::count_pairs_exact(portrait, radii, theiler, options.workers)
                    : kernels::count_pairs_sampled(portrait, radii, theiler, options.pair_budget, options.seed,
                                                   options.workers);
    curve.pairs_used = counts.total;
    curve.c_values.resize(radii.size());
    for (std::size_t k = 0; k < radii.size(); ++k) {
        curve.c_values[k] = static_cast<double>(counts.below[k]) / static_cast<double>(counts.total);
    }
    return curve;
}

namespace {

struct LineFit
{
    double slope = 0.0;
    double stderr_ = 0.0;
    double r_squared = 0.0;
};

std::optional<LineFit> fit_line(const CorrelationCurve& curve, IndexRange region)
{
    const std::size_t n = region.size();
    if (n < 2) {
        return std::nullopt;
    }
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t k = region.begin; k < region.end; ++k) {
        if (!(curve.c_values[k] > 0.0)) {
            return std::nullopt;
        }
        mx += std::log(curve.radii[k]);
        my += std::log(curve.c_values[k]);
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t k = region.begin; k < region.end; ++k) {
        const double dx = std::log(curve.radii[k]) - mx;
        const double dy = std::log(curve.c_values[k]) - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (!(sxx > 0.0)) {
        return std::nullopt;
    }
    LineFit fit;
    fit.slope = sxy / sxx;
    const double sse = std::max(0.0, syy - fit.slope * sxy);
    fit.r_squared = syy > 0.0 ? 1.0 - sse / syy : 1.0;
    fit.stderr_ = n > 2 ? std::sqrt(sse / static_cast<double>(n - 2) / sxx) : 0.0;
    return fit;
}

DimensionFit to_dimension_fit(const LineFit& fit, IndexRange region)
{
    return {region, fit.slope, fit.stderr_, fit.r_squared};
}

} // namespace

CorrelationCurve fit_dimension(CorrelationCurve curve, const FitOptions& options)
{
    // C is nondecreasing, so the candidates form one contiguous run.
    IndexRange candidates{curve.c_values.size(), curve.c_values.size()};
    for (std::size_t k = 0; k < curve.c_values.size(); ++k) {
        if (curve.c_values[k] > options.min_c && curve.c_values[k] < options.max_c) {
            candidates.begin = std::min(candidates.begin, k);
            candidates.end = k + 1;
        }
    }
    if (candidates.begin >= candidates.end || candidates.size() < options.min_candidates) {
        throw NoScalingRegion(fmt::format("only {} radii have C(r) in ({}, {}); need {}",
                                          candidates.begin < candidates.end ? candidates.size() : 0,
                                          options.min_c, options.max_c, options.min_candidates));
    }

    struct Window
    {
        IndexRange range;
        LineFit fit;
    };
    std::vector<Window> windows;
    for (std::size_t b = candidates.begin; b < candidates.end; ++b) {
        for (std::size_t e = b + options.min_window; e <= candidates.end; ++e) {
            if (auto fit = fit_line(curve, {b, e})) {
                windows.push_back({{b, e}, *fit});
            }
        }
    }
    double best = -1.0;
    for (const auto& w : windows) {
        best = std::max(best, w.fit.r_squared);
    }
    if (windows.empty() || best < options.min_r_squared) {
        throw NoScalingRegion(fmt::format("best scaling window reaches R^2 = {:.4f} < {}", best,
                                          options.min_r_squared));
    }
    const Window* chosen = nullptr;
    for (const auto& w : windows) {
        if (w.fit.r_squared < best - options.r_squared_tie || w.fit.r_squared < options.min_r_squared) {
            continue;
        }
        if (chosen == nullptr || w.range.size() > chosen->range.size() ||
            (w.range.size() == chosen->range.size() && w.fit.r_squared > chosen->fit.r_squared)) {
            chosen = &w;
        }
    }
    curve.fit = to_dimension_fit(chosen->fit, chosen->range);
    return curve;
}

CorrelationCurve fit_dimension_in(CorrelationCurve curve, IndexRange region)
{
    if (region.end > curve.radii.size() || region.begin >= region.end) {
        throw NoScalingRegion(fmt::format("scaling region [{}, {}) is outside the {} radii", region.begin,
                                          region.end, curve.radii.size()));
    }
    const auto fit = fit_line(curve, region);
    if (!fit) {
        throw NoScalingRegion("scaling region has fewer than two radii with C(r) > 0");
    }
    curve.fit = to_dimension_fit(*fit, region);
    return curve;
}

ForecastResult knn_forecast_error(const EventSeries& series, const EmbeddingConfig& config,
                                  const ForecastOptions& options)
{
    if (options.k < 1) {
        throw InvalidArgument("forecast needs k >= 1");
    }
    if (!(options.test_fraction > 0.0 && options.test_fraction <= 0.5)) {
        throw InvalidArgument(fmt::format("test fraction must lie in (0, 0.5], got {}", options.test_fraction));
    }
    const PhasePortrait portrait = delay_embed(series, config);
    if (portrait.size() < 500) {
        throw InsufficientData(fmt::format("forecast needs at least 500 embedded points, got {}", portrait.size()));
    }
    const std::size_t theiler = options.theiler.value_or(config.lag * config.dimension);
    const std::size_t ahead = config.span() + 1; // successor of point j is q[j + ahead]
    const std::size_t forecastable = portrait.size() - 1;
    const auto tests =
        std::max<std::size_t>(1, static_cast<std::size_t>(options.test_fraction * static_cast<double>(forecastable)));
    const std::size_t first_test = forecastable - tests;

    const auto q = series.values();
    const auto rows = kernels::knn_earlier(portrait, first_test, forecastable, options.k, theiler, options.workers);

    double library_mean = 0.0;
    for (std::size_t i = 0; i < first_test; ++i) {
        library_mean += q[i + ahead];
    }
    library_mean /= static_cast<double>(first_test);

    double sse = 0.0;
    double sse_mean = 0.0;
    for (std::size_t t = 0; t < rows.size(); ++t) {
        const auto& row = rows[t];
        if (row.empty()) {
            throw InsufficientData("a test point has no admissible neighbors");
        }
        double prediction = 0.0;
        for (const auto& nb : row) {
            prediction += q[nb.index + ahead];
        }
        prediction /= static_cast<double>(row.size());
        const double truth = q[first_test + t + ahead];
        sse += (prediction - truth) * (prediction - truth);
        sse_mean += (library_mean - truth) * (library_mean - truth);
    }

    ForecastResult result;
    result.k = options.k;
    result.test_points = rows.size();
    if (sse_mean > 0.0) {
        result.normalized_error = std::sqrt(sse / sse_mean);
    } else if (sse > 0.0) {
        throw InsufficientData("mean predictor is exact on the test set; normalized error undefined");
    }
    return result;
}

EventSeries shuffle_surrogate(const EventSeries& series, std::uint64_t seed, std::size_t index)
{
    std::vector<double> values(series.values().begin(), series.values().end());
    Rng rng = Rng::stream(seed, index);
    rng.shuffle(std::span<double>(values));
    SeriesMetadata meta;
    meta.source_label = fmt::format("shuffle#{}({})", index, series.label());
    meta.seed = seed;
    return EventSeries(std::move(values), std::move(meta));
}

SurrogateResult shuffle_surrogate_test(const EventSeries& series, const EmbeddingConfig& config,
                                       std::size_t n_surrogates, std::uint64_t seed, const ForecastOptions& options)
{
    if (n_surrogates < 19) {
        throw InvalidArgument(fmt::format("surrogate test needs at least 19 surrogates, got {}", n_surrogates));
    }
    SurrogateResult result;
    result.statistic_name = "knn_normalized_error";
    result.observed = knn_forecast_error(series, config, options).normalized_error;
    result.surrogate_values.reserve(n_surrogates);
    std::size_t as_extreme = 0;
    for (std::size_t s = 0; s < n_surrogates; ++s) {
        const double value = knn_forecast_error(shuffle_surrogate(series, seed, s), config, options).normalized_error;
        result.surrogate_values.push_back(value);
        if (value <= result.observed) {
            ++as_extreme;
        }
    }
    result.p_value = static_cast<double>(1 + as_extreme) / static_cast<double>(n_surrogates + 1);
    return result;
}

const char* to_string(Classification c) noexcept
{
    switch (c) {
    case Classification::DeterministicStructure:
        return "DeterministicStructure";
    case Classification::RandomConsistent:
        return "RandomConsistent";
    case Classification::Inconclusive:
        return "Inconclusive";
    }
    return "Inconclusive";
}

bool dimension_saturates(std::span<const ProbeSlope> probes, double saturation_fraction)
{
    if (probes.empty()) {
        return false;
    }
    return std::all_of(probes.begin(), probes.end(), [&](const ProbeSlope& p) {
        return p.slope && *p.slope >= saturation_fraction * static_cast<double>(p.dimension);
    });
}

Verdict classify(const std::optional<CorrelationCurve>& dimension, const SurrogateResult& forecast,
                 std::span<const ProbeSlope> saturation_probe, const ClassifyOptions& options)
{
    Verdict v;
    v.forecast_p = forecast.p_value;
    if (dimension && dimension->fit) {
        v.dimension_estimate = dimension->fit->slope;
    }
    v.dimension_saturation = dimension_saturates(saturation_probe, options.saturation_fraction);

    std::string probes;
    for (const auto& p : saturation_probe) {
        probes += fmt::format("{}m={}:{}", probes.empty() ? "" : ", ", p.dimension,
                              p.slope ? fmt::format("{:.3f}", *p.slope) : std::string("none"));
    }
    if (probes.empty()) {
        probes = "none";
    }
    const std::string dim = v.dimension_estimate ? fmt::format("{:.3f}", *v.dimension_estimate) : "none";

    if (v.forecast_p <= options.alpha) {
        v.classification = Classification::DeterministicStructure;
        v.evidence_summary = fmt::format(
            "forecast p={:.4g} <= alpha={:.4g}: phase-space neighbors predict the next event better than every "
            "shuffle allows; dimension estimate {}",
            v.forecast_p, options.alpha, dim);
    } else if (v.dimension_saturation) {
        v.classification = Classification::RandomConsistent;
        v.evidence_summary = fmt::format(
            "forecast p={:.4g} > alpha={:.4g} and correlation slopes fill the embedding space (slope >= {:.2g}*m; "
            "{})",
            v.forecast_p, options.alpha, options.saturation_fraction, probes);
    } else {
        v.classification = Classification::Inconclusive;
        v.evidence_summary = fmt::format(
            "forecast p={:.4g} > alpha={:.4g} but correlation slopes do not saturate ({})", v.forecast_p,
            options.alpha, probes);
    }
    return v;
}

} // namespace takens
