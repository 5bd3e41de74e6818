#pragma once

#include <cstdint>
#include <array>
#include <vector>

#include "takens/series.hpp"

namespace takens {

struct MapParams
{
    double logistic_k = 4.0;
    double henon_a = 1.4;
    double henon_b = 0.3;
    /// |x| beyond this aborts iteration with DivergenceError.
    double divergence_bound = 1e6;
};

struct LorenzParams
{
    double sigma = 10.0;
    double rho = 28.0;
    double beta = 8.0 / 3.0;
    double dt = 0.01;
    std::size_t transient_steps = 1000;
};

/// Screen intensity I(q) ∝ cos²(fringe_frequency·q)·exp(-q²/envelope_width²)
/// on [-1, 1]. envelope_width <= 0 means a flat envelope.
struct SlitScreenModel
{
    double fringe_frequency = 3.0;
    double envelope_width = 0.8;

    [[nodiscard]] double intensity(double q) const;
};

/// Piecewise-linear CDF of a SlitScreenModel tabulated on a uniform grid over
/// [-1, 1]; inverse() is exact for that tabulation.
class ScreenCdf
{
public:
    static constexpr std::size_t kDefaultGrid = 4096;

    explicit ScreenCdf(const SlitScreenModel& model, std::size_t grid = kDefaultGrid);

    [[nodiscard]] double cdf(double q) const;
    /// Quantile for u in [0, 1].
    [[nodiscard]] double inverse(double u) const;
    [[nodiscard]] std::size_t grid_size() const noexcept { return cdf_.size(); }

private:
    std::vector<double> cdf_;
    double step_;
};

struct HenonSeries
{
    EventSeries x;
    EventSeries y;
};

struct LorenzSeries
{
    EventSeries x;
    EventSeries y;
    EventSeries z;
};

enum class MaskMapping { Value, Rank };

[[nodiscard]] EventSeries logistic_series(double x0, double k, std::size_t n);

[[nodiscard]] HenonSeries henon_series(double x0, double y0, const MapParams& params, std::size_t n);

[[nodiscard]] LorenzSeries lorenz_series(const std::array<double, 3>& initial, const LorenzParams& params,
                                         std::size_t n);

/// i.i.d. uniform samples on [0, 1).
[[nodiscard]] EventSeries iid_uniform(std::size_t n, std::uint64_t seed);

/// i.i.d. Born-rule hits on the screen via inverse-CDF lookup.
[[nodiscard]] EventSeries born_hits(const SlitScreenModel& model, std::size_t n, std::uint64_t seed);

/// Pushes a deterministic series in [0, 1] through the screen's inverse CDF.
/// Value mapping treats base_i as the quantile; rank mapping uses
/// (rank_i + 1/2)/n with ties broken by index.
[[nodiscard]] EventSeries chaos_masked_hits(const EventSeries& base, const SlitScreenModel& model,
                                            MaskMapping mapping = MaskMapping::Value);

/// Detector imperfection: Bernoulli dropout followed by additive Gaussian
/// noise of standard deviation noise_sigma (series units).
[[nodiscard]] EventSeries corrupt(const EventSeries& series, double dropout_rate, double noise_sigma,
                                  std::uint64_t seed);

} // namespace takens
