#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "takens/series.hpp"

namespace takens {

inline constexpr std::size_t kMaxEmbeddingDimension = 10;

struct EmbeddingConfig
{
    std::size_t dimension = 3;
    std::size_t lag = 1;

    /// Samples spanned by one delay vector minus one: (m-1)·τ.
    [[nodiscard]] std::size_t span() const noexcept { return (dimension - 1) * lag; }
    [[nodiscard]] bool operator==(const EmbeddingConfig&) const = default;
};

/// Delay-coordinate reconstruction of a scalar series: point j is
/// (q_j, q_{j+τ}, ..., q_{j+(m-1)τ}). Points are stored row-major.
class PhasePortrait
{
public:
    PhasePortrait(std::vector<double> coords, EmbeddingConfig config, std::string source_label);

    [[nodiscard]] std::size_t size() const noexcept { return coords_.size() / config_.dimension; }
    [[nodiscard]] std::size_t dimension() const noexcept { return config_.dimension; }
    [[nodiscard]] const EmbeddingConfig& config() const noexcept { return config_; }
    [[nodiscard]] const std::string& source_label() const noexcept { return source_label_; }

    [[nodiscard]] std::span<const double> point(std::size_t j) const
    {
        return {coords_.data() + j * config_.dimension, config_.dimension};
    }
    [[nodiscard]] std::span<const double> data() const noexcept { return coords_; }

private:
    std::vector<double> coords_;
    EmbeddingConfig config_;
    std::string source_label_;
};

/// Throws InvalidArgument for m or τ out of range and InsufficientData when
/// the series is not longer than (m-1)·τ.
[[nodiscard]] PhasePortrait delay_embed(const EventSeries& series, const EmbeddingConfig& config);

/// Builds a portrait directly from row-major coordinates (e.g. Hénon (x, y)).
[[nodiscard]] PhasePortrait portrait_from_points(std::vector<double> coords, std::size_t dimension,
                                                 std::string source_label);

/// Local maxima refined by 3-point quadratic interpolation. Plateau maxima
/// report the plateau value unrefined.
[[nodiscard]] EventSeries successive_maxima(const EventSeries& series);

/// First lag at which the sample autocorrelation drops below 1/e, clamped to
/// [1, N/10].
[[nodiscard]] std::size_t suggest_lag(const EventSeries& series);

} // namespace takens
