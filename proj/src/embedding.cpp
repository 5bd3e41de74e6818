#include "takens/embedding.hpp"

#include <cmath>

#include <fmt/format.h>

#include "takens/errors.hpp"

namespace takens {

PhasePortrait::PhasePortrait(std::vector<double> coords, EmbeddingConfig config, std::string source_label)
    : coords_(std::move(coords)), config_(config), source_label_(std::move(source_label))
{
    if (config_.dimension == 0 || coords_.size() % config_.dimension != 0) {
        throw InvalidArgument("portrait coordinates do not divide into points");
    }
}

PhasePortrait delay_embed(const EventSeries& series, const EmbeddingConfig& config)
{
    if (config.dimension < 1 || config.dimension > kMaxEmbeddingDimension) {
        throw InvalidArgument(
            fmt::format("embedding dimension must lie in [1, {}], got {}", kMaxEmbeddingDimension, config.dimension));
    }
    if (config.lag < 1) {
        throw InvalidArgument("embedding lag must be at least 1");
    }
    const std::size_t n = series.size();
    if (n <= config.span()) {
        throw InsufficientData(fmt::format("series of length {} is too short for m={}, tau={} (needs more than {})",
                                           n, config.dimension, config.lag, config.span()));
    }
    const std::size_t points = n - config.span();
    const std::size_t m = config.dimension;
    std::vector<double> coords(points * m);
    const auto q = series.values();
    for (std::size_t j = 0; j < points; ++j) {
        for (std::size_t c = 0; c < m; ++c) {
            coords[j * m + c] = q[j + c * config.lag];
        }
    }
    return PhasePortrait(std::move(coords), config, series.label());
}

PhasePortrait portrait_from_points(std::vector<double> coords, std::size_t dimension, std::string source_label)
{
    return PhasePortrait(std::move(coords), EmbeddingConfig{dimension, 1}, std::move(source_label));
}

EventSeries successive_maxima(const EventSeries& series)
{
    const auto q = series.values();
    const std::size_t n = q.size();
    if (n < 3) {
        throw InsufficientData("successive maxima need at least 3 samples");
    }
    std::vector<double> peaks;
    std::size_t i = 1;
    while (i + 1 < n) {
        if (!(q[i - 1] < q[i])) {
            ++i;
            continue;
        }
        std::size_t end = i;
        while (end + 1 < n && q[end + 1] == q[i]) {
            ++end;
        }
        if (end + 1 >= n) {
            break;
        }
        if (q[end + 1] < q[i]) {
            if (end == i) {
                const double a = q[i - 1];
                const double b = q[i];
                const double c = q[i + 1];
                const double curvature = a - 2.0 * b + c;
                const double offset = 0.5 * (a - c) / curvature;
                peaks.push_back(b - 0.25 * (a - c) * offset);
            } else {
                peaks.push_back(q[i]);
            }
        }
        i = end + 1;
    }
    if (peaks.empty()) {
        throw NoMaxima("series has no interior local maximum");
    }
    SeriesMetadata meta;
    meta.source_label = fmt::format("maxima({})", series.label());
    meta.seed = series.metadata().seed;
    return EventSeries(std::move(peaks), std::move(meta));
}

std::size_t suggest_lag(const EventSeries& series)
{
    const auto q = series.values();
    const std::size_t n = q.size();
    if (n < 100) {
        throw InsufficientData(fmt::format("lag suggestion needs at least 100 samples, got {}", n));
    }
    const std::size_t max_lag = n / 10;
    double mean = 0.0;
    for (double v : q) {
        mean += v;
    }
    mean /= static_cast<double>(n);
    double variance = 0.0;
    for (double v : q) {
        variance += (v - mean) * (v - mean);
    }
    if (!(variance > 0.0)) {
        return 1;
    }
    const double threshold = std::exp(-1.0);
    for (std::size_t lag = 1; lag <= max_lag; ++lag) {
        double acc = 0.0;
        for (std::size_t i = 0; i + lag < n; ++i) {
            acc += (q[i] - mean) * (q[i + lag] - mean);
        }
        if (acc / variance < threshold) {
            return lag;
        }
    }
    return max_lag;
}

} // namespace takens
