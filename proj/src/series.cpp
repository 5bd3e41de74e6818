#include "takens/series.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include <fmt/format.h>

#include "takens/errors.hpp"

namespace takens {

EventSeries::EventSeries(std::vector<double> values, SeriesMetadata meta)
    : values_(std::move(values)), meta_(std::move(meta))
{
    if (values_.empty()) {
        throw EmptyInput("event series must contain at least one value");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) {
            throw InvalidArgument(fmt::format("non-finite value at index {}", i));
        }
    }
    if (!meta_.timestamps.empty() && meta_.timestamps.size() != values_.size()) {
        throw InvalidArgument("timestamps must align with values");
    }
}

double EventSeries::min() const { return *std::min_element(values_.begin(), values_.end()); }

double EventSeries::max() const { return *std::max_element(values_.begin(), values_.end()); }

EventSeries normalize(const EventSeries& series)
{
    const double lo = series.min();
    const double span = series.max() - lo;
    std::vector<double> out(series.size(), 0.0);
    if (span > 0.0) {
        for (std::size_t i = 0; i < out.size(); ++i) {
            const double v = (series[i] - lo) / span;
            out[i] = std::nearbyint(v / kNormalizationQuantum) * kNormalizationQuantum;
        }
    }
    return EventSeries(std::move(out), series.metadata());
}

std::string content_digest(std::span<const double> values)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (double v : values) {
        auto bits = std::bit_cast<std::uint64_t>(v);
        for (int b = 0; b < 8; ++b) {
            h ^= bits & 0xffU;
            h *= 0x100000001b3ULL;
            bits >>= 8;
        }
    }
    return fmt::format("fnv1a64:{:016x}", h);
}

} // namespace takens
