#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace takens {

struct SeriesMetadata
{
    std::string source_label;
    std::optional<std::uint64_t> seed;
    /// Timestamps from two-column input, aligned with the values. Empty otherwise.
    std::vector<double> timestamps;
};

/// Ordered scalar observations q_i. Always nonempty and finite.
class EventSeries
{
public:
    /// Throws EmptyInput when `values` is empty and InvalidArgument on a
    /// non-finite entry.
    explicit EventSeries(std::vector<double> values, SeriesMetadata meta = {});

    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] double operator[](std::size_t i) const { return values_[i]; }
    [[nodiscard]] const SeriesMetadata& metadata() const noexcept { return meta_; }
    [[nodiscard]] const std::string& label() const noexcept { return meta_.source_label; }

    [[nodiscard]] double min() const;
    [[nodiscard]] double max() const;
    [[nodiscard]] double range() const { return max() - min(); }

private:
    std::vector<double> values_;
    SeriesMetadata meta_;
};

/// Resolution of the grid normalized values are snapped to (2^-24).
inline constexpr double kNormalizationQuantum = 0x1.0p-24;

/// Affine min-max rescaling onto [0, 1], snapped to kNormalizationQuantum.
/// The snap makes s and a*s+b (a > 0) normalize to identical bits.
/// A constant series maps to all zeros.
[[nodiscard]] EventSeries normalize(const EventSeries& series);

/// FNV-1a 64 over the IEEE-754 bit patterns of the values, hex encoded.
[[nodiscard]] std::string content_digest(std::span<const double> values);

} // namespace takens
