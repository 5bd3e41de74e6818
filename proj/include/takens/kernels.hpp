#pragma once

// Pairwise kernels behind the correlation integral and k-NN forecasting.
//
// Every kernel takes a worker count and returns bit-identical results for
// any count: pair counts are integer histograms merged after the parallel
// region, and k-NN results are written per query index with (distance,
// index) tie-breaking. The `reference` namespace holds plain serial
// brute-force versions kept as test oracles and benchmark baselines.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "takens/embedding.hpp"

namespace takens::kernels {

/// below[k] = number of counted pairs with max-norm distance < radii[k].
struct PairCounts
{
    std::vector<std::uint64_t> below;
    std::uint64_t total = 0;
};

/// Number of unordered pairs (i, j) with j - i > theiler among n points.
[[nodiscard]] std::uint64_t admissible_pairs(std::size_t n, std::size_t theiler);

[[nodiscard]] double max_norm_distance(std::span<const double> a, std::span<const double> b);

/// All admissible pairs. `radii` must be strictly increasing.
[[nodiscard]] PairCounts count_pairs_exact(const PhasePortrait& portrait, std::span<const double> radii,
                                           std::size_t theiler, int workers);

/// `pair_budget` admissible pairs drawn uniformly. Pairs are generated in
/// fixed-size blocks, each from its own (seed, block) stream, so the sample
/// does not depend on the worker count.
[[nodiscard]] PairCounts count_pairs_sampled(const PhasePortrait& portrait, std::span<const double> radii,
                                             std::size_t theiler, std::uint64_t pair_budget,
                                             std::uint64_t seed, int workers);

struct Neighbor
{
    double distance;
    std::size_t index;

    [[nodiscard]] bool operator<(const Neighbor& o) const noexcept
    {
        return distance < o.distance || (distance == o.distance && index < o.index);
    }
    [[nodiscard]] bool operator==(const Neighbor&) const = default;
};

/// Uniform-grid index over the first min(m, 3) coordinates of a portrait's
/// leading `count` points. Queries are exact in the full max-norm.
class NeighborGrid
{
public:
    NeighborGrid(const PhasePortrait& portrait, std::size_t count);

    /// k nearest points among indices [0, limit), ascending by (distance, index).
    [[nodiscard]] std::vector<Neighbor> nearest(std::span<const double> query, std::size_t k,
                                                std::size_t limit) const;

    [[nodiscard]] std::size_t cells_per_axis() const noexcept { return cells_; }

private:
    [[nodiscard]] std::size_t cell_coord(double v, std::size_t axis) const;

    const PhasePortrait* portrait_;
    std::size_t grid_dims_;
    std::size_t cells_;
    std::vector<double> lo_;
    double cell_width_;
    std::vector<std::size_t> cell_start_;
    std::vector<std::size_t> cell_items_;
};

/// Below this many points knn_earlier scans exhaustively.
inline constexpr std::size_t kGridThreshold = 2000;

/// For each query j in [first_query, end_query), the k nearest neighbors
/// among indices i < j - theiler. Row t belongs to query first_query + t and
/// may hold fewer than k entries when few candidates exist.
[[nodiscard]] std::vector<std::vector<Neighbor>> knn_earlier(const PhasePortrait& portrait, std::size_t first_query,
                                                             std::size_t end_query, std::size_t k,
                                                             std::size_t theiler, int workers);

namespace reference {

[[nodiscard]] PairCounts count_pairs_exact(const PhasePortrait& portrait, std::span<const double> radii,
                                           std::size_t theiler);

[[nodiscard]] std::vector<std::vector<Neighbor>> knn_earlier(const PhasePortrait& portrait, std::size_t first_query,
                                                             std::size_t end_query, std::size_t k,
                                                             std::size_t theiler);

} // namespace reference

} // namespace takens::kernels
