#include "takens/kernels.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <omp.h>

#include "takens/errors.hpp"
#include "takens/rng.hpp"

namespace takens::kernels {

namespace {

constexpr std::uint64_t kSampleBlock = 1U << 16;

int clamp_workers(int workers) { return std::max(workers, 1); }

/// Index of the first radius exceeding d; the pair counts toward every radius
/// from there on.
std::size_t first_radius_above(std::span<const double> radii, double d)
{
    return static_cast<std::size_t>(std::upper_bound(radii.begin(), radii.end(), d) - radii.begin());
}

PairCounts accumulate(const std::vector<std::uint64_t>& histogram, std::uint64_t total, std::size_t radii)
{
    PairCounts out;
    out.below.assign(radii, 0);
    out.total = total;
    std::uint64_t running = 0;
    for (std::size_t k = 0; k < radii; ++k) {
        running += histogram[k];
        out.below[k] = running;
    }
    return out;
}

void check_radii(std::span<const double> radii)
{
    for (std::size_t k = 0; k < radii.size(); ++k) {
        if (!(radii[k] > 0.0) || (k > 0 && !(radii[k] > radii[k - 1]))) {
            throw InvalidArgument("radii must be positive and strictly increasing");
        }
    }
}

/// Keeps the k smallest neighbors seen so far, sorted.
class BestK
{
public:
    explicit BestK(std::size_t k) : k_(k) { items_.reserve(k + 1); }

    void offer(const Neighbor& n)
    {
        if (items_.size() == k_ && !(n < items_.back())) {
            return;
        }
        auto pos = std::upper_bound(items_.begin(), items_.end(), n);
        items_.insert(pos, n);
        if (items_.size() > k_) {
            items_.pop_back();
        }
    }

    [[nodiscard]] bool full() const noexcept { return items_.size() == k_; }
    [[nodiscard]] double worst() const noexcept
    {
        return items_.empty() ? std::numeric_limits<double>::infinity() : items_.back().distance;
    }
    std::vector<Neighbor> take() { return std::move(items_); }

private:
    std::size_t k_;
    std::vector<Neighbor> items_;
};

std::vector<Neighbor> scan_earlier(const PhasePortrait& portrait, std::size_t j, std::size_t k, std::size_t theiler)
{
    BestK best(k);
    const auto query = portrait.point(j);
    const std::size_t limit = j > theiler ? j - theiler : 0;
    for (std::size_t i = 0; i < limit; ++i) {
        best.offer({max_norm_distance(query, portrait.point(i)), i});
    }
    return best.take();
}

} // namespace

std::uint64_t admissible_pairs(std::size_t n, std::size_t theiler)
{
    if (n <= theiler + 1) {
        return 0;
    }
    // Pairs with gap g = j - i in (theiler, n): sum over g of (n - g).
    const std::uint64_t m = n - theiler - 1;
    return m * (m + 1) / 2;
}

double max_norm_distance(std::span<const double> a, std::span<const double> b)
{
    double d = 0.0;
    for (std::size_t c = 0; c < a.size(); ++c) {
        d = std::max(d, std::abs(a[c] - b[c]));
    }
    return d;
}

PairCounts count_pairs_exact(const PhasePortrait& portrait, std::span<const double> radii, std::size_t theiler,
                             int workers)
{
    check_radii(radii);
    const std::size_t n = portrait.size();
    const std::size_t bins = radii.size() + 1;
    std::vector<std::uint64_t> histogram(bins, 0);
    const auto signed_n = static_cast<std::ptrdiff_t>(n);

#pragma omp parallel num_threads(clamp_workers(workers))
    {
        std::vector<std::uint64_t> local(bins, 0);
#pragma omp for schedule(dynamic, 16) nowait
        for (std::ptrdiff_t si = 0; si < signed_n; ++si) {
            const auto i = static_cast<std::size_t>(si);
            const auto pi = portrait.point(i);
            for (std::size_t j = i + theiler + 1; j < n; ++j) {
                ++local[first_radius_above(radii, max_norm_distance(pi, portrait.point(j)))];
            }
        }
#pragma omp critical
        for (std::size_t b = 0; b < bins; ++b) {
            histogram[b] += local[b];
        }
    }
    return accumulate(histogram, admissible_pairs(n, theiler), radii.size());
}

PairCounts count_pairs_sampled(const PhasePortrait& portrait, std::span<const double> radii, std::size_t theiler,
                               std::uint64_t pair_budget, std::uint64_t seed, int workers)
{
    check_radii(radii);
    const std::size_t n = portrait.size();
    if (admissible_pairs(n, theiler) == 0) {
        throw InsufficientData("no admissible pairs outside the Theiler window");
    }
    const std::size_t bins = radii.size() + 1;
    std::vector<std::uint64_t> histogram(bins, 0);
    const auto blocks = static_cast<std::ptrdiff_t>((pair_budget + kSampleBlock - 1) / kSampleBlock);

#pragma omp parallel num_threads(clamp_workers(workers))
    {
        std::vector<std::uint64_t> local(bins, 0);
#pragma omp for schedule(dynamic, 1) nowait
        for (std::ptrdiff_t b = 0; b < blocks; ++b) {
            const auto block = static_cast<std::uint64_t>(b);
            Rng rng = Rng::stream(seed, block);
            const std::uint64_t start = block * kSampleBlock;
            const std::uint64_t count = std::min(kSampleBlock, pair_budget - start);
            for (std::uint64_t s = 0; s < count; ++s) {
                std::size_t i = 0;
                std::size_t j = 0;
                do {
                    i = static_cast<std::size_t>(rng.below(n));
                    j = static_cast<std::size_t>(rng.below(n));
                } while ((i > j ? i - j : j - i) <= theiler);
                ++local[first_radius_above(radii, max_norm_distance(portrait.point(i), portrait.point(j)))];
            }
        }
#pragma omp critical
        for (std::size_t k = 0; k < bins; ++k) {
            histogram[k] += local[k];
        }
    }
    return accumulate(histogram, pair_budget, radii.size());
}

NeighborGrid::NeighborGrid(const PhasePortrait& portrait, std::size_t count)
    : portrait_(&portrait), grid_dims_(std::min<std::size_t>(portrait.dimension(), 3)), cells_(1),
      lo_(grid_dims_, 0.0), cell_width_(1.0)
{
    count = std::min(count, portrait.size());
    std::vector<double> hi(grid_dims_, 0.0);
    for (std::size_t a = 0; a < grid_dims_; ++a) {
        lo_[a] = std::numeric_limits<double>::infinity();
        hi[a] = -std::numeric_limits<double>::infinity();
    }
    for (std::size_t i = 0; i < count; ++i) {
        const auto p = portrait.point(i);
        for (std::size_t a = 0; a < grid_dims_; ++a) {
            lo_[a] = std::min(lo_[a], p[a]);
            hi[a] = std::max(hi[a], p[a]);
        }
    }
    double extent = 0.0;
    for (std::size_t a = 0; a < grid_dims_ && count > 0; ++a) {
        extent = std::max(extent, hi[a] - lo_[a]);
    }
    if (count == 0) {
        std::fill(lo_.begin(), lo_.end(), 0.0);
    }
    // About two points per cell for space-filling data.
    const double target = std::max(1.0, static_cast<double>(count) / 2.0);
    cells_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::pow(target, 1.0 / static_cast<double>(grid_dims_))));
    cell_width_ = extent > 0.0 ? extent / static_cast<double>(cells_) : 1.0;

    std::size_t total = 1;
    for (std::size_t a = 0; a < grid_dims_; ++a) {
        total *= cells_;
    }
    std::vector<std::size_t> cell_of(count);
    cell_start_.assign(total + 1, 0);
    for (std::size_t i = 0; i < count; ++i) {
        const auto p = portrait.point(i);
        std::size_t flat = 0;
        for (std::size_t a = 0; a < grid_dims_; ++a) {
            flat = flat * cells_ + cell_coord(p[a], a);
        }
        cell_of[i] = flat;
        ++cell_start_[flat + 1];
    }
    for (std::size_t c = 0; c < total; ++c) {
        cell_start_[c + 1] += cell_start_[c];
    }
    cell_items_.resize(count);
    std::vector<std::size_t> fill(cell_start_.begin(), cell_start_.end() - 1);
    for (std::size_t i = 0; i < count; ++i) {
        cell_items_[fill[cell_of[i]]++] = i;
    }
}

std::size_t NeighborGrid::cell_coord(double v, std::size_t axis) const
{
    const double pos = std::floor((v - lo_[axis]) / cell_width_);
    if (!(pos > 0.0)) {
        return 0;
    }
    return std::min(static_cast<std::size_t>(pos), cells_ - 1);
}

std::vector<Neighbor> NeighborGrid::nearest(std::span<const double> query, std::size_t k, std::size_t limit) const
{
    BestK best(k);
    if (k == 0 || limit == 0) {
        return best.take();
    }
    std::array<std::ptrdiff_t, 3> centre{};
    for (std::size_t a = 0; a < grid_dims_; ++a) {
        centre[a] = static_cast<std::ptrdiff_t>(cell_coord(query[a], a));
    }
    const auto g = static_cast<std::ptrdiff_t>(cells_);

    auto visit_cell = [&](std::size_t flat) {
        for (std::size_t t = cell_start_[flat]; t < cell_start_[flat + 1]; ++t) {
            const std::size_t i = cell_items_[t];
            if (i >= limit) {
                break; // items are stored in ascending index order
            }
            best.offer({max_norm_distance(query, portrait_->point(i)), i});
        }
    };

    for (std::ptrdiff_t s = 0; s <= g; ++s) {
        // Cells at Chebyshev cell-distance exactly s from the centre.
        std::array<std::ptrdiff_t, 3> off{};
        const std::size_t dims = grid_dims_;
        std::array<std::ptrdiff_t, 3> lo{};
        std::array<std::ptrdiff_t, 3> hi{};
        for (std::size_t a = 0; a < dims; ++a) {
            lo[a] = std::max<std::ptrdiff_t>(centre[a] - s, 0);
            hi[a] = std::min<std::ptrdiff_t>(centre[a] + s, g - 1);
            off[a] = lo[a];
        }
        bool done = false;
        while (!done) {
            std::ptrdiff_t ring = 0;
            std::size_t flat = 0;
            for (std::size_t a = 0; a < dims; ++a) {
                ring = std::max(ring, std::abs(off[a] - centre[a]));
                flat = flat * cells_ + static_cast<std::size_t>(off[a]);
            }
            if (ring == s) {
                visit_cell(flat);
            }
            // Odometer increment over the clipped cube.
            std::size_t a = dims;
            while (a > 0) {
                --a;
                if (off[a] < hi[a]) {
                    ++off[a];
                    break;
                }
                off[a] = lo[a];
                if (a == 0) {
                    done = true;
                }
            }
        }
        // Unvisited points lie at least s cell widths away (projected norm
        // bounds the full max-norm from below).
        if (best.full() && best.worst() < (static_cast<double>(s) - 1e-9) * cell_width_) {
            break;
        }
    }
    return best.take();
}

std::vector<std::vector<Neighbor>> knn_earlier(const PhasePortrait& portrait, std::size_t first_query,
                                               std::size_t end_query, std::size_t k, std::size_t theiler, int workers)
{
    end_query = std::min(end_query, portrait.size());
    if (first_query >= end_query) {
        return {};
    }
    std::vector<std::vector<Neighbor>> rows(end_query - first_query);
    const auto queries = static_cast<std::ptrdiff_t>(rows.size());

    if (end_query < kGridThreshold) {
#pragma omp parallel for schedule(dynamic, 32) num_threads(clamp_workers(workers))
        for (std::ptrdiff_t t = 0; t < queries; ++t) {
            rows[static_cast<std::size_t>(t)] =
                scan_earlier(portrait, first_query + static_cast<std::size_t>(t), k, theiler);
        }
        return rows;
    }

    const NeighborGrid grid(portrait, end_query);
#pragma omp parallel for schedule(dynamic, 32) num_threads(clamp_workers(workers))
    for (std::ptrdiff_t t = 0; t < queries; ++t) {
        const std::size_t j = first_query + static_cast<std::size_t>(t);
        const std::size_t limit = j > theiler ? j - theiler : 0;
        rows[static_cast<std::size_t>(t)] = grid.nearest(portrait.point(j), k, limit);
    }
    return rows;
}

namespace reference {

PairCounts count_pairs_exact(const PhasePortrait& portrait, std::span<const double> radii, std::size_t theiler)
{
    check_radii(radii);
    const std::size_t n = portrait.size();
    PairCounts out;
    out.below.assign(radii.size(), 0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + theiler + 1; j < n; ++j) {
            const double d = max_norm_distance(portrait.point(i), portrait.point(j));
            ++out.total;
            for (std::size_t r = 0; r < radii.size(); ++r) {
                if (d < radii[r]) {
                    ++out.below[r];
                }
            }
        }
    }
    return out;
}

std::vector<std::vector<Neighbor>> knn_earlier(const PhasePortrait& portrait, std::size_t first_query,
                                               std::size_t end_query, std::size_t k, std::size_t theiler)
{
    end_query = std::min(end_query, portrait.size());
    std::vector<std::vector<Neighbor>> rows;
    for (std::size_t j = first_query; j < end_query; ++j) {
        std::vector<Neighbor> all;
        const std::size_t limit = j > theiler ? j - theiler : 0;
        for (std::size_t i = 0; i < limit; ++i) {
            all.push_back({max_norm_distance(portrait.point(j), portrait.point(i)), i});
        }
        std::sort(all.begin(), all.end());
        all.resize(std::min(all.size(), k));
        rows.push_back(std::move(all));
    }
    return rows;
}

} // namespace reference

} // namespace takens::kernels
