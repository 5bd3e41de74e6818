#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace takens {

/// Seedable generator with platform-independent output.
///
/// The engine is std::mt19937_64, whose sequence is fixed by the standard.
/// The std:: distributions are not, so the transforms to uniform reals,
/// bounded integers and normals are implemented here.
class Rng
{
public:
    static constexpr const char* kName = "mt19937_64";

    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Independent stream for a (seed, stream index) pair.
    static Rng stream(std::uint64_t seed, std::uint64_t index);

    std::uint64_t next() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, bound). bound must be nonzero.
    std::uint64_t below(std::uint64_t bound);

    /// Standard normal deviate (Box-Muller, pairs cached).
    double normal();

    /// Fisher-Yates shuffle driven by below().
    template <typename T>
    void shuffle(std::span<T> items)
    {
        for (std::size_t i = items.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(below(i));
            std::swap(items[i - 1], items[j]);
        }
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

std::uint64_t splitmix64(std::uint64_t x);

} // namespace takens
