#include "catch2/catch_amalgamated.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "takens/analysis.hpp"
#include "takens/errors.hpp"
#include "takens/generators.hpp"
#include "takens/rng.hpp"
#include "test_support.hpp"

using namespace takens;

namespace {

PhasePortrait uniform_points(std::size_t n, std::size_t dim, std::uint64_t seed)
{
    Rng rng(seed);
    std::vector<double> coords(n * dim);
    for (double& x : coords) x = rng.uniform();
    return portrait_from_points(std::move(coords), dim, "uniform");
}

CorrelationCurve fitted_curve(const PhasePortrait& portrait, std::uint64_t seed = 1)
{
    CorrelationOptions options;
    options.seed = seed;
    return fit_dimension(correlation_integral(portrait, log_radii(1e-3, portrait_extent(portrait)), options));
}

} // namespace

TEST_CASE("correlation integral of coincident points", "[analysis]")
{
    const auto portrait = portrait_from_points({0.3, 0.7, 0.3, 0.7}, 2, "twins");
    CorrelationOptions options;
    options.theiler = 0;
    options.min_points = 2;
    const std::vector<double> radii{0.5};
    const auto curve = correlation_integral(portrait, radii, options);
    CHECK(curve.c_values[0] == 1.0);
    CHECK(curve.exact);

    options.min_points = 1000;
    CHECK_THROWS_AS(correlation_integral(portrait, radii, options), InsufficientData);
}

TEST_CASE("correlation integral of uniform points matches the analytic value", "[analysis]")
{
    const auto portrait = uniform_points(10000, 2, 11);
    CorrelationOptions options;
    options.theiler = 0;
    options.pair_budget = 100'000'000;
    const std::vector<double> radii{0.1};
    const auto curve = correlation_integral(portrait, radii, options);
    REQUIRE(curve.exact);
    // P(|Δx| < 0.1) = 2(0.1) - 0.1² = 0.19 per axis.
    CHECK(curve.c_values[0] == Catch::Approx(0.19 * 0.19).margin(0.002));
    const std::vector<double> coords(portrait.data().begin(), portrait.data().end());
    CHECK(curve.c_values[0] == test::brute_force_c(coords, 2, 0.1, 0));
}

TEST_CASE("C(r) is nondecreasing and reaches 1 beyond the diameter", "[analysis][property]")
{
    Rng rng(8);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t m = 1 + rng.below(4);
        const auto portrait = uniform_points(1000 + rng.below(500), m, rng.next());
        auto radii = log_radii(1e-3, 1.0, 20);
        radii.push_back(1.5);
        CorrelationOptions options;
        options.pair_budget = trial % 2 ? 50'000 : 10'000'000;
        options.seed = rng.next();
        const auto curve = correlation_integral(portrait, radii, options);
        for (std::size_t k = 1; k < curve.c_values.size(); ++k) {
            REQUIRE(curve.c_values[k - 1] <= curve.c_values[k]);
        }
        CHECK(curve.c_values.back() == 1.0);
    }
}

TEST_CASE("sampled C(r) concentrates across seeds", "[analysis]")
{
    const auto portrait = uniform_points(5000, 2, 21);
    // (2r - r²)² = 0.05 at r ≈ 0.119.
    const std::vector<double> radii{0.119};
    std::vector<double> estimates;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        CorrelationOptions options;
        options.pair_budget = 100'000;
        options.seed = seed;
        const auto curve = correlation_integral(portrait, radii, options);
        REQUIRE_FALSE(curve.exact);
        estimates.push_back(curve.c_values[0]);
    }
    const double mean = std::accumulate(estimates.begin(), estimates.end(), 0.0) / estimates.size();
    CHECK(mean == Catch::Approx(0.05).margin(0.005));
    CHECK(test::sample_stddev(estimates) < 0.01);
}

TEST_CASE("Theiler window excludes temporally adjacent pairs", "[analysis]")
{
    // Each value repeated twice: only adjacent pairs coincide.
    std::vector<double> v;
    for (int i = 0; i < 600; ++i) {
        v.push_back(i * 0.001);
        v.push_back(i * 0.001);
    }
    const auto portrait = delay_embed(EventSeries(v), {1, 1});
    const std::vector<double> radii{1e-6};
    CorrelationOptions options;
    options.min_points = 10;
    options.theiler = 0;
    CHECK(correlation_integral(portrait, radii, options).c_values[0] > 0.0);
    options.theiler = 1;
    CHECK(correlation_integral(portrait, radii, options).c_values[0] == 0.0);
}

TEST_CASE("dimension of a line segment in 3D is one", "[analysis]")
{
    Rng rng(4);
    std::vector<double> coords;
    for (int i = 0; i < 10000; ++i) {
        const double t = rng.uniform();
        coords.insert(coords.end(), {t, 0.5 * t, 0.3 + 0.2 * t});
    }
    const auto curve = fitted_curve(portrait_from_points(std::move(coords), 3, "segment"));
    REQUIRE(curve.fit);
    CHECK(curve.fit->slope >= 0.9);
    CHECK(curve.fit->slope <= 1.1);
    CHECK(curve.fit->scaling_region.size() >= 4);
}

TEST_CASE("Henon correlation dimension", "[analysis]")
{
    const auto henon = henon_series(0.0, 0.0, MapParams{}, 50000);
    const auto curve = fitted_curve(delay_embed(normalize(henon.x), {2, 1}));
    REQUIRE(curve.fit);
    CHECK(curve.fit->slope >= 1.10);
    CHECK(curve.fit->slope <= 1.35);
    CHECK(curve.fit->r_squared >= 0.98);
}

TEST_CASE("i.i.d. series saturates toward the embedding dimension", "[analysis]")
{
    const auto curve = fitted_curve(delay_embed(iid_uniform(10000, 2), {3, 1}));
    REQUIRE(curve.fit);
    CHECK(curve.fit->slope >= 2.6);
}

TEST_CASE("fit_dimension error paths and manual region", "[analysis]")
{
    CorrelationCurve curve;
    curve.radii = log_radii(1e-3, 1.0, 24);
    curve.c_values.assign(24, 0.9); // nothing in (1e-4, 0.5)
    CHECK_THROWS_AS(fit_dimension(curve), NoScalingRegion);

    // Exact power law C = r^1.7 (scaled into range) gives slope 1.7, R² = 1.
    for (std::size_t k = 0; k < 24; ++k) curve.c_values[k] = 0.4 * std::pow(curve.radii[k], 1.7);
    const auto fitted = fit_dimension(curve);
    REQUIRE(fitted.fit);
    CHECK(fitted.fit->slope == Catch::Approx(1.7).epsilon(1e-9));
    CHECK(fitted.fit->r_squared == Catch::Approx(1.0).epsilon(1e-12));

    const auto manual = fit_dimension_in(curve, {3, 9});
    CHECK(manual.fit->scaling_region == IndexRange{3, 9});
    CHECK(manual.fit->slope == Catch::Approx(1.7).epsilon(1e-9));
    CHECK_THROWS_AS(fit_dimension_in(curve, {20, 30}), NoScalingRegion);

    // Noisy zig-zag never reaches R² ≥ 0.98.
    for (std::size_t k = 0; k < 24; ++k) curve.c_values[k] = k % 2 ? 0.3 : 0.001;
    CHECK_THROWS_AS(fit_dimension(curve), NoScalingRegion);
}

TEST_CASE("k-NN forecast of a periodic series is exact", "[analysis]")
{
    const double pattern[7] = {0.1, 0.9, 0.4, 0.7, 0.2, 0.55, 0.35};
    std::vector<double> v(1000);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = pattern[i % 7];
    ForecastOptions options;
    options.k = 1;
    const auto r = knn_forecast_error(EventSeries(v), {2, 1}, options);
    CHECK(r.normalized_error < 1e-10);
    CHECK(r.k == 1);
}

TEST_CASE("k-NN forecast separates determinism from noise", "[analysis]")
{
    ForecastOptions options;
    options.k = 2;
    const auto logistic = knn_forecast_error(logistic_series(0.123, 4.0, 5000), {2, 1}, options);
    CHECK(logistic.normalized_error < 0.05);

    // For i.i.d. data the prediction is a mean of k independent draws, so the
    // expected normalized error is sqrt(1 + 1/k).
    const auto iid = iid_uniform(5000, 3);
    for (std::size_t k : {1u, 2u, 4u}) {
        options.k = k;
        const auto r = knn_forecast_error(iid, {2, 1}, options);
        INFO("k = " << k << ", error " << r.normalized_error);
        CHECK(std::abs(r.normalized_error - std::sqrt(1.0 + 1.0 / k)) < 0.08);
    }
    options.k = 4; // pipeline default
    const auto r = knn_forecast_error(iid, {2, 1}, options);
    CHECK(r.normalized_error >= 0.9);
    CHECK(r.normalized_error <= 1.2);
}

TEST_CASE("k-NN forecast is identical for any worker count", "[analysis]")
{
    const auto s = lorenz_series({1.0, 1.0, 1.0}, LorenzParams{}, 8000).x;
    ForecastOptions one;
    ForecastOptions four;
    four.workers = 4;
    CHECK(knn_forecast_error(s, {3, 10}, one).normalized_error ==
          knn_forecast_error(s, {3, 10}, four).normalized_error);
}

TEST_CASE("k-NN forecast preconditions", "[analysis]")
{
    const auto s = iid_uniform(400, 1);
    CHECK_THROWS_AS(knn_forecast_error(s, {2, 1}), InsufficientData);
    const auto ok = iid_uniform(2000, 1);
    ForecastOptions bad;
    bad.test_fraction = 0.6;
    CHECK_THROWS_AS(knn_forecast_error(ok, {2, 1}, bad), InvalidArgument);
    bad.test_fraction = 0.25;
    bad.k = 0;
    CHECK_THROWS_AS(knn_forecast_error(ok, {2, 1}, bad), InvalidArgument);
}

TEST_CASE("shuffle surrogates permute the values", "[analysis][property]")
{
    const auto s = logistic_series(0.31, 4.0, 700);
    auto sorted = test::to_vector(s.values());
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < 30; ++i) {
        auto shuffled = test::to_vector(shuffle_surrogate(s, 5, i).values());
        std::sort(shuffled.begin(), shuffled.end());
        REQUIRE(shuffled == sorted);
    }
}

TEST_CASE("surrogate test on logistic and i.i.d. data", "[analysis]")
{
    const auto logistic = shuffle_surrogate_test(logistic_series(0.123, 4.0, 5000), {2, 1}, 99, 1);
    CHECK(logistic.p_value == Catch::Approx(0.01).epsilon(1e-12));
    CHECK(logistic.surrogate_values.size() == 99);
    CHECK(logistic.statistic_name == "knn_normalized_error");

    const auto iid = shuffle_surrogate_test(iid_uniform(5000, 1), {2, 1}, 99, 1);
    CHECK(iid.p_value > 0.05);

    CHECK_THROWS_AS(shuffle_surrogate_test(iid_uniform(5000, 1), {2, 1}, 18, 1), InvalidArgument);
}

TEST_CASE("surrogate p-value follows the rank formula", "[analysis][property]")
{
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto r = shuffle_surrogate_test(iid_uniform(800, seed), {2, 1}, 19, seed);
        const auto extreme = std::count_if(r.surrogate_values.begin(), r.surrogate_values.end(),
                                           [&](double v) { return v <= r.observed; });
        REQUIRE(r.p_value == Catch::Approx((1.0 + extreme) / 20.0).epsilon(1e-12));
        REQUIRE(r.p_value >= 1.0 / 20.0);
    }
}

TEST_CASE("classification rule", "[analysis]")
{
    SurrogateResult sur;
    sur.p_value = 0.04;
    const std::vector<ProbeSlope> none;
    CHECK(classify(std::nullopt, sur, none).classification == Classification::Inconclusive);

    const std::vector<ProbeSlope> saturated{{2, 1.95}, {3, 2.8}, {4, 3.6}};
    CHECK(classify(std::nullopt, sur, saturated).classification == Classification::RandomConsistent);
    CHECK(classify(std::nullopt, sur, saturated).dimension_saturation);

    const std::vector<ProbeSlope> flat{{2, 0.98}, {3, 1.0}, {4, 1.02}};
    CHECK(classify(std::nullopt, sur, flat).classification == Classification::Inconclusive);
    const std::vector<ProbeSlope> missing{{2, 1.95}, {3, std::nullopt}};
    CHECK_FALSE(dimension_saturates(missing));

    sur.p_value = 0.01;
    const auto det = classify(std::nullopt, sur, saturated);
    CHECK(det.classification == Classification::DeterministicStructure);
    CHECK(det.forecast_p == 0.01);

    CorrelationCurve curve;
    curve.fit = DimensionFit{{0, 5}, 1.21, 0.01, 0.999};
    CHECK(classify(curve, sur, none).dimension_estimate == 1.21);
    CHECK(std::string(to_string(Classification::RandomConsistent)) == "RandomConsistent");
}
