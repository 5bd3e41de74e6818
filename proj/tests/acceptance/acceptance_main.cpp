// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <boost/numeric/odeint.hpp>
#include <fmt/format.h>

#include "takens/analysis.hpp"
#include "takens/embedding.hpp"
#include "takens/errors.hpp"
#include "takens/generators.hpp"
#include "takens/io.hpp"
#include "takens/pipeline.hpp"
#include "takens/rng.hpp"
#include "test_support.hpp"

using namespace takens;
namespace fs = std::filesystem;

namespace {

/// Collects the individual checks of one criterion.
class Outcome
{
public:
    void check(bool ok, const std::string& what)
    {
        if (!ok) {
            failures_.push_back(what);
        }
        notes_.push_back(fmt::format("      {} {}", ok ? "ok  " : "FAIL", what));
    }
    void note(const std::string& text) { notes_.push_back("      " + text); }

    [[nodiscard]] bool passed() const { return failures_.empty(); }
    [[nodiscard]] const std::vector<std::string>& notes() const { return notes_; }

private:
    std::vector<std::string> failures_;
    std::vector<std::string> notes_;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

fs::path scratch()
{
    static const fs::path dir = [] {
        auto d = fs::temp_directory_path() / "takens_acceptance";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string slurp(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(const std::string& args)
{
    const std::string command = fmt::format("\"{}\" --out-dir \"{}\" {} > /dev/null 2>> \"{}\"", TAKENS_CLI_PATH,
                                            scratch().string(), args, (scratch() / "cli_stderr.txt").string());
    const int status = std::system(command.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const CorrelationCurve* curve_for(const AnalysisReport& report, std::size_t m)
{
    for (const auto& c : report.curves) {
        if (c.embedding_dimension == m) {
            return &c;
        }
    }
    return nullptr;
}

/// Least-squares slope of log C against log r over [begin, end).
double loglog_slope(const std::vector<double>& radii, const std::vector<double>& c, IndexRange region)
{
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const auto n = static_cast<double>(region.size());
    for (std::size_t k = region.begin; k < region.end; ++k) {
        const double x = std::log(radii[k]);
        const double y = std::log(c[k]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

/// Brute-force correlation sums at every radius in one pass over all pairs.
std::vector<double> brute_force_curve(const PhasePortrait& p, const std::vector<double>& radii, std::size_t theiler)
{
    std::vector<std::uint64_t> hist(radii.size() + 1, 0);
    std::uint64_t total = 0;
    const std::size_t n = p.size();
    const std::size_t m = p.dimension();
    const auto data = p.data();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + theiler + 1; j < n; ++j) {
            double d = 0.0;
            for (std::size_t c = 0; c < m; ++c) {
                d = std::max(d, std::abs(data[i * m + c] - data[j * m + c]));
            }
            // First radius strictly greater than d.
            ++hist[static_cast<std::size_t>(std::upper_bound(radii.begin(), radii.end(), d) - radii.begin())];
            ++total;
        }
    }
    std::vector<double> c(radii.size());
    std::uint64_t running = 0;
    for (std::size_t k = 0; k < radii.size(); ++k) {
        running += hist[k];
        c[k] = static_cast<double>(running) / static_cast<double>(total);
    }
    return c;
}

std::string fmt_opt(const std::optional<double>& v) { return v ? fmt::format("{:.3f}", *v) : "none"; }

// ---------------------------------------------------------------------------

Outcome embedding_identity()
{
    Outcome out;
    const auto start = Clock::now();
    Rng rng(2024);
    std::size_t violations = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 20 + rng.below(2000);
        std::vector<double> v(n);
        for (double& x : v) x = rng.normal();
        const EmbeddingConfig config{1 + rng.below(kMaxEmbeddingDimension), 1 + rng.below(5)};
        const EventSeries s(v);
        if (config.span() >= n) {
            try {
                (void)delay_embed(s, config);
                ++violations;
            } catch (const InsufficientData&) {
            }
            continue;
        }
        const auto p = delay_embed(s, config);
        if (p.size() != n - config.span() || p.dimension() != config.dimension || !(p.config() == config) ||
            p.data().size() != p.size() * config.dimension) {
            ++violations;
            continue;
        }
        for (std::size_t j = 0; j < p.size(); ++j) {
            for (std::size_t c = 0; c < config.dimension; ++c) {
                if (p.point(j)[c] != v[j + c * config.lag]) ++violations;
            }
        }
    }
    const double t = seconds_since(start);
    out.check(violations == 0, fmt::format("invariant violations: {}", violations));
    out.check(t < 1.0, fmt::format("runtime {:.3f} s < 1 s", t));
    return out;
}

Outcome logistic_analogue()
{
    Outcome out;
    const auto start = Clock::now();
    const auto s = logistic_series(0.123, 4.0, 10000);
    const auto portrait = delay_embed(s, {2, 1});
    std::size_t within = 0;
    for (std::size_t j = 0; j < portrait.size(); ++j) {
        const auto p = portrait.point(j);
        if (std::abs(p[1] - 4.0 * p[0] * (1.0 - p[0])) <= 1e-12) ++within;
    }
    out.check(within == portrait.size(), fmt::format("{}/{} points on the parabola", within, portrait.size()));

    AnalysisConfig config;
    config.embedding = {2, 1};
    const auto report = run_analysis(s, config);
    const double t = seconds_since(start);
    out.check(report.verdict.classification == Classification::DeterministicStructure,
              fmt::format("verdict {}", to_string(report.verdict.classification)));
    out.check(report.surrogate.p_value == 0.01, fmt::format("forecast p = {:.4g} (S = 99)", report.surrogate.p_value));
    out.note(fmt::format("forecast error {:.4g}, dimension {}", report.forecast.normalized_error,
                         fmt_opt(report.verdict.dimension_estimate)));
    out.check(t < 10.0, fmt::format("runtime {:.2f} s < 10 s", t));
    return out;
}

Outcome iid_analogue()
{
    Outcome out;
    const auto start = Clock::now();
    const auto s = iid_uniform(10000, 7);
    AnalysisConfig config; // m = 3, probes at m = 2, 3, 4
    const auto report = run_analysis(s, config);
    const double t = seconds_since(start);

    const double err = report.forecast.normalized_error;
    out.check(err >= 0.9 && err <= 1.2, fmt::format("forecast error {:.4f} in [0.9, 1.2]", err));
    out.check(report.surrogate.p_value > 0.05, fmt::format("surrogate p = {:.4g} > 0.05", report.surrogate.p_value));
    for (std::size_t m = 2; m <= 4; ++m) {
        const auto* curve = curve_for(report, m);
        const bool ok = curve && curve->fit && curve->fit->slope >= 0.8 * static_cast<double>(m);
        out.check(ok, fmt::format("slope at m={} is {} (>= {:.1f})", m,
                                  curve && curve->fit ? fmt::format("{:.3f}", curve->fit->slope) : "missing",
                                  0.8 * static_cast<double>(m)));
    }
    out.check(report.verdict.classification == Classification::RandomConsistent,
              fmt::format("verdict {}", to_string(report.verdict.classification)));
    out.check(t < 60.0, fmt::format("runtime {:.2f} s < 60 s", t));

    // Independent all-pairs recount of the m = 2 curve.
    const auto* c2 = curve_for(report, 2);
    if (c2 && c2->fit) {
        const auto portrait = delay_embed(normalize(s), {2, 1});
        const auto brute = brute_force_curve(portrait, c2->radii, c2->theiler);
        const double a = c2->fit->slope;
        const double b = loglog_slope(c2->radii, brute, c2->fit->scaling_region);
        out.check(std::abs(a - b) < 0.05,
                  fmt::format("m=2 slope {:.4f} vs brute-force all-pairs {:.4f} (|diff| < 0.05)", a, b));
    }
    return out;
}

Outcome henon_dimension()
{
    Outcome out;
    const auto start = Clock::now();
    const auto henon = henon_series(0.0, 0.0, MapParams{}, 50000);
    const auto series = normalize(henon.x);
    const auto portrait = delay_embed(series, {2, 1});
    CorrelationOptions options;
    options.seed = 5;
    const auto radii = log_radii(1e-3, portrait_extent(portrait));
    const auto curve = fit_dimension(correlation_integral(portrait, radii, options));
    const auto& fit = *curve.fit;
    out.check(fit.slope >= 1.10 && fit.slope <= 1.35, fmt::format("slope {:.4f} in [1.10, 1.35]", fit.slope));
    out.check(fit.r_squared >= 0.98, fmt::format("R^2 {:.5f} >= 0.98", fit.r_squared));
    out.note(fmt::format("{} sampled pairs, scaling region radii [{}, {})", curve.pairs_used,
                         fit.scaling_region.begin, fit.scaling_region.end));

    // Sampled versus exact counting on the first 10^4 points.
    std::vector<double> head(series.values().begin(), series.values().begin() + 10000);
    const auto sub = delay_embed(EventSeries(head), {2, 1});
    const auto sub_radii = log_radii(1e-3, portrait_extent(sub));
    CorrelationOptions exact_options;
    exact_options.pair_budget = 100'000'000;
    const auto exact = fit_dimension(correlation_integral(sub, sub_radii, exact_options));
    const auto sampled_raw = correlation_integral(sub, sub_radii, options);
    const auto sampled = fit_dimension_in(sampled_raw, exact.fit->scaling_region);
    const auto sampled_auto = fit_dimension(sampled_raw);
    out.check(exact.exact && !sampled_raw.exact, "subset counted once exactly and once by sampling");
    out.check(std::abs(exact.fit->slope - sampled.fit->slope) < 0.05,
              fmt::format("subset slope exact {:.4f} vs sampled {:.4f} on the same radii", exact.fit->slope,
                          sampled.fit->slope));
    out.check(std::abs(exact.fit->slope - sampled_auto.fit->slope) < 0.05,
              fmt::format("independently fitted sampled slope {:.4f}", sampled_auto.fit->slope));
    const double t = seconds_since(start);
    out.check(t < 60.0, fmt::format("runtime {:.2f} s < 60 s", t));
    return out;
}

Outcome lorenz_analogue()
{
    Outcome out;
    const auto start = Clock::now();
    const auto run = lorenz_series({1.0, 1.0, 1.0}, LorenzParams{}, 50000);

    AnalysisConfig config;
    config.auto_lag = true;
    const auto report = run_analysis(run.x, config);
    out.check(report.verdict.classification == Classification::DeterministicStructure,
              fmt::format("x-series at lag {}: verdict {} (p = {:.4g})", report.config.embedding.lag,
                          to_string(report.verdict.classification), report.verdict.forecast_p));

    const auto maxima = successive_maxima(run.z);
    std::vector<double> x(maxima.values().begin(), maxima.values().end() - 1);
    std::vector<double> y(maxima.values().begin() + 1, maxima.values().end());
    const double residual = test::local_average_residual(x, y, 2);

    // Range of the maxima from an independent, ten times finer integration.
    using State = std::array<double, 3>;
    auto field = [](const State& s, State& d, double) {
        d[0] = 10.0 * (s[1] - s[0]);
        d[1] = s[0] * (28.0 - s[2]) - s[1];
        d[2] = s[0] * s[1] - 8.0 / 3.0 * s[2];
    };
    boost::numeric::odeint::runge_kutta4<State> stepper;
    State s{1.0, 1.0, 1.0};
    std::vector<double> z;
    for (int i = 0; i < 510000; ++i) {
        stepper.do_step(field, s, 0.0, 0.001);
        if (i >= 10000) z.push_back(s[2]);
    }
    const double ref_range = successive_maxima(EventSeries(z)).range();
    out.check(std::abs(ref_range - maxima.range()) < 0.1 * ref_range,
              fmt::format("maxima range {:.3f} vs reference {:.3f}", maxima.range(), ref_range));
    out.check(residual < 0.01 * ref_range,
              fmt::format("{} maxima, map residual RMS {:.4f} < 1% of range ({:.4f})", maxima.size(), residual,
                          0.01 * ref_range));
    const double t = seconds_since(start);
    out.check(t < 60.0, fmt::format("runtime {:.2f} s < 60 s", t));
    return out;
}

Outcome discriminator()
{
    Outcome out;
    const auto start = Clock::now();
    const SlitScreenModel screen;
    const auto born = born_hits(screen, 20000, 11);
    const auto masked = chaos_masked_hits(logistic_series(0.123, 4.0, 20000), screen, MaskMapping::Rank);
    const double ks = test::ks_two_sample(test::to_vector(born.values()), test::to_vector(masked.values()));
    out.check(ks < 0.02, fmt::format("two-sample KS {:.4f} < 0.02", ks));

    AnalysisConfig config;
    config.seed = 11;
    const auto born_report = run_analysis(born, config);
    const auto masked_report = run_analysis(masked, config);
    out.check(born_report.verdict.classification == Classification::RandomConsistent,
              fmt::format("Born hits: {} (p = {:.4g}, error {:.3f})", to_string(born_report.verdict.classification),
                          born_report.verdict.forecast_p, born_report.forecast.normalized_error));
    out.check(masked_report.verdict.classification == Classification::DeterministicStructure &&
                  masked_report.verdict.forecast_p == 0.01,
              fmt::format("masked hits: {} (p = {:.4g}, error {:.3f})",
                          to_string(masked_report.verdict.classification), masked_report.verdict.forecast_p,
                          masked_report.forecast.normalized_error));
    const double t = seconds_since(start);
    out.check(t < 120.0, fmt::format("runtime {:.2f} s < 120 s", t));
    return out;
}

Outcome robustness()
{
    Outcome out;
    const SlitScreenModel screen;
    const auto masked = chaos_masked_hits(logistic_series(0.123, 4.0, 20000), screen, MaskMapping::Rank);
    const auto noisy = corrupt(masked, 0.05, 0.005 * masked.range(), 3);
    AnalysisConfig config;
    const auto report = run_analysis(noisy, config);
    out.check(report.verdict.classification == Classification::DeterministicStructure &&
                  report.verdict.forecast_p <= 0.05,
              fmt::format("5% dropout, 0.5% noise: {} (p = {:.4g}, error {:.3f}, {} samples kept)",
                          to_string(report.verdict.classification), report.verdict.forecast_p,
                          report.forecast.normalized_error, noisy.size()));

    // Sensitivity table: reported, not asserted.
    const std::array<double, 4> dropouts{0.05, 0.2, 0.4, 0.6};
    const std::array<double, 3> sigmas{0.005, 0.05, 0.2};
    out.note("sensitivity (surrogate p / forecast error, S = 99, m = 3):");
    std::string header = "        dropout \\ sigma";
    for (double sg : sigmas) header += fmt::format(" | {:>15}", fmt::format("{:g} x range", sg));
    out.note(header);
    for (double d : dropouts) {
        std::string row = fmt::format("        {:>15g}", d);
        for (double sg : sigmas) {
            const auto series = normalize(corrupt(masked, d, sg * masked.range(), 3));
            const auto r = shuffle_surrogate_test(series, {3, 1}, 99, 1);
            row += fmt::format(" | {:>6.3f} / {:>6.3f}", r.p_value, r.observed);
        }
        out.note(row);
    }
    return out;
}

Outcome determinism()
{
    Outcome out;
    const auto series = chaos_masked_hits(logistic_series(0.123, 4.0, 5000), SlitScreenModel{}, MaskMapping::Rank);
    write_series(scratch() / "masked.txt", series);
    std::vector<double> scaled;
    for (double v : series.values()) scaled.push_back(3.7 * v - 1.2);
    write_series(scratch() / "masked_affine.txt", EventSeries(scaled));

    const std::string input = (scratch() / "masked.txt").string();
    bool ran = true;
    for (int i = 0; i < 3; ++i) {
        ran &= run_cli(fmt::format("analyze \"{}\" --report run{}.json", input, i)) == 0;
    }
    ran &= run_cli(fmt::format("--workers 4 analyze \"{}\" --report workers4.json", input)) == 0;
    ran &= run_cli(fmt::format("analyze \"{}\" --report affine.json", (scratch() / "masked_affine.txt").string())) ==
           0;
    out.check(ran, "all analyze runs exit 0");

    const auto base = slurp(scratch() / "run0.json");
    out.check(!base.empty(), fmt::format("report size {} bytes", base.size()));
    out.check(base == slurp(scratch() / "run1.json") && base == slurp(scratch() / "run2.json"),
              "3 runs byte-identical");
    out.check(base == slurp(scratch() / "workers4.json"), "workers 1 and 4 byte-identical");
    out.check(base == slurp(scratch() / "affine.json"), "3.7*s - 1.2 byte-identical");
    return out;
}

Outcome calibration()
{
    Outcome out;
    const auto start = Clock::now();
    std::size_t rejections = 0;
    for (std::uint64_t i = 0; i < 200; ++i) {
        const auto series = normalize(iid_uniform(2000, 10'000 + i));
        const auto r = shuffle_surrogate_test(series, {3, 1}, 99, i);
        if (r.p_value <= 0.01) ++rejections;
    }
    const double t = seconds_since(start);
    out.check(rejections <= 4, fmt::format("{} of 200 i.i.d. inputs rejected at alpha = 0.01 (<= 4)", rejections));
    out.check(t < 600.0, fmt::format("runtime {:.1f} s < 600 s", t));
    return out;
}

} // namespace

int main()
{
    struct Criterion
    {
        const char* id;
        const char* title;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {"AC1", "embedding identity suite", embedding_identity},
        {"AC2", "logistic map: parabola and deterministic verdict", logistic_analogue},
        {"AC3", "i.i.d. uniform: forecast, saturation and random verdict", iid_analogue},
        {"AC4", "Henon correlation dimension", henon_dimension},
        {"AC5", "Lorenz x-series verdict and z-maxima map", lorenz_analogue},
        {"AC6", "Born hits versus chaos-masked hits", discriminator},
        {"AC7", "robustness to dropout and noise", robustness},
        {"AC8", "byte-identical reports", determinism},
        {"AC9", "false-positive calibration over 200 seeds", calibration},
    };

    int failed = 0;
    for (const auto& c : criteria) {
        Outcome outcome;
        try {
            outcome = c.run();
        } catch (const std::exception& e) {
            outcome.check(false, fmt::format("threw: {}", e.what()));
        }
        std::cout << fmt::format("[{}] {} {}\n", outcome.passed() ? "PASS" : "FAIL", c.id, c.title);
        for (const auto& line : outcome.notes()) {
            std::cout << line << '\n';
        }
        std::cout.flush();
        failed += outcome.passed() ? 0 : 1;
    }
    std::cout << fmt::format("{} of {} criteria passed\n", criteria.size() - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
