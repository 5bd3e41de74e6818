#include "takens/pipeline.hpp"

#include <chrono>

#include "takens/errors.hpp"
#include "takens/rng.hpp"

namespace takens {

namespace {

class StageClock
{
public:
    explicit StageClock(std::map<std::string, double>& sink) : sink_(sink) {}

    void lap(const std::string& stage)
    {
        const auto now = std::chrono::steady_clock::now();
        sink_[stage] = std::chrono::duration<double>(now - last_).count();
        last_ = now;
    }

private:
    std::map<std::string, double>& sink_;
    std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

} // namespace

AnalysisReport run_analysis(const EventSeries& raw, AnalysisConfig config, int workers)
{
    if (config.probe_min < 1 || config.probe_max < config.probe_min || config.probe_max > kMaxEmbeddingDimension) {
        throw InvalidArgument("probe dimensions must satisfy 1 <= min <= max <= 10");
    }
    AnalysisReport report;
    StageClock clock(report.timings);

    const EventSeries series = normalize(raw);
    report.input_digest = content_digest(series.values());
    report.input_length = series.size();
    if (config.auto_lag) {
        config.embedding.lag = suggest_lag(series);
    }
    const std::optional<std::size_t> pinned_theiler = config.theiler;
    if (!config.theiler) {
        config.theiler = config.embedding.lag * config.embedding.dimension;
    }
    clock.lap("normalize");

    ForecastOptions forecast_options;
    forecast_options.k = config.k;
    forecast_options.test_fraction = config.test_fraction;
    forecast_options.theiler = config.theiler;
    forecast_options.workers = workers;
    report.forecast = knn_forecast_error(series, config.embedding, forecast_options);
    clock.lap("forecast");
    report.surrogate =
        shuffle_surrogate_test(series, config.embedding, config.n_surrogates, config.seed, forecast_options);
    clock.lap("surrogates");

    std::vector<std::size_t> dims;
    for (std::size_t m = config.probe_min; m <= config.probe_max; ++m) {
        dims.push_back(m);
    }
    if (config.embedding.dimension < config.probe_min || config.embedding.dimension > config.probe_max) {
        dims.push_back(config.embedding.dimension);
    }

    std::vector<ProbeSlope> probes;
    std::optional<CorrelationCurve> main_curve;
    for (std::size_t m : dims) {
        const EmbeddingConfig embedding{m, config.embedding.lag};
        const PhasePortrait portrait = delay_embed(series, embedding);
        const double extent = portrait_extent(portrait);
        const auto radii = log_radii(config.radius_lo, extent > 0.0 ? extent : 1.0, config.radius_count);

        CorrelationOptions options;
        // Unless pinned, each probe uses its own τ·m.
        options.theiler = pinned_theiler;
        options.pair_budget = config.pair_budget;
        options.seed = splitmix64(config.seed ^ (0xD1B54A32D192ED03ULL * m));
        options.workers = workers;
        CorrelationCurve curve = correlation_integral(portrait, radii, options);
        try {
            curve = config.scaling_region ? fit_dimension_in(std::move(curve), *config.scaling_region)
                                          : fit_dimension(std::move(curve));
        } catch (const NoScalingRegion&) {
            // Recorded as a curve without a fit.
        }
        if (m >= config.probe_min && m <= config.probe_max) {
            probes.push_back({m, curve.fit ? std::optional<double>(curve.fit->slope) : std::nullopt});
        }
        if (m == config.embedding.dimension) {
            main_curve = curve;
        }
        report.curves.push_back(std::move(curve));
    }
    clock.lap("dimension");

    ClassifyOptions classify_options;
    classify_options.alpha = config.alpha;
    classify_options.saturation_fraction = config.saturation_fraction;
    report.verdict = classify(main_curve, report.surrogate, probes, classify_options);
    report.config = config;
    clock.lap("classify");
    return report;
}

} // namespace takens
