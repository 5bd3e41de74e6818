// takens: generate, corrupt, embed and analyze event series for hidden
// deterministic structure.
//
// Exit codes:
//   0  success
//   1  unexpected failure
//   2  usage error (bad flags)
//   3  InsufficientData
//   4  ParseError / EmptyInput
//   5  DivergenceError
//   6  NoMaxima
//   7  NoScalingRegion
//   8  BadProjection
//   9  IoError
//   10 InvalidArgument

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "takens/errors.hpp"
#include "takens/generators.hpp"
#include "takens/io.hpp"
#include "takens/pipeline.hpp"
#include "takens/report.hpp"

namespace fs = std::filesystem;
using namespace takens;

namespace {

int exit_code(const Error& e)
{
    const std::string kind = e.kind();
    if (kind == "InsufficientData") return 3;
    if (kind == "ParseError" || kind == "EmptyInput") return 4;
    if (kind == "DivergenceError") return 5;
    if (kind == "NoMaxima") return 6;
    if (kind == "NoScalingRegion") return 7;
    if (kind == "BadProjection") return 8;
    if (kind == "IoError") return 9;
    if (kind == "InvalidArgument") return 10;
    return 1;
}

struct Globals
{
    std::uint64_t seed = 1;
    std::string out_dir;
    int workers = 1;

    [[nodiscard]] fs::path output(const std::string& name) const
    {
        const fs::path p(name);
        return p.is_absolute() ? p : fs::path(out_dir) / p;
    }
};

struct GenerateArgs
{
    std::string source;
    std::size_t length = 10000;
    std::optional<double> x0;
    double y0 = 0.0;
    double k = 4.0;
    double a = 1.4;
    double b = 0.3;
    std::string component = "x";
    double sigma = 10.0;
    double rho = 28.0;
    double beta = 8.0 / 3.0;
    double dt = 0.01;
    std::size_t transient = 1000;
    double fringe = SlitScreenModel{}.fringe_frequency;
    double envelope = SlitScreenModel{}.envelope_width;
    std::string mapping = "value";
    std::string output;
};

EventSeries generate(const GenerateArgs& g, std::uint64_t seed)
{
    const SlitScreenModel screen{g.fringe, g.envelope};
    if (g.source == "logistic") {
        return logistic_series(g.x0.value_or(0.123), g.k, g.length);
    }
    if (g.source == "henon") {
        MapParams p;
        p.henon_a = g.a;
        p.henon_b = g.b;
        auto pair = henon_series(g.x0.value_or(0.0), g.y0, p, g.length);
        if (g.component == "y") return pair.y;
        if (g.component != "x") throw InvalidArgument("Henon component must be x or y");
        return pair.x;
    }
    if (g.source == "lorenz") {
        LorenzParams p{g.sigma, g.rho, g.beta, g.dt, g.transient};
        auto triple = lorenz_series({g.x0.value_or(1.0), 1.0, 1.0}, p, g.length);
        if (g.component == "y") return triple.y;
        if (g.component == "z") return triple.z;
        if (g.component != "x") throw InvalidArgument("Lorenz component must be x, y or z");
        return triple.x;
    }
    if (g.source == "iid-uniform") {
        return iid_uniform(g.length, seed);
    }
    if (g.source == "born") {
        return born_hits(screen, g.length, seed);
    }
    if (g.source == "chaos-masked") {
        const auto base = logistic_series(g.x0.value_or(0.123), g.k, g.length);
        const auto mapping = g.mapping == "value" ? MaskMapping::Value : MaskMapping::Rank;
        if (g.mapping != "value" && g.mapping != "rank") throw InvalidArgument("mapping must be value or rank");
        return chaos_masked_hits(base, screen, mapping);
    }
    throw InvalidArgument(fmt::format("unknown source '{}'", g.source));
}

std::vector<std::size_t> parse_index_list(const std::string& text)
{
    std::vector<std::size_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(static_cast<std::size_t>(std::stoul(item)));
        } catch (const std::exception&) {
            throw InvalidArgument(fmt::format("'{}' is not an index list", text));
        }
    }
    return out;
}

std::vector<std::size_t> default_projection(std::size_t m)
{
    std::vector<std::size_t> p;
    for (std::size_t c = 0; c < std::min<std::size_t>(m, 3); ++c) {
        p.push_back(c);
    }
    if (p.size() == 1) {
        throw BadProjection("a 1-dimensional portrait cannot be plotted; use m >= 2");
    }
    return p;
}

void write_analysis(const Globals& globals, const AnalysisReport& report, const std::string& report_name)
{
    const fs::path path = globals.output(report_name);
    write_text_file(path, emit_report(report));
    fs::path timings = path;
    timings.replace_extension(".timings.json");
    write_text_file(timings, emit_timings(report));
}

void reproduce_figures(const Globals& g)
{
    auto out = [&](const std::string& name) { return g.output(name); };
    AnalysisConfig config;
    config.seed = g.seed;

    // Figs. 1-3: logistic map at k = 4.
    const auto logistic = logistic_series(0.123, 4.0, 10000);
    write_series(out("logistic.txt"), logistic);
    PlotStyle style;
    style.title = "Logistic map k = 4: seemingly random data";
    write_text_file(out("fig1_logistic_series.svg"), render_series(logistic, 200, style));
    const auto logistic2 = delay_embed(logistic, {2, 1});
    style.title = "Logistic map, reconstructed in 2-D";
    write_text_file(out("fig2_logistic_2d.svg"), render_portrait(logistic2, {0, 1}, style));
    const auto logistic3 = delay_embed(logistic, {3, 1});
    style.title = "Logistic map, reconstructed in 3-D";
    write_text_file(out("fig3_logistic_3d.svg"), render_portrait(logistic3, {0, 1, 2}, style));
    write_analysis(g, run_analysis(logistic, config, g.workers), "logistic_report.json");

    // Fig. 4: i.i.d. null.
    const auto iid = iid_uniform(10000, g.seed);
    write_series(out("iid.txt"), iid);
    style.title = "i.i.d. uniform events, reconstructed in 3-D";
    write_text_file(out("fig4_iid_3d.svg"), render_portrait(delay_embed(iid, {3, 1}), {0, 1, 2}, style));
    write_analysis(g, run_analysis(iid, config, g.workers), "iid_report.json");

    // Hénon attractor and its correlation dimension.
    const auto henon = henon_series(0.0, 0.0, MapParams{}, 50000);
    std::vector<double> xy;
    for (std::size_t i = 100; i < henon.x.size(); ++i) {
        xy.push_back(henon.x[i]);
        xy.push_back(henon.y[i]);
    }
    const auto henon_points = portrait_from_points(std::move(xy), 2, "henon(a=1.4, b=0.3)");
    style.title = "Henon attractor (x, y)";
    write_text_file(out("henon_attractor.svg"), render_portrait(henon_points, {0, 1}, style));
    const auto henon_embedded = delay_embed(normalize(henon.x), {2, 1});
    CorrelationOptions copts;
    copts.seed = g.seed;
    copts.workers = g.workers;
    auto curve = correlation_integral(henon_embedded, log_radii(1e-3, portrait_extent(henon_embedded)), copts);
    try {
        curve = fit_dimension(std::move(curve));
    } catch (const NoScalingRegion&) {
    }
    write_text_file(out("henon_correlation.svg"), render_curve(curve));

    // Figs. 5-6: Lorenz from the x-variable alone, and the maxima map of z.
    const auto lorenz = lorenz_series({1.0, 1.0, 1.0}, LorenzParams{}, 50000);
    const auto lag = suggest_lag(lorenz.x);
    style.title = fmt::format("Lorenz attractor reconstructed from x alone (lag {})", lag);
    write_text_file(out("fig5_lorenz_x_3d.svg"), render_portrait(delay_embed(lorenz.x, {3, lag}), {0, 1, 2}, style));
    const auto maxima = successive_maxima(lorenz.z);
    style.title = "Lorenz map: successive maxima of z";
    style.point_radius = 2.0;
    write_text_file(out("fig6_lorenz_map.svg"), render_portrait(delay_embed(maxima, {2, 1}), {0, 1}, style));
    style.point_radius = PlotStyle{}.point_radius;

    // Born-rule hits against chaos masked to the same marginal.
    const SlitScreenModel screen;
    const auto born = born_hits(screen, 20000, g.seed);
    const auto masked = chaos_masked_hits(logistic_series(0.123, 4.0, 20000), screen, MaskMapping::Rank);
    style.title = "Born-rule hits, reconstructed in 2-D";
    write_text_file(out("screen_born_2d.svg"), render_portrait(delay_embed(born, {2, 1}), {0, 1}, style));
    style.title = "Chaos-masked hits (same marginal), reconstructed in 2-D";
    write_text_file(out("screen_masked_2d.svg"), render_portrait(delay_embed(masked, {2, 1}), {0, 1}, style));
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Delay-embedding analysis of event series: deterministic structure or randomness"};
    app.require_subcommand(1);

    Globals globals;
    if (const char* env = std::getenv("TAKENS_OUT_DIR")) {
        globals.out_dir = env;
    } else {
        globals.out_dir = ".";
    }
    app.add_option("--seed", globals.seed, "Seed for every stochastic step")->capture_default_str();
    app.add_option("--out-dir", globals.out_dir, "Directory for outputs (env TAKENS_OUT_DIR)")->capture_default_str();
    app.add_option("--workers", globals.workers, "Worker threads for the pairwise kernels")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();

    // generate
    GenerateArgs gen;
    auto* generate_cmd = app.add_subcommand("generate", "Write a synthetic series");
    generate_cmd->add_option("--source", gen.source, "logistic|henon|lorenz|iid-uniform|born|chaos-masked")
        ->required()
        ->check(CLI::IsMember({"logistic", "henon", "lorenz", "iid-uniform", "born", "chaos-masked"}));
    generate_cmd->add_option("-n,--length", gen.length, "Number of samples")->capture_default_str();
    generate_cmd->add_option("--x0", gen.x0, "Initial value (logistic 0.123, henon 0, lorenz x 1)");
    generate_cmd->add_option("--y0", gen.y0, "Henon initial y");
    generate_cmd->add_option("--k", gen.k, "Logistic parameter")->capture_default_str();
    generate_cmd->add_option("--a", gen.a, "Henon a")->capture_default_str();
    generate_cmd->add_option("--b", gen.b, "Henon b")->capture_default_str();
    generate_cmd->add_option("--component", gen.component, "Henon x|y, Lorenz x|y|z")->capture_default_str();
    generate_cmd->add_option("--lorenz-sigma", gen.sigma)->capture_default_str();
    generate_cmd->add_option("--lorenz-rho", gen.rho)->capture_default_str();
    generate_cmd->add_option("--lorenz-beta", gen.beta)->capture_default_str();
    generate_cmd->add_option("--dt", gen.dt, "Lorenz RK4 step")->capture_default_str();
    generate_cmd->add_option("--transient", gen.transient, "Lorenz steps discarded")->capture_default_str();
    generate_cmd->add_option("--fringe", gen.fringe, "Screen fringe frequency")->capture_default_str();
    generate_cmd->add_option("--envelope", gen.envelope, "Screen envelope width (<= 0: flat)")->capture_default_str();
    generate_cmd->add_option("--mapping", gen.mapping, "Chaos masking: value|rank")->capture_default_str();
    generate_cmd->add_option("-o,--output", gen.output, "Output series file");

    // corrupt
    std::string corrupt_in;
    std::string corrupt_out = "corrupted.txt";
    double dropout = 0.0;
    double noise = 0.0;
    bool relative = false;
    auto* corrupt_cmd = app.add_subcommand("corrupt", "Apply detector dropout and noise");
    corrupt_cmd->add_option("input", corrupt_in)->required();
    corrupt_cmd->add_option("--dropout", dropout, "Per-sample deletion probability")->capture_default_str();
    corrupt_cmd->add_option("--sigma", noise, "Gaussian noise standard deviation")->capture_default_str();
    corrupt_cmd->add_flag("--relative", relative, "Interpret --sigma as a fraction of the series range");
    corrupt_cmd->add_option("-o,--output", corrupt_out)->capture_default_str();

    // embed
    std::string embed_in;
    std::string embed_out = "portrait.txt";
    std::string embed_plot;
    std::string projection;
    EmbeddingConfig embed_config;
    bool embed_auto_lag = false;
    auto* embed_cmd = app.add_subcommand("embed", "Delay-embed a series");
    embed_cmd->add_option("input", embed_in)->required();
    embed_cmd->add_option("-m,--dimension", embed_config.dimension)->capture_default_str();
    embed_cmd->add_option("--lag", embed_config.lag)->capture_default_str();
    embed_cmd->add_flag("--auto-lag", embed_auto_lag, "Use the 1/e autocorrelation lag");
    embed_cmd->add_option("-o,--output", embed_out)->capture_default_str();
    embed_cmd->add_option("--plot", embed_plot, "Also write an SVG scatter");
    embed_cmd->add_option("--projection", projection, "Coordinates to plot, e.g. 0,1 or 0,1,2");

    // maxima
    std::string maxima_in;
    std::string maxima_out = "maxima.txt";
    auto* maxima_cmd = app.add_subcommand("maxima", "Successive local maxima of a flow observable");
    maxima_cmd->add_option("input", maxima_in)->required();
    maxima_cmd->add_option("-o,--output", maxima_out)->capture_default_str();

    // analyze
    std::string analyze_in;
    std::string format_name = "auto";
    std::string dwell_name = "all";
    std::string report_name = "report.json";
    std::string region;
    std::optional<std::size_t> theiler;
    bool plots = false;
    AnalysisConfig config;
    auto* analyze_cmd = app.add_subcommand("analyze", "Full analysis and verdict");
    analyze_cmd->add_option("input", analyze_in)->required();
    analyze_cmd->add_option("--format", format_name, "auto|text|columns|records")->capture_default_str();
    analyze_cmd->add_option("--dwell", dwell_name, "Record streams: all|on|off durations")->capture_default_str();
    analyze_cmd->add_option("-m,--dimension", config.embedding.dimension)->capture_default_str();
    analyze_cmd->add_option("--lag", config.embedding.lag)->capture_default_str();
    analyze_cmd->add_flag("--auto-lag", config.auto_lag);
    analyze_cmd->add_option("--k", config.k, "Forecast neighbors")->capture_default_str();
    analyze_cmd->add_option("--test-fraction", config.test_fraction)->capture_default_str();
    analyze_cmd->add_option("--surrogates", config.n_surrogates)->capture_default_str();
    analyze_cmd->add_option("--alpha", config.alpha)->capture_default_str();
    analyze_cmd->add_option("--pair-budget", config.pair_budget)->capture_default_str();
    analyze_cmd->add_option("--radius-lo", config.radius_lo)->capture_default_str();
    analyze_cmd->add_option("--radii", config.radius_count)->capture_default_str();
    analyze_cmd->add_option("--probe-min", config.probe_min)->capture_default_str();
    analyze_cmd->add_option("--probe-max", config.probe_max)->capture_default_str();
    analyze_cmd->add_option("--theiler", theiler, "Theiler window (default lag*m)");
    analyze_cmd->add_option("--scaling-region", region, "Manual fit window as begin,end radius indices");
    analyze_cmd->add_option("--report", report_name)->capture_default_str();
    analyze_cmd->add_flag("--plots", plots, "Write portrait and correlation-curve SVGs");

    auto* reproduce_cmd = app.add_subcommand("reproduce-figures", "Run the canned figure pipelines");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // --help and --version are reported as "errors" with a zero code.
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*generate_cmd) {
            const auto series = generate(gen, globals.seed);
            const auto path = globals.output(gen.output.empty() ? gen.source + ".txt" : gen.output);
            write_series(path, series);
            std::cout << fmt::format("wrote {} samples to {}\n", series.size(), path.string());
        } else if (*corrupt_cmd) {
            const auto series = ingest_series(corrupt_in);
            const double sigma = relative ? noise * series.range() : noise;
            const auto out = corrupt(series, dropout, sigma, globals.seed);
            write_series(globals.output(corrupt_out), out);
            std::cout << fmt::format("kept {} of {} samples\n", out.size(), series.size());
        } else if (*embed_cmd) {
            const auto series = ingest_series(embed_in);
            if (embed_auto_lag) {
                embed_config.lag = suggest_lag(series);
            }
            const auto portrait = delay_embed(series, embed_config);
            write_portrait(globals.output(embed_out), portrait);
            if (!embed_plot.empty()) {
                const auto proj = projection.empty() ? default_projection(portrait.dimension())
                                                     : parse_index_list(projection);
                write_text_file(globals.output(embed_plot), render_portrait(portrait, proj));
            }
            std::cout << fmt::format("{} points, m={}, lag={}\n", portrait.size(), embed_config.dimension,
                                     embed_config.lag);
        } else if (*maxima_cmd) {
            const auto maxima = successive_maxima(ingest_series(maxima_in));
            write_series(globals.output(maxima_out), maxima);
            std::cout << fmt::format("{} maxima\n", maxima.size());
        } else if (*analyze_cmd) {
            const auto series =
                ingest_series(analyze_in, parse_input_format(format_name), parse_dwell_selection(dwell_name));
            config.seed = globals.seed;
            config.theiler = theiler;
            if (!region.empty()) {
                const auto r = parse_index_list(region);
                if (r.size() != 2) {
                    throw InvalidArgument("--scaling-region takes begin,end");
                }
                config.scaling_region = IndexRange{r[0], r[1]};
            }
            const auto report = run_analysis(series, config, globals.workers);
            write_analysis(globals, report, report_name);
            if (plots) {
                const fs::path stem = fs::path(report_name).stem();
                const auto portrait = delay_embed(normalize(series), report.config.embedding);
                if (portrait.dimension() >= 2) {
                    write_text_file(globals.output(stem.string() + "_portrait.svg"),
                                    render_portrait(portrait, default_projection(portrait.dimension())));
                }
                for (const auto& curve : report.curves) {
                    write_text_file(globals.output(fmt::format("{}_curve_m{}.svg", stem.string(),
                                                               curve.embedding_dimension)),
                                    render_curve(curve));
                }
            }
            std::cout << fmt::format("verdict: {} (forecast p = {:.4g}, dimension = {})\n",
                                     to_string(report.verdict.classification), report.verdict.forecast_p,
                                     report.verdict.dimension_estimate
                                         ? fmt::format("{:.3f}", *report.verdict.dimension_estimate)
                                         : std::string("none"));
        } else if (*reproduce_cmd) {
            reproduce_figures(globals);
            std::cout << fmt::format("figures written to {}\n", globals.out_dir);
        }
    } catch (const Error& e) {
        std::cerr << fmt::format("takens: error[{}]: {}\n", e.kind(), e.what());
        return exit_code(e);
    } catch (const std::exception& e) {
        std::cerr << fmt::format("takens: error[internal]: {}\n", e.what());
        return 1;
    }
    return 0;
}
