#include "takens/generators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "takens/errors.hpp"
#include "takens/rng.hpp"

namespace takens {

namespace {

SeriesMetadata labelled(std::string label, std::optional<std::uint64_t> seed = std::nullopt)
{
    SeriesMetadata meta;
    meta.source_label = std::move(label);
    meta.seed = seed;
    return meta;
}

void require_count(std::size_t n)
{
    if (n == 0) {
        throw InvalidArgument("series length must be at least 1");
    }
}

} // namespace

double SlitScreenModel::intensity(double q) const
{
    if (q < -1.0 || q > 1.0) {
        return 0.0;
    }
    const double fringe = std::cos(fringe_frequency * q);
    const double envelope = envelope_width > 0.0 ? std::exp(-(q * q) / (envelope_width * envelope_width)) : 1.0;
    return fringe * fringe * envelope;
}

ScreenCdf::ScreenCdf(const SlitScreenModel& model, std::size_t grid) : cdf_(grid, 0.0), step_(0.0)
{
    if (grid < 2) {
        throw InvalidArgument("CDF grid needs at least two nodes");
    }
    if (!std::isfinite(model.fringe_frequency) || !std::isfinite(model.envelope_width)) {
        throw InvalidArgument("screen model parameters must be finite");
    }
    step_ = 2.0 / static_cast<double>(grid - 1);
    double previous = model.intensity(-1.0);
    for (std::size_t i = 1; i < grid; ++i) {
        const double q = -1.0 + step_ * static_cast<double>(i);
        const double current = model.intensity(q);
        cdf_[i] = cdf_[i - 1] + 0.5 * (previous + current) * step_;
        previous = current;
    }
    const double total = cdf_.back();
    if (!(total > 0.0)) {
        throw InvalidArgument("screen model has zero total intensity");
    }
    for (double& c : cdf_) {
        c /= total;
    }
    cdf_.back() = 1.0;
}

double ScreenCdf::cdf(double q) const
{
    if (q <= -1.0) {
        return 0.0;
    }
    if (q >= 1.0) {
        return 1.0;
    }
    const double pos = (q + 1.0) / step_;
    const auto i = std::min(static_cast<std::size_t>(pos), cdf_.size() - 2);
    const double frac = pos - static_cast<double>(i);
    return cdf_[i] + frac * (cdf_[i + 1] - cdf_[i]);
}

double ScreenCdf::inverse(double u) const
{
    if (u <= 0.0) {
        return -1.0;
    }
    if (u >= 1.0) {
        return 1.0;
    }
    // First node with cdf > u; the bracket [i-1, i] then has positive width.
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    const auto i = static_cast<std::size_t>(it - cdf_.begin());
    const double c0 = cdf_[i - 1];
    const double c1 = cdf_[i];
    const double frac = (u - c0) / (c1 - c0);
    return -1.0 + step_ * (static_cast<double>(i - 1) + frac);
}

EventSeries logistic_series(double x0, double k, std::size_t n)
{
    if (!(x0 > 0.0 && x0 < 1.0)) {
        throw InvalidArgument(fmt::format("logistic x0 must lie in (0,1), got {}", x0));
    }
    if (!(k > 0.0 && k <= 4.0)) {
        throw InvalidArgument(fmt::format("logistic k must lie in (0,4], got {}", k));
    }
    require_count(n);
    std::vector<double> q(n);
    q[0] = x0;
    for (std::size_t i = 1; i < n; ++i) {
        q[i] = k * q[i - 1] * (1.0 - q[i - 1]);
    }
    return EventSeries(std::move(q), labelled(fmt::format("logistic(k={}, x0={})", k, x0)));
}

HenonSeries henon_series(double x0, double y0, const MapParams& params, std::size_t n)
{
    require_count(n);
    if (!std::isfinite(params.henon_a) || !std::isfinite(params.henon_b) || !std::isfinite(x0) ||
        !std::isfinite(y0)) {
        throw InvalidArgument("Henon parameters and initial point must be finite");
    }
    std::vector<double> xs(n);
    std::vector<double> ys(n);
    double x = x0;
    double y = y0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(std::abs(x) <= params.divergence_bound)) {
            throw DivergenceError(fmt::format("Henon orbit left |x| <= {} at step {}", params.divergence_bound, i));
        }
        xs[i] = x;
        ys[i] = y;
        const double next_x = y + 1.0 - params.henon_a * x * x;
        y = params.henon_b * x;
        x = next_x;
    }
    const auto label = fmt::format("henon(a={}, b={})", params.henon_a, params.henon_b);
    return {EventSeries(std::move(xs), labelled(label + ".x")), EventSeries(std::move(ys), labelled(label + ".y"))};
}

namespace {

using State = std::array<double, 3>;

State lorenz_field(const State& s, const LorenzParams& p)
{
    return {p.sigma * (s[1] - s[0]), s[0] * (p.rho - s[2]) - s[1], s[0] * s[1] - p.beta * s[2]};
}

State rk4_step(const State& s, const LorenzParams& p)
{
    const double h = p.dt;
    auto offset = [](const State& a, const State& d, double f) {
        return State{a[0] + f * d[0], a[1] + f * d[1], a[2] + f * d[2]};
    };
    const State k1 = lorenz_field(s, p);
    const State k2 = lorenz_field(offset(s, k1, 0.5 * h), p);
    const State k3 = lorenz_field(offset(s, k2, 0.5 * h), p);
    const State k4 = lorenz_field(offset(s, k3, h), p);
    State out;
    for (std::size_t c = 0; c < 3; ++c) {
        out[c] = s[c] + h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
    }
    return out;
}

} // namespace

LorenzSeries lorenz_series(const std::array<double, 3>& initial, const LorenzParams& params, std::size_t n)
{
    require_count(n);
    if (!(params.dt > 0.0)) {
        throw InvalidArgument("Lorenz time step must be positive");
    }
    State s = initial;
    auto check = [&](std::size_t step) {
        if (!std::isfinite(s[0]) || !std::isfinite(s[1]) || !std::isfinite(s[2])) {
            throw DivergenceError(fmt::format("Lorenz state became non-finite at step {}", step));
        }
    };
    check(0);
    for (std::size_t i = 0; i < params.transient_steps; ++i) {
        s = rk4_step(s, params);
        check(i + 1);
    }
    std::vector<double> xs(n);
    std::vector<double> ys(n);
    std::vector<double> zs(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = s[0];
        ys[i] = s[1];
        zs[i] = s[2];
        if (i + 1 < n) {
            s = rk4_step(s, params);
            check(params.transient_steps + i + 1);
        }
    }
    const auto label =
        fmt::format("lorenz(sigma={}, rho={}, beta={:.6g}, dt={})", params.sigma, params.rho, params.beta, params.dt);
    return {EventSeries(std::move(xs), labelled(label + ".x")), EventSeries(std::move(ys), labelled(label + ".y")),
            EventSeries(std::move(zs), labelled(label + ".z"))};
}

EventSeries iid_uniform(std::size_t n, std::uint64_t seed)
{
    require_count(n);
    Rng rng(seed);
    std::vector<double> q(n);
    for (double& v : q) {
        v = rng.uniform();
    }
    return EventSeries(std::move(q), labelled("iid-uniform", seed));
}

EventSeries born_hits(const SlitScreenModel& model, std::size_t n, std::uint64_t seed)
{
    require_count(n);
    const ScreenCdf table(model);
    Rng rng(seed);
    std::vector<double> q(n);
    for (double& v : q) {
        v = table.inverse(rng.uniform());
    }
    return EventSeries(std::move(q), labelled("born-hits", seed));
}

EventSeries chaos_masked_hits(const EventSeries& base, const SlitScreenModel& model, MaskMapping mapping)
{
    const auto values = base.values();
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(values[i] >= 0.0 && values[i] <= 1.0)) {
            throw InvalidArgument(fmt::format("chaos masking needs base values in [0,1]; index {} is {}", i, values[i]));
        }
    }
    const ScreenCdf table(model);
    std::vector<double> out(values.size());
    if (mapping == MaskMapping::Value) {
        std::transform(values.begin(), values.end(), out.begin(), [&](double v) { return table.inverse(v); });
    } else {
        std::vector<std::size_t> order(values.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        const auto n = static_cast<double>(values.size());
        for (std::size_t rank = 0; rank < order.size(); ++rank) {
            out[order[rank]] = table.inverse((static_cast<double>(rank) + 0.5) / n);
        }
    }
    SeriesMetadata meta = base.metadata();
    meta.source_label = fmt::format("chaos-masked[{}]({})", mapping == MaskMapping::Rank ? "rank" : "value",
                                    base.label());
    meta.timestamps.clear();
    return EventSeries(std::move(out), std::move(meta));
}

EventSeries corrupt(const EventSeries& series, double dropout_rate, double noise_sigma, std::uint64_t seed)
{
    if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) {
        throw InvalidArgument(fmt::format("dropout rate must lie in [0,1), got {}", dropout_rate));
    }
    if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
        throw InvalidArgument(fmt::format("noise sigma must be finite and >= 0, got {}", noise_sigma));
    }
    if (dropout_rate == 0.0 && noise_sigma == 0.0) {
        return series;
    }
    // Separate streams so the kept subset does not depend on noise_sigma.
    Rng drop = Rng::stream(seed, 0);
    Rng noise = Rng::stream(seed, 1);
    const auto& meta_in = series.metadata();
    std::vector<double> out;
    std::vector<double> stamps;
    out.reserve(series.size());
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (drop.uniform() < dropout_rate) {
            continue;
        }
        out.push_back(noise_sigma > 0.0 ? series[i] + noise_sigma * noise.normal() : series[i]);
        if (!meta_in.timestamps.empty()) {
            stamps.push_back(meta_in.timestamps[i]);
        }
    }
    if (out.empty()) {
        throw InsufficientData("dropout removed every sample");
    }
    SeriesMetadata meta = meta_in;
    meta.source_label = fmt::format("corrupt(dropout={}, sigma={})[{}]", dropout_rate, noise_sigma, series.label());
    meta.seed = seed;
    meta.timestamps = std::move(stamps);
    return EventSeries(std::move(out), std::move(meta));
}

} // namespace takens
