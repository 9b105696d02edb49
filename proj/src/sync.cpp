#include "rdsync/sync.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "rdsync/engine.hpp"
#include "rdsync/io.hpp"
#include "rdsync/parallel.hpp"
#include "rdsync/random.hpp"
#include "rdsync/stats.hpp"

namespace rdsync {

namespace {

// Common-hull diameters at or above this are treated as unbounded.
constexpr double unbounded_diameter = 1e100;

} // namespace

std::vector<double> DiamSeries::mean() const
{
    std::vector<double> out(n_max + 1, 0.0);
    for (const auto& row : diam)
        for (std::size_t n = 0; n <= n_max; ++n)
            out[n] += row[n];
    for (double& v : out)
        v /= static_cast<double>(diam.size());
    return out;
}

std::vector<double> DiamSeries::quantile(double q) const
{
    std::vector<double> out(n_max + 1);
    std::vector<double> col(diam.size());
    for (std::size_t n = 0; n <= n_max; ++n) {
        for (std::size_t r = 0; r < diam.size(); ++r)
            col[r] = diam[r][n];
        out[n] = stats::quantile(col, q);
    }
    return out;
}

DiamSeries diameter_series(const MapFamily& fam, std::span<const double> probe_points, std::size_t n_max,
                           std::size_t replicas, std::uint64_t seed, unsigned threads,
                           std::optional<std::size_t> m0_override)
{
    const std::size_t k = fam.dim();
    require(!probe_points.empty() && probe_points.size() % k == 0, "diameter_series: bad probe cloud");
    require(replicas >= 1, "diameter_series: replicas must be >= 1");

    const std::uint64_t sub = derive_seed(seed, "diameter");
    std::vector<std::vector<double>> diam(replicas, std::vector<double>(n_max + 1));
    std::vector<std::vector<Box>> boxes(replicas, std::vector<Box>(n_max + 1));
    std::vector<std::vector<unsigned char>> sat(replicas, std::vector<unsigned char>(n_max + 1, 0));
    const Box probe_box = Box::hull(probe_points, k);

    parallel_for(replicas, threads, [&](std::size_t r) {
        const NoiseBlock block = sample_block(fam.noise(), sub, r, n_max);
        const std::span<const NoiseValue> values(block.values);
        diam[r][0] = probe_box.diameter();
        boxes[r][0] = probe_box;
        std::vector<double> cloud;
        for (std::size_t n = 1; n <= n_max; ++n) {
            cloud.assign(probe_points.begin(), probe_points.end());
            sat[r][n] = compose_in_place(fam, values.first(n), cloud) ? 1 : 0;
            boxes[r][n] = Box::hull(cloud, k);
            diam[r][n] = boxes[r][n].diameter();
        }
    });

    DiamSeries out;
    out.seed = seed;
    out.n_max = n_max;
    out.diam = std::move(diam);
    out.common_diam.resize(n_max + 1);
    std::vector<bool> step_ok(n_max + 1, true);
    for (std::size_t n = 0; n <= n_max; ++n) {
        Box hull = boxes[0][n];
        for (std::size_t r = 0; r < replicas; ++r) {
            hull.expand(boxes[r][n]);
            if (sat[r][n]) {
                step_ok[n] = false;
                out.saturated = true;
            }
        }
        out.common_diam[n] = hull.diameter();
        if (!(out.common_diam[n] < unbounded_diameter))
            step_ok[n] = false;
    }

    // m0: first step whose common hull is finite and no larger than 10x the
    // median common-hull diameter, with every later step finite as well.
    const double median = stats::quantile(out.common_diam, 0.5);
    std::optional<std::size_t> m0;
    for (std::size_t n = 0; n <= n_max && !m0; ++n) {
        if (!step_ok[n] || out.common_diam[n] > 10.0 * median)
            continue;
        if (std::all_of(step_ok.begin() + static_cast<std::ptrdiff_t>(n), step_ok.end(), [](bool b) { return b; }))
            m0 = n;
    }
    out.bounded = m0.has_value();
    out.m0 = m0_override ? *m0_override : m0.value_or(0);
    if (m0_override) {
        out.bounded = *m0_override <= n_max &&
                      std::all_of(step_ok.begin() + static_cast<std::ptrdiff_t>(std::min(*m0_override, n_max)),
                                  step_ok.end(), [](bool b) { return b; });
    }
    return out;
}

nlohmann::json RateFit::to_json() const
{
    return nlohmann::json{{"r_hat", r_hat},         {"c_hat", c_hat},     {"c_bound", c_bound}, {"r_ci", {ci_lo, ci_hi}},
                          {"n_range", {n_first, n_last}}, {"r_squared", r_squared}, {"degenerate", degenerate},
                          {"warning", warning}};
}

RateFit fit_log_linear(std::span<const double> steps, std::span<const double> values, double floor,
                       std::size_t min_points)
{
    require(steps.size() == values.size(), "fit_log_linear: size mismatch");
    std::vector<double> xs, ys;
    RateFit fit;
    for (std::size_t i = 0; i < steps.size(); ++i) {
        if (!(values[i] > floor) || !std::isfinite(values[i]))
            continue;
        if (xs.empty())
            fit.n_first = static_cast<std::size_t>(steps[i]);
        fit.n_last = static_cast<std::size_t>(steps[i]);
        xs.push_back(steps[i]);
        ys.push_back(std::log(values[i]));
    }
    if (xs.size() < std::max<std::size_t>(min_points, 2)) {
        fit.degenerate = true;
        fit.r_hat = 0.0;
        fit.c_hat = 0.0;
        return fit;
    }
    const auto line = stats::least_squares(xs, ys);
    fit.r_hat = std::exp(line.slope);
    fit.c_hat = std::exp(line.intercept);
    fit.c_bound = fit.c_hat;
    for (std::size_t i = 0; i < xs.size(); ++i)
        fit.c_bound = std::max(fit.c_bound, std::exp(ys[i] - xs[i] * line.slope));
    fit.r_squared = line.r_squared;
    fit.ci_lo = fit.ci_hi = fit.r_hat;
    fit.warning = fit.r_hat >= 1.0;
    return fit;
}

namespace {

// Noise floor for log fits of diameters.
constexpr double diameter_floor = 1e3 * std::numeric_limits<double>::epsilon();

RateFit fit_window(const std::vector<double>& mean, std::size_t first)
{
    std::vector<double> steps, vals;
    for (std::size_t n = first; n < mean.size(); ++n) {
        steps.push_back(static_cast<double>(n));
        vals.push_back(mean[n]);
    }
    return fit_log_linear(steps, vals, diameter_floor);
}

} // namespace

RateFit fit_rate(const DiamSeries& series, std::size_t bootstrap, std::uint64_t seed)
{
    const std::size_t first = std::max<std::size_t>(series.m0, 1);
    RateFit fit = fit_window(series.mean(), first);
    if (fit.degenerate || bootstrap == 0)
        return fit;

    const std::size_t reps = series.replicas();
    StreamCursor rng(derive_seed(seed, "bootstrap"), 0);
    std::vector<double> rs;
    std::vector<double> mean(series.n_max + 1);
    for (std::size_t b = 0; b < bootstrap; ++b) {
        std::fill(mean.begin(), mean.end(), 0.0);
        for (std::size_t i = 0; i < reps; ++i) {
            const auto& row = series.diam[rng.below(reps)];
            for (std::size_t n = 0; n <= series.n_max; ++n)
                mean[n] += row[n] / static_cast<double>(reps);
        }
        const RateFit bf = fit_window(mean, first);
        if (!bf.degenerate)
            rs.push_back(bf.r_hat);
    }
    if (!rs.empty()) {
        fit.ci_lo = stats::quantile(rs, 0.025);
        fit.ci_hi = stats::quantile(rs, 0.975);
    }
    return fit;
}

void write_diam_csv(std::ostream& os, const DiamSeries& series, const RateFit& fit)
{
    io::csv_header(os, series.seed, {"n", "mean_diam", "q05", "q95", "bound_c_rn"},
                   "replicas=" + std::to_string(series.replicas()) + " m0=" + std::to_string(series.m0));
    const auto mean = series.mean();
    const auto q05 = series.quantile(0.05);
    const auto q95 = series.quantile(0.95);
    for (std::size_t n = 0; n <= series.n_max; ++n) {
        const double bound = fit.degenerate ? 0.0 : fit.c_bound * std::pow(fit.r_hat, static_cast<double>(n));
        io::csv_row(os, {std::to_string(n), io::num(mean[n]), io::num(q05[n]), io::num(q95[n]), io::num(bound)});
    }
}

GapSeries forward_attractor_gap(const MapFamily& fam, std::uint64_t seed, std::span<const double> x0,
                                std::size_t n_max, double tail_tol, std::span<const double> probe_points,
                                std::size_t inner_max)
{
    const std::size_t k = fam.dim();
    require_dim(x0.size(), k, "forward_attractor_gap x0");
    require(n_max >= 1, "forward_attractor_gap: n must be >= 1");
    const NoiseBlock forward = sample_block(fam.noise(), derive_seed(seed, "forward"), 0, n_max);
    const OrbitTrace orbit = forward_orbit(fam, forward, x0, probe_points);

    GapSeries out;
    for (std::size_t n = 1; n <= n_max; ++n) {
        // Outermost first: omega_{n-1}, ..., omega_0, then fresh noise for omega_{-1}, omega_{-2}, ...
        const NoiseStream past(fam.noise(), derive_seed(seed, "pullback", n), 0);
        const auto outer = [&](std::size_t i) { return i < n ? forward.values[n - 1 - i] : past(i - n); };
        const PullbackResult pb = pullback_limit(fam, outer, probe_points, tail_tol, n + inner_max);
        if (!pb.converged)
            throw NotConverged(n + inner_max, pb.diameter);
        out.n.push_back(n);
        out.gap.push_back(l1_distance(orbit.positions[n], pb.point));
        out.image_diam.push_back(orbit.boxes[n].diameter());
        out.inner_depth.push_back(pb.depth);
    }
    return out;
}

void write_gap_csv(std::ostream& os, const GapSeries& series, std::uint64_t seed)
{
    io::csv_header(os, seed, {"n", "gap", "image_diam"});
    for (std::size_t i = 0; i < series.n.size(); ++i)
        io::csv_row(os, {std::to_string(series.n[i]), io::num(series.gap[i]), io::num(series.image_diam[i])});
}

} // namespace rdsync
