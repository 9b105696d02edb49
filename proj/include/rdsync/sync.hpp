#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "rdsync/family.hpp"

namespace rdsync {

/// Per-replica taxicab diameters d_r(n) of the probe image under the
/// reverse-order composition f_{X_0} o ... o f_{X_{n-1}}, n = 0..n_max.
struct DiamSeries {
    std::uint64_t seed = 0;
    std::size_t n_max = 0;
    std::vector<std::vector<double>> diam; ///< [replica][n]
    std::vector<double> common_diam;       ///< diameter of the hull of all replica boxes at step n
    std::size_t m0 = 0;                    ///< burn-in after which the images stay in a common bounded box
    bool bounded = false;                  ///< boundedness of the images from m0 on was detected
    bool saturated = false;

    std::size_t replicas() const noexcept { return diam.size(); }
    std::vector<double> mean() const;
    /// Per-step empirical quantile across replicas (linear interpolation).
    std::vector<double> quantile(double q) const;
};

/// m0_override replaces the automatic burn-in detection.
DiamSeries diameter_series(const MapFamily& fam, std::span<const double> probe_points, std::size_t n_max,
                           std::size_t replicas, std::uint64_t seed, unsigned threads = 1,
                           std::optional<std::size_t> m0_override = std::nullopt);

/// Fitted values ~ c * r^n over a window of steps.
struct RateFit {
    double r_hat = 0.0;
    double c_hat = 0.0;   ///< least-squares intercept
    double c_bound = 0.0; ///< smallest C with value <= C r_hat^n over the fit window
    double ci_lo = 0.0; ///< bootstrap 95% interval for r (equal to r_hat when not bootstrapped)
    double ci_hi = 0.0;
    std::size_t n_first = 0;
    std::size_t n_last = 0;
    double r_squared = 0.0;
    bool degenerate = false; ///< fewer than 5 usable steps: r_hat = 0 by convention
    bool warning = false;    ///< r_hat >= 1: no contraction observed

    nlohmann::json to_json() const;
};

/// Ordinary least squares of log(values[i]) on steps[i]. Points with
/// values below `floor` are dropped; fewer than `min_points` usable points
/// yields a degenerate fit.
RateFit fit_log_linear(std::span<const double> steps, std::span<const double> values, double floor,
                       std::size_t min_points = 5);

/// Log-linear fit of the replica-mean diameter for n >= max(m0, 1), with a
/// bootstrap interval over replicas.
RateFit fit_rate(const DiamSeries& series, std::size_t bootstrap = 200, std::uint64_t seed = 0);

/// CSV: n, mean_diam, q05, q95, bound_c_rn.
void write_diam_csv(std::ostream& os, const DiamSeries& series, const RateFit& fit);

struct GapSeries {
    std::vector<std::size_t> n;
    std::vector<double> gap;        ///< taxicab distance between Z_n(x0) and pi(sigma^n omega)
    std::vector<double> image_diam; ///< diameter of the n-step forward image of the probe cloud
    std::vector<std::size_t> inner_depth;
};

/// Distance between the forward orbit Z_n(x0) and the pullback point
/// pi(sigma^n omega) for n = 1..n_max. The pullback uses the same noise at
/// indices n-1, ..., 0 and fresh noise beyond. Throws NotConverged.
GapSeries forward_attractor_gap(const MapFamily& fam, std::uint64_t seed, std::span<const double> x0,
                                std::size_t n_max, double tail_tol, std::span<const double> probe_points,
                                std::size_t inner_max = 400);

/// CSV: n, gap, image_diam.
void write_gap_csv(std::ostream& os, const GapSeries& series, std::uint64_t seed);

} // namespace rdsync
