#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "rdsync/family.hpp"
#include "rdsync/sync.hpp"

namespace rdsync {

/// Weighted point cloud in R^k (row-major points, weights summing to 1).
struct EmpiricalMeasure {
    enum class Provenance { Pullback, PushForward, User };

    std::size_t k = 1;
    std::vector<double> points;
    std::vector<double> weights;
    Provenance provenance = Provenance::User;
    std::size_t failures = 0; ///< pullback samples that hit n_max
    bool saturated = false;

    static EmpiricalMeasure uniform(std::size_t k, std::vector<double> points,
                                    Provenance provenance = Provenance::User);
    static EmpiricalMeasure dirac(std::span<const double> x);

    std::size_t size() const noexcept { return weights.size(); }
    std::span<const double> point(std::size_t i) const { return {points.data() + i * k, k}; }
    bool uniform_weights() const noexcept;
    /// Coordinate-wise weighted mean and variance.
    Point mean() const;
    Point variance() const;
    /// Checks shape, nonnegative weights summing to 1 within 1e-12 and finite points.
    void validate() const;
};

/// N pullback limits, sample i drawn from noise stream (seed, i). Throws
/// DiagnosticError if more than 1% of the samples fail to converge.
EmpiricalMeasure pullback_sample(const MapFamily& fam, std::uint64_t seed, std::size_t n, double tol,
                                 std::size_t n_max, std::span<const double> probe_points, unsigned threads = 1);

/// Advances every particle `steps` forward iterations with independent noise per particle.
EmpiricalMeasure push_forward(const MapFamily& fam, const EmpiricalMeasure& mu, std::size_t steps,
                              std::uint64_t seed, unsigned threads = 1);

struct TransportReport {
    enum class Method { Sorted1D, ExactMatching, Sliced };
    double distance = 0.0;
    Method method = Method::Sorted1D;
    std::size_t n_projections = 0;
};

std::string to_string(TransportReport::Method m);

/// Wasserstein-1 with taxicab ground metric: exact quantile coupling in 1D,
/// exact assignment for k > 1 and N <= 512, sliced approximation otherwise.
TransportReport wasserstein1(const EmpiricalMeasure& mu1, const EmpiricalMeasure& mu2, std::uint64_t seed = 0);

/// 1D W1 by integrating |F1 - F2|; accepts arbitrary weights.
double w1_sorted_1d(const EmpiricalMeasure& mu1, const EmpiricalMeasure& mu2);
/// Exact min-cost perfect matching between equal-size uniform clouds.
double w1_exact_matching(const EmpiricalMeasure& mu1, const EmpiricalMeasure& mu2);
/// Mean 1D W1 over `n_projections` seeded directions scaled to unit sup-norm
/// (a lower bound of the taxicab W1).
double w1_sliced(const EmpiricalMeasure& mu1, const EmpiricalMeasure& mu2, std::size_t n_projections,
                 std::uint64_t seed);

/// Minimum-cost assignment for a square row-major cost matrix (Hungarian
/// method, O(n^3)). Returns the column assigned to each row.
std::vector<std::size_t> min_cost_assignment(std::span<const double> cost, std::size_t n);

struct W1DecayCurve {
    std::vector<double> w1; ///< index n = 0..n_max
    RateFit fit;
    std::size_t reference_size = 0;
    bool coupled = true;
    bool bounded = true; ///< false triggers the bounded-support warning
    TransportReport::Method method = TransportReport::Method::Sorted1D;
};

/// W1(T^n sigma, piP) for n = 0..n_max, with (C, r) fitted over n = 1..n_max.
/// The stationary reference is a pullback sample of size n_ref. Coupled mode
/// advances the reference with the same noise as the particles (by
/// stationarity it stays a piP sample); uncoupled mode keeps it fixed.
W1DecayCurve w1_decay_curve(const MapFamily& fam, const EmpiricalMeasure& initial, std::size_t n_max,
                            std::size_t n_particles, std::uint64_t seed, double tol = 1e-9,
                            std::size_t n_ref = 4096, bool coupled = true, unsigned threads = 1);

/// Sampling noise floor: mean W1 between two independent pullback samples of
/// size n, averaged over `pairs` independent pairs.
double pullback_noise_floor(const MapFamily& fam, std::uint64_t seed, std::size_t n, double tol,
                            std::size_t n_max, unsigned threads = 1, std::size_t pairs = 8);

/// CSV: x_1..x_k, weight.
void write_measure_csv(std::ostream& os, const EmpiricalMeasure& mu, std::uint64_t seed);
/// Reads the format written by write_measure_csv ('#' lines and the header are skipped).
EmpiricalMeasure read_measure_csv(std::istream& is);

/// CSV: n, w1, c_rn_bound.
void write_decay_csv(std::ostream& os, const W1DecayCurve& curve, std::uint64_t seed);

} // namespace rdsync
