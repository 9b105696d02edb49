#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "rdsync/family.hpp"
#include "rdsync/transport.hpp"

namespace rdsync {

using ScalarFn = std::function<double(std::span<const double>)>;

/// A Lipschitz observable phi: R^k -> R minus a centering constant.
class Observable {
public:
    enum class Kind { Coordinate, Affine, Table };

    /// x_s (1-based s).
    static Observable coordinate(std::size_t k, std::size_t s);
    /// a . x + b.
    static Observable affine(Point a, double b);
    /// Nearest-neighbour (taxicab) lookup in a table of points and values.
    static Observable table(std::size_t k, std::vector<double> points, std::vector<double> values, double lipschitz);

    /// Parses "coord:<s>", "affine:<a1>,...,<ak>:<b>".
    static Observable parse(const std::string& spec, std::size_t k);

    Kind kind() const noexcept { return kind_; }
    std::size_t dim() const noexcept { return k_; }
    double lipschitz() const noexcept { return lipschitz_; }
    double center() const noexcept { return center_; }
    const std::string& label() const noexcept { return label_; }

    double operator()(std::span<const double> x) const;
    Observable centered(double c) const;
    Observable scaled(double factor) const;

private:
    Kind kind_ = Kind::Coordinate;
    std::size_t k_ = 1;
    Point a_;
    double b_ = 0.0;
    std::vector<double> table_points_;
    std::vector<double> table_values_;
    double lipschitz_ = 1.0;
    double scale_ = 1.0;
    double center_ = 0.0;
    std::string label_;
};

/// Estimate of the stationary mean of phi. For finite noise the pullback
/// points are stratified over all outer blocks of the largest length L with
/// q^L <= n (each stratum weighted by its exact probability); otherwise a
/// plain pullback average.
double stationary_mean(const MapFamily& fam, const ScalarFn& phi, std::size_t n, std::uint64_t seed,
                       double tol = 1e-12, unsigned threads = 1);

/// Observable centered by stationary_mean so that its stationary mean is ~0.
Observable center_observable(const MapFamily& fam, const Observable& phi, std::size_t n, std::uint64_t seed,
                             unsigned threads = 1);

/// (P phi)(x) = E phi(f_alpha(x)) on a flat grid. Finite noise with exact =
/// true sums over the symbols; otherwise averages over m i.i.d. draws.
std::vector<double> transfer_apply(const MapFamily& fam, const ScalarFn& phi, std::span<const double> grid,
                                   std::size_t m, std::uint64_t seed, bool exact);

/// Grid-values overload: phi off the grid by taxicab nearest neighbour.
std::vector<double> transfer_apply(const MapFamily& fam, std::span<const double> phi_values,
                                   std::span<const double> grid, std::size_t m, std::uint64_t seed, bool exact);

struct PoissonOptions {
    enum class Mode { Auto, Exact, MonteCarlo };
    std::size_t grid_size = 2048;
    double tol = 1e-6;
    std::size_t j_max = 200;
    std::size_t m0 = 0;              ///< steps exempt from the decay check
    Mode mode = Mode::Auto;          ///< Auto = Exact for finite noise
    std::size_t inner_samples = 1000; ///< Monte Carlo chains per grid point
    std::size_t exact_budget = std::size_t{1} << 22; ///< max enumerated blocks per point and level
    unsigned threads = 1;
};

struct PoissonSolution {
    std::size_t k = 1;
    std::vector<double> grid; ///< flat, grid_size x k
    std::vector<double> phi;
    std::vector<double> psi;
    std::vector<double> p_psi;
    std::size_t truncation = 0;      ///< J: psi = sum_{j=0}^{J} P^j phi
    std::vector<double> term_norms;  ///< sup over grid of |P^j phi|, j = 0..J
    double residual = 0.0;           ///< sup over grid of |psi - P psi - phi|
    bool exact = false;

    std::size_t size() const noexcept { return phi.size(); }
};

/// psi = sum_j P^j phi (Neumann series) on grid points taken from mu_sample.
/// Throws DiagnosticError (NoDecay) when the terms stop contracting.
PoissonSolution poisson_solve(const MapFamily& fam, const Observable& phi, const EmpiricalMeasure& mu_sample,
                              const PoissonOptions& opts, std::uint64_t seed);

struct SigmaEstimate {
    double sigma2_mg = 0.0;    ///< int psi^2 - int (P psi)^2
    double sigma2_resid = 0.0; ///< int (psi - P psi)^2
};

/// Both variance functionals over the grid (a mu-sample). Throws DiagnosticError if sigma2_mg <= 0.
SigmaEstimate sigma_estimate(const PoissonSolution& sol);

struct PathEnsemble {
    std::size_t n = 0;
    double sigma2 = 0.0;
    std::vector<double> t;              ///< time grid in [0, 1]
    std::vector<std::vector<double>> y; ///< [replica][t index]
    std::vector<double> s_n;            ///< raw sums sum_{j<n} phi(Z_j) per replica
};

/// Normalized partial sums Y(t) = sum_{j <= [nt]} phi(Z_j) / sqrt(sigma2 n).
/// Chains start at independent pullback points unless `start` is given.
PathEnsemble partial_sum_paths(const MapFamily& fam, const Observable& phi, double sigma2, std::size_t n,
                               std::vector<double> grid_t, std::size_t replicas, std::uint64_t seed,
                               unsigned threads = 1, std::optional<Point> start = std::nullopt);

struct CltReport {
    double sigma2_mg = 0.0;
    double sigma2_resid = 0.0;
    double sigma2_direct = 0.0; ///< Var(S_n) / n over replicas
    double ks_stat = 0.0;
    double p_value = 0.0;
    double variance_slope = 0.0;
    double increment_corr = 0.0;
    double mean_y1 = 0.0;
    double var_y1 = 0.0;
    double poisson_residual = 0.0;
    std::size_t truncation = 0;
    std::size_t replicas = 0;
    std::size_t n = 0;

    nlohmann::json to_json() const;
};

/// KS test of Y(1) against N(0, 1), slope of Var(Y(t)) on t and the mean
/// correlation of adjacent disjoint increments. Fills the path-derived fields.
CltReport fclt_tests(const PathEnsemble& paths);

/// CSV: replica, t, Y.
void write_paths_csv(std::ostream& os, const PathEnsemble& paths, std::uint64_t seed);

} // namespace rdsync
