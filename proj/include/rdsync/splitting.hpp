#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "rdsync/family.hpp"
#include "rdsync/order.hpp"

namespace rdsync {

/// Outcome of a J-splitting search. When verified, every block of set A maps
/// the probe into a box that is <_J the box of every block of set B.
struct SplittingReport {
    enum class Method { ExactScan, MonteCarlo };

    std::size_t m = 0;
    Method method = Method::ExactScan;
    bool verified = false;
    std::vector<NoiseValue> witness_a;
    std::vector<NoiseValue> witness_b;
    Box box_a;
    Box box_b;
    double mass_a = 0.0;
    double mass_b = 0.0;
    double stderr_a = 0.0; ///< zero for exact scans
    double stderr_b = 0.0;
    /// Exact scan only: the grown sets A and B.
    std::vector<std::vector<NoiseValue>> set_a;
    std::vector<std::vector<NoiseValue>> set_b;
    std::size_t blocks_examined = 0;

    /// 1 - min(mass_a, mass_b): the per-block escape bound for Sigma-set decay.
    double lambda() const noexcept;
    nlohmann::json to_json() const;
};

/// Enumerates all q^m blocks of a finite-noise family, looks for a pair of
/// ordered image boxes and greedily grows A and B by block mass.
/// verified = false means "not found", never "the condition fails".
SplittingReport exact_splitting_scan(const MapFamily& fam, const JOrder& ord, std::size_t m,
                                     std::span<const double> probe_points);

/// Monte Carlo variant for any noise: for m = 1..m_max draws n_blocks blocks
/// and tests all pairs. Masses are empirical frequencies with binomial stderr.
SplittingReport find_splitting_witness(const MapFamily& fam, const JOrder& ord, std::size_t m_max,
                                       std::span<const double> probe_points, std::size_t n_blocks,
                                       std::uint64_t seed);

struct SigmaDecaySeries {
    Point x;
    std::size_t s = 1; ///< 1-based coordinate
    std::size_t m = 1;
    std::size_t replicas = 0;
    std::vector<double> p_hat;   ///< index j-1 holds the estimate for j
    std::vector<double> stderr_; ///< binomial standard error of p_hat
    std::vector<double> mean_length; ///< mean length of the clipped projected hull
    double lambda_bound = 0.0;   ///< fitted lambda with p_hat_j ~ lambda^j
    /// First j at which the estimate hit zero; the series stops there.
    std::optional<std::size_t> zero_at;
};

/// Estimates P(x_s lies in the s-th projection of the probe image under
/// f_{X_0} o ... o f_{X_{jm-1}}) for j = 1..j_max over `replicas` noise streams.
/// Projected hulls are clipped to [-window, window] for mean_length.
SigmaDecaySeries sigma_decay(const MapFamily& fam, std::size_t m, std::span<const double> x, std::size_t s,
                             std::size_t j_max, std::size_t replicas, std::span<const double> probe_points,
                             std::uint64_t seed, unsigned threads = 1, double window = 1e6);

/// CSV: j, p_hat, stderr, lambda_pow_j.
void write_sigma_csv(std::ostream& os, const SigmaDecaySeries& series, std::uint64_t seed);

} // namespace rdsync
