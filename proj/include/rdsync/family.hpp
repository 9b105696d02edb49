#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "rdsync/common.hpp"
#include "rdsync/order.hpp"

namespace rdsync {

/// A noise value. Finite noise uses the 1-based symbol index 1..q; uniform
/// noise uses the real value itself.
using NoiseValue = double;

/// The law of the i.i.d. driving noise.
class NoiseSpec {
public:
    enum class Kind { Finite, Uniform };

    /// Symbols 1..q with the given probabilities (must sum to 1 within 1e-12).
    static NoiseSpec finite(std::vector<double> probs);
    /// Uniform on [lo, hi].
    static NoiseSpec uniform(double lo, double hi);

    Kind kind() const noexcept { return kind_; }
    bool is_finite() const noexcept { return kind_ == Kind::Finite; }
    std::size_t symbols() const noexcept { return probs_.size(); }
    const std::vector<double>& probs() const noexcept { return probs_; }
    /// Probability of symbol s (1-based).
    double prob(std::size_t s) const { return probs_.at(s - 1); }
    double lo() const noexcept { return lo_; }
    double hi() const noexcept { return hi_; }

    /// Inverse-CDF transform of a uniform draw in [0, 1).
    NoiseValue from_uniform(double u) const noexcept;

    nlohmann::json to_json() const;

private:
    Kind kind_ = Kind::Finite;
    std::vector<double> probs_;
    std::vector<double> cumulative_;
    double lo_ = 0.0;
    double hi_ = 0.0;
};

/// A measurable family {f_alpha} on a subset of R^k together with its noise law.
/// Immutable after construction.
class MapFamily {
public:
    static constexpr double default_clamp = 1e300;

    /// out = f_alpha(x), before clamping. `out` never aliases `x`.
    using Kernel = std::function<void(NoiseValue alpha, std::span<const double> x, std::span<double> out)>;

    MapFamily(std::string name, std::size_t k, NoiseSpec noise, Kernel kernel, std::optional<Box> domain,
              Box probe, double clamp = default_clamp);

    const std::string& name() const noexcept { return name_; }
    std::size_t dim() const noexcept { return k_; }
    const NoiseSpec& noise() const noexcept { return noise_; }
    /// The invariant set S when it is a box; nullopt means all of R^k.
    const std::optional<Box>& domain() const noexcept { return domain_; }
    /// Bounded box standing in for S in set computations (equals the domain when bounded).
    const Box& probe() const noexcept { return probe_; }
    double clamp_bound() const noexcept { return clamp_; }

    /// out = f_alpha(x) clamped to [-M, M]^k. Returns true if any coordinate saturated.
    bool apply_into(NoiseValue alpha, std::span<const double> x, std::span<double> out) const;
    Point apply(NoiseValue alpha, std::span<const double> x, bool* saturated = nullptr) const;

    /// Same maps and noise with a different domain, probe box and clamp bound.
    MapFamily with_bounds(std::optional<Box> domain, Box probe, double clamp) const;

    /// Resolved configuration document (echoed into run manifests).
    const nlohmann::json& config() const noexcept { return config_; }
    void set_config(nlohmann::json cfg) { config_ = std::move(cfg); }

private:
    std::string name_;
    std::size_t k_;
    NoiseSpec noise_;
    Kernel kernel_;
    std::optional<Box> domain_;
    Box probe_;
    double clamp_;
    nlohmann::json config_;
};

/// Applies f_{block[0]} o ... o f_{block[m-1]} (last symbol first) to every
/// point of the flat cloud in place. Returns true on saturation.
bool compose_in_place(const MapFamily& fam, std::span<const NoiseValue> block, std::span<double> cloud);

/// Bounding box of the image of `probe_points` under f_{block[0]} o ... o f_{block[m-1]}.
Box image_box(const MapFamily& fam, std::span<const NoiseValue> block, std::span<const double> probe_points,
              bool* saturated = nullptr);

/// All 2^k corners (when k <= 10) followed by `interior` Halton points of the box.
std::vector<double> probe_cloud(const Box& box, std::size_t interior = 32);

struct MonotonicityVerdict {
    enum class Kind { Increasing, Decreasing, Neither };
    struct Witness {
        Point x, y;
        Point fx, fy;
    };
    Kind kind = Kind::Neither;
    std::optional<Witness> witness;
    std::size_t pairs_tested = 0;
};

std::string to_string(MonotonicityVerdict::Kind k);

/// Empirical J-monotonicity of f_alpha on `probe` from n_pairs random comparable pairs.
/// Throws DiagnosticError if fewer than n_pairs comparable pairs turn up in 100*n_pairs draws.
MonotonicityVerdict classify_monotonicity(const MapFamily& fam, NoiseValue alpha, const JOrder& ord,
                                          const Box& probe, std::size_t n_pairs, std::uint64_t seed);

namespace families {

/// f1(x) = x/3, f2(x) = x/3 + 2/3 on [0, 1].
MapFamily cantor1d(std::vector<double> probs = {0.5, 0.5});
/// f_i(x, y) = (x/3, y/3) + b_i, b1 = (0, 0), b2 = (2/3, -2/3), on R^2.
MapFamily cantor2d(std::vector<double> probs = {0.5, 0.5});
/// f1(x) = e^x, f2(x) = -e^x on R.
MapFamily exp1d(std::vector<double> probs = {0.5, 0.5});
/// Single J-decreasing map (x, y) -> (atan(y - x), e^(x - y)), J = {1}.
MapFamily fig1_2d();
/// Slopes 2 and 1/2. Plain: f1 = 2x, f2 = x/2 on R, Lyapunov exponent (p1 - p2) log 2.
/// Disjoint: f1 = min(2x, 1/3), f2 = x/2 + 1/2 on [0, 1] (images [0,1/3] and [1/2,1]).
MapFamily lip_pair(std::vector<double> probs = {0.5, 0.5}, bool disjoint = false);

struct AffineMap {
    std::vector<std::vector<double>> a; // k x k
    Point b;
};
/// f_i(x) = A_i x + b_i.
MapFamily affine(std::vector<AffineMap> maps, std::vector<double> probs, std::optional<Box> domain, Box probe);
/// f_i(x) = c_i for every x.
MapFamily constant(std::vector<Point> values, std::vector<double> probs = {});
/// Plane rotations about the origin by the given angles (radians).
MapFamily rotations(std::vector<double> angles, std::vector<double> probs = {});
/// f_alpha(x) = slope * x + alpha, alpha ~ U[lo, hi], 0 < slope < 1.
MapFamily noisy_contraction(double slope, double lo, double hi);

} // namespace families

/// Builds a family from a configuration document such as
/// {"family": "cantor1d", "probs": [0.5, 0.5], "clamp": 1e300}.
/// Throws UsageError on unknown families or bad keys.
MapFamily make_family(const nlohmann::json& cfg);

/// Names accepted by make_family.
std::vector<std::string> family_names();

} // namespace rdsync
