#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rdsync/common.hpp"

namespace rdsync {

/// The partial order <_J on R^k: x <_J y iff x_i < y_i for i in J and
/// x_i > y_i for i not in J. Coordinates are 0-based internally; the
/// external (config/CLI) form of J is 1-based.
class JOrder {
public:
    static constexpr double default_strict_tol = 1e-12;

    JOrder(std::size_t k, std::vector<std::size_t> j_one_based, double strict_tol = default_strict_tol);

    /// J = {1..k}: the componentwise order.
    static JOrder componentwise(std::size_t k, double strict_tol = default_strict_tol);

    std::size_t dim() const noexcept { return k_; }
    double strict_tol() const noexcept { return strict_tol_; }
    bool in_j(std::size_t i) const noexcept { return in_j_[i]; }
    /// J as sorted 1-based indices.
    std::vector<std::size_t> members() const;

private:
    std::size_t k_;
    std::vector<bool> in_j_;
    double strict_tol_;
};

enum class PointOrder { Less, Greater, Equal, Incomparable };
enum class SetOrder { Less, Greater, Inconclusive };

std::string to_string(PointOrder o);
std::string to_string(SetOrder o);

/// Axis-aligned box lo <= hi; the bounding-box stand-in for a set.
struct Box {
    Point lo;
    Point hi;

    Box() = default;
    Box(Point lo_, Point hi_);

    static Box of_point(std::span<const double> p);
    /// Bounding box of a flat row-major cloud of `dim`-vectors.
    static Box hull(std::span<const double> flat, std::size_t dim);

    std::size_t dim() const noexcept { return lo.size(); }
    double span(std::size_t i) const noexcept { return hi[i] - lo[i]; }
    /// Taxicab diameter: sum of coordinate spans.
    double diameter() const noexcept;
    Point center() const;
    bool contains(std::span<const double> p, double tol = 0.0) const;
    /// this is a subset of `outer` inflated by tol.
    bool inside(const Box& outer, double tol = 0.0) const;
    void expand(std::span<const double> p);
    void expand(const Box& other);
    /// All 2^k corners, flat row-major.
    std::vector<double> corners() const;
};

PointOrder cmp_points(std::span<const double> x, std::span<const double> y, const JOrder& ord);

/// Conservative set order: Less only when every point of b1 is <_J every
/// point of b2 by more than strict_tol on every coordinate.
SetOrder cmp_boxes(const Box& b1, const Box& b2, const JOrder& ord);

/// True iff the coordinate intervals of b1 and b2 are disjoint on every axis.
bool projections_disjoint(const Box& b1, const Box& b2);

} // namespace rdsync
