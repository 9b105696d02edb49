#include "rdsync/order.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rdsync {

double l1_distance(std::span<const double> a, std::span<const double> b)
{
    require_dim(b.size(), a.size(), "l1_distance");
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        d += std::abs(a[i] - b[i]);
    return d;
}

JOrder::JOrder(std::size_t k, std::vector<std::size_t> j_one_based, double strict_tol)
    : k_(k), in_j_(k, false), strict_tol_(strict_tol)
{
    require(k >= 1, "JOrder: dimension must be >= 1");
    require(strict_tol >= 0.0 && std::isfinite(strict_tol), "JOrder: strict_tol must be finite and >= 0");
    for (std::size_t j : j_one_based) {
        require(j >= 1 && j <= k, "JOrder: J index " + std::to_string(j) + " outside 1.." + std::to_string(k));
        in_j_[j - 1] = true;
    }
}

JOrder JOrder::componentwise(std::size_t k, double strict_tol)
{
    std::vector<std::size_t> all(k);
    for (std::size_t i = 0; i < k; ++i)
        all[i] = i + 1;
    return JOrder(k, std::move(all), strict_tol);
}

std::vector<std::size_t> JOrder::members() const
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < k_; ++i)
        if (in_j_[i])
            out.push_back(i + 1);
    return out;
}

std::string to_string(PointOrder o)
{
    switch (o) {
    case PointOrder::Less: return "Less";
    case PointOrder::Greater: return "Greater";
    case PointOrder::Equal: return "Equal";
    case PointOrder::Incomparable: return "Incomparable";
    }
    return "?";
}

std::string to_string(SetOrder o)
{
    switch (o) {
    case SetOrder::Less: return "Less";
    case SetOrder::Greater: return "Greater";
    case SetOrder::Inconclusive: return "Inconclusive";
    }
    return "?";
}

Box::Box(Point lo_, Point hi_) : lo(std::move(lo_)), hi(std::move(hi_))
{
    require_dim(hi.size(), lo.size(), "Box");
    for (std::size_t i = 0; i < lo.size(); ++i)
        require(lo[i] <= hi[i], "Box: lo > hi on coordinate " + std::to_string(i + 1));
}

Box Box::of_point(std::span<const double> p)
{
    Box b;
    b.lo.assign(p.begin(), p.end());
    b.hi = b.lo;
    return b;
}

Box Box::hull(std::span<const double> flat, std::size_t dim)
{
    require(dim > 0 && !flat.empty() && flat.size() % dim == 0, "Box::hull: empty or ragged cloud");
    Box b = of_point(flat.subspan(0, dim));
    for (std::size_t off = dim; off < flat.size(); off += dim)
        b.expand(flat.subspan(off, dim));
    return b;
}

double Box::diameter() const noexcept
{
    double d = 0.0;
    for (std::size_t i = 0; i < lo.size(); ++i)
        d += hi[i] - lo[i];
    return d;
}

Point Box::center() const
{
    Point c(lo.size());
    for (std::size_t i = 0; i < lo.size(); ++i)
        c[i] = 0.5 * (lo[i] + hi[i]);
    return c;
}

bool Box::contains(std::span<const double> p, double tol) const
{
    require_dim(p.size(), dim(), "Box::contains");
    for (std::size_t i = 0; i < lo.size(); ++i)
        if (p[i] < lo[i] - tol || p[i] > hi[i] + tol)
            return false;
    return true;
}

bool Box::inside(const Box& outer, double tol) const
{
    require_dim(outer.dim(), dim(), "Box::inside");
    for (std::size_t i = 0; i < lo.size(); ++i)
        if (lo[i] < outer.lo[i] - tol || hi[i] > outer.hi[i] + tol)
            return false;
    return true;
}

void Box::expand(std::span<const double> p)
{
    for (std::size_t i = 0; i < lo.size(); ++i) {
        lo[i] = std::min(lo[i], p[i]);
        hi[i] = std::max(hi[i], p[i]);
    }
}

void Box::expand(const Box& other)
{
    expand(other.lo);
    expand(other.hi);
}

std::vector<double> Box::corners() const
{
    const std::size_t k = dim();
    require(k <= 20, "Box::corners: dimension too large to enumerate corners");
    const std::size_t n = std::size_t{1} << k;
    std::vector<double> out(n * k);
    for (std::size_t c = 0; c < n; ++c)
        for (std::size_t i = 0; i < k; ++i)
            out[c * k + i] = ((c >> i) & 1U) ? hi[i] : lo[i];
    return out;
}

PointOrder cmp_points(std::span<const double> x, std::span<const double> y, const JOrder& ord)
{
    require_dim(x.size(), ord.dim(), "cmp_points");
    require_dim(y.size(), ord.dim(), "cmp_points");
    const double tol = ord.strict_tol();
    bool less = true;
    bool greater = true;
    bool equal = true;
    for (std::size_t i = 0; i < x.size(); ++i) {
        // Orient every coordinate so that "x below y" means x <_J y.
        const double d = ord.in_j(i) ? y[i] - x[i] : x[i] - y[i];
        if (!(d > tol))
            less = false;
        if (!(d < -tol))
            greater = false;
        if (!(std::abs(d) <= tol))
            equal = false;
    }
    if (less)
        return PointOrder::Less;
    if (greater)
        return PointOrder::Greater;
    if (equal)
        return PointOrder::Equal;
    return PointOrder::Incomparable;
}

namespace {

bool box_less(const Box& a, const Box& b, const JOrder& ord)
{
    const double tol = ord.strict_tol();
    for (std::size_t i = 0; i < a.dim(); ++i) {
        if (ord.in_j(i)) {
            if (!(a.hi[i] + tol < b.lo[i]))
                return false;
        } else {
            if (!(a.lo[i] - tol > b.hi[i]))
                return false;
        }
    }
    return true;
}

} // namespace

SetOrder cmp_boxes(const Box& b1, const Box& b2, const JOrder& ord)
{
    require_dim(b1.dim(), ord.dim(), "cmp_boxes");
    require_dim(b2.dim(), ord.dim(), "cmp_boxes");
    if (box_less(b1, b2, ord))
        return SetOrder::Less;
    if (box_less(b2, b1, ord))
        return SetOrder::Greater;
    return SetOrder::Inconclusive;
}

bool projections_disjoint(const Box& b1, const Box& b2)
{
    require_dim(b2.dim(), b1.dim(), "projections_disjoint");
    for (std::size_t i = 0; i < b1.dim(); ++i)
        if (!(b1.hi[i] < b2.lo[i] || b2.hi[i] < b1.lo[i]))
            return false;
    return true;
}

} // namespace rdsync
