#include "rdsync/engine.hpp"

#include <ostream>
#include <string>

#include "rdsync/io.hpp"

namespace rdsync {

NoiseBlock sample_block(const NoiseSpec& noise, std::uint64_t seed, std::uint64_t stream_id, std::size_t n)
{
    NoiseBlock block{std::vector<NoiseValue>(n), seed, stream_id};
    const NoiseStream stream(noise, seed, stream_id);
    for (std::size_t j = 0; j < n; ++j)
        block.values[j] = stream(j);
    return block;
}

namespace {

// Applies f_{block[0]} o ... o f_{block[len-1]} to a single point.
bool compose_point(const MapFamily& fam, std::span<const NoiseValue> block, std::span<const double> x,
                   std::span<double> out, Point& scratch)
{
    std::copy(x.begin(), x.end(), out.begin());
    bool saturated = false;
    for (std::size_t j = block.size(); j-- > 0;) {
        saturated |= fam.apply_into(block[j], out, scratch);
        std::copy(scratch.begin(), scratch.end(), out.begin());
    }
    return saturated;
}

OrbitTrace start_trace(const MapFamily& fam, Direction dir, const NoiseBlock& block, std::span<const double> x0,
                       std::span<const double> probe_points)
{
    require_dim(x0.size(), fam.dim(), "orbit x0");
    require(probe_points.size() % fam.dim() == 0, "orbit: ragged probe cloud");
    OrbitTrace t;
    t.direction = dir;
    t.block = block;
    t.positions.reserve(block.values.size() + 1);
    t.positions.emplace_back(x0.begin(), x0.end());
    t.step_saturated.push_back(false);
    if (!probe_points.empty())
        t.boxes.push_back(Box::hull(probe_points, fam.dim()));
    return t;
}

} // namespace

OrbitTrace forward_orbit(const MapFamily& fam, const NoiseBlock& block, std::span<const double> x0,
                         std::span<const double> probe_points)
{
    OrbitTrace t = start_trace(fam, Direction::Forward, block, x0, probe_points);
    std::vector<double> cloud(probe_points.begin(), probe_points.end());
    for (NoiseValue a : block.values) {
        bool sat = false;
        t.positions.push_back(fam.apply(a, t.positions.back(), &sat));
        if (!cloud.empty()) {
            sat |= compose_in_place(fam, std::span<const NoiseValue>(&a, 1), cloud);
            t.boxes.push_back(Box::hull(cloud, fam.dim()));
        }
        t.step_saturated.push_back(sat);
        t.saturated |= sat;
    }
    return t;
}

OrbitTrace reverse_orbit(const MapFamily& fam, const NoiseBlock& block, std::span<const double> x0,
                         std::span<const double> probe_points)
{
    OrbitTrace t = start_trace(fam, Direction::Reverse, block, x0, probe_points);
    const std::span<const NoiseValue> values(block.values);
    Point scratch(fam.dim());
    for (std::size_t j = 1; j <= values.size(); ++j) {
        const auto prefix = values.first(j);
        Point p(fam.dim());
        bool sat = compose_point(fam, prefix, x0, p, scratch);
        t.positions.push_back(std::move(p));
        if (!probe_points.empty()) {
            std::vector<double> cloud(probe_points.begin(), probe_points.end());
            sat |= compose_in_place(fam, prefix, cloud);
            t.boxes.push_back(Box::hull(cloud, fam.dim()));
        }
        t.step_saturated.push_back(sat);
        t.saturated |= sat;
    }
    return t;
}

void write_orbit_csv(std::ostream& os, const OrbitTrace& trace)
{
    const std::size_t k = trace.positions.empty() ? 0 : trace.positions.front().size();
    std::vector<std::string> cols{"step"};
    for (std::size_t i = 1; i <= k; ++i)
        cols.push_back("x_" + std::to_string(i));
    const bool with_boxes = !trace.boxes.empty();
    if (with_boxes) {
        for (std::size_t i = 1; i <= k; ++i)
            cols.push_back("box_lo_" + std::to_string(i));
        for (std::size_t i = 1; i <= k; ++i)
            cols.push_back("box_hi_" + std::to_string(i));
    }
    cols.push_back("saturated");
    const std::string extra = "stream_id=" + std::to_string(trace.block.stream_id) +
                              " direction=" + (trace.direction == Direction::Forward ? "forward" : "reverse");
    io::csv_header(os, trace.block.seed, cols, extra);
    for (std::size_t j = 0; j < trace.positions.size(); ++j) {
        std::vector<std::string> row{std::to_string(j)};
        for (double v : trace.positions[j])
            row.push_back(io::num(v));
        if (with_boxes) {
            for (double v : trace.boxes[j].lo)
                row.push_back(io::num(v));
            for (double v : trace.boxes[j].hi)
                row.push_back(io::num(v));
        }
        row.push_back(trace.step_saturated[j] ? "1" : "0");
        io::csv_row(os, row);
    }
}

NotConverged::NotConverged(std::size_t n_max_, double last_diameter_)
    : DiagnosticError("pullback did not converge within " + std::to_string(n_max_) +
                      " steps (last diameter " + io::num(last_diameter_) + ")"),
      n_max(n_max_), last_diameter(last_diameter_)
{
}

PullbackResult pullback_limit(const MapFamily& fam, const std::function<NoiseValue(std::size_t)>& outer,
                              std::span<const double> probe_points, double tol, std::size_t n_max)
{
    const std::size_t k = fam.dim();
    require(tol > 0.0, "pullback: tol must be positive");
    require(n_max >= 1, "pullback: n_max must be >= 1");
    require(!probe_points.empty() && probe_points.size() % k == 0 && probe_points.size() >= 2 * k,
            "pullback: probe cloud needs at least two points");

    std::vector<NoiseValue> values;
    values.reserve(64);
    std::vector<double> cloud(probe_points.size());
    Point scratch(k);
    Point lo(k), hi(k);
    PullbackResult res;
    for (std::size_t n = 1; n <= n_max; ++n) {
        values.push_back(outer(n - 1));
        std::copy(probe_points.begin(), probe_points.end(), cloud.begin());
        // The running hull only grows, so a depth is settled as soon as it
        // exceeds tol; the corners come first in the probe cloud.
        bool sat = false;
        bool exceeded = false;
        for (std::size_t off = 0; off < cloud.size() && !exceeded; off += k) {
            std::span<double> p(cloud.data() + off, k);
            for (std::size_t j = n; j-- > 0;) {
                sat |= fam.apply_into(values[j], p, scratch);
                std::copy(scratch.begin(), scratch.end(), p.begin());
            }
            double diam = 0.0;
            for (std::size_t i = 0; i < k; ++i) {
                lo[i] = off == 0 ? p[i] : std::min(lo[i], p[i]);
                hi[i] = off == 0 ? p[i] : std::max(hi[i], p[i]);
                diam += hi[i] - lo[i];
            }
            exceeded = diam > tol && n < n_max;
        }
        if (exceeded)
            continue;
        const Box box = Box::hull(cloud, k);
        res.depth = n;
        res.diameter = box.diameter();
        res.saturated = sat;
        res.converged = res.diameter <= tol;
        res.point.assign(k, 0.0);
        const double count = static_cast<double>(cloud.size() / k);
        for (std::size_t off = 0; off < cloud.size(); off += k)
            for (std::size_t i = 0; i < k; ++i)
                res.point[i] += cloud[off + i] / count;
        break;
    }
    return res;
}

PullbackResult pullback_point(const MapFamily& fam, std::uint64_t seed, std::uint64_t stream_id,
                              std::span<const double> probe_points, double tol, std::size_t n_max)
{
    const NoiseStream stream(fam.noise(), seed, stream_id);
    return pullback_limit(fam, [&stream](std::size_t j) { return stream(j); }, probe_points, tol, n_max);
}

} // namespace rdsync
