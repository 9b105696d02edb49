#include "rdsync/transport.hpp"

#include <algorithm>
#include <tuple>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include "rdsync/engine.hpp"
#include "rdsync/io.hpp"
#include "rdsync/parallel.hpp"
#include "rdsync/random.hpp"

namespace rdsync {

EmpiricalMeasure EmpiricalMeasure::uniform(std::size_t k, std::vector<double> points, Provenance provenance)
{
    require(k >= 1 && points.size() % k == 0 && !points.empty(), "EmpiricalMeasure: bad point array");
    EmpiricalMeasure mu;
    mu.k = k;
    const std::size_t n = points.size() / k;
    mu.points = std::move(points);
    mu.weights.assign(n, 1.0 / static_cast<double>(n));
    mu.provenance = provenance;
    return mu;
}

EmpiricalMeasure EmpiricalMeasure::dirac(std::span<const double> x)
{
    return uniform(x.size(), std::vector<double>(x.begin(), x.end()));
}

bool EmpiricalMeasure::uniform_weights() const noexcept
{
    const double w = 1.0 / static_cast<double>(weights.size());
    return std::all_of(weights.begin(), weights.end(), [w](double v) { return std::abs(v - w) <= 1e-15; });
}

Point EmpiricalMeasure::mean() const
{
    Point m(k, 0.0);
    for (std::size_t i = 0; i < size(); ++i)
        for (std::size_t d = 0; d < k; ++d)
            m[d] += weights[i] * points[i * k + d];
    return m;
}

Point EmpiricalMeasure::variance() const
{
    const Point m = mean();
    Point v(k, 0.0);
    for (std::size_t i = 0; i < size(); ++i)
        for (std::size_t d = 0; d < k; ++d) {
            const double diff = points[i * k + d] - m[d];
            v[d] += weights[i] * diff * diff;
        }
    return v;
}

void EmpiricalMeasure::validate() const
{
    require(k >= 1, "EmpiricalMeasure: dimension must be >= 1");
    require(!weights.empty() && points.size() == weights.size() * k, "EmpiricalMeasure: points/weights mismatch");
    double total = 0.0;
    for (double w : weights) {
        require(std::isfinite(w) && w >= 0.0, "EmpiricalMeasure: weights must be finite and nonnegative");
        total += w;
    }
    require(std::abs(total - 1.0) <= 1e-12, "EmpiricalMeasure: weights must sum to 1");
    if (!saturated)
        for (double v : points)
            require(std::isfinite(v), "EmpiricalMeasure: non-finite point");
}

EmpiricalMeasure pullback_sample(const MapFamily& fam, std::uint64_t seed, std::size_t n, double tol,
                                 std::size_t n_max, std::span<const double> probe_points, unsigned threads)
{
    require(n >= 1, "pullback_sample: N must be >= 1");
    const std::size_t k = fam.dim();
    std::vector<double> pts(n * k);
    std::vector<unsigned char> failed(n, 0), sat(n, 0);
    parallel_for(n, threads, [&](std::size_t i) {
        const PullbackResult r = pullback_point(fam, seed, i, probe_points, tol, n_max);
        std::copy(r.point.begin(), r.point.end(), pts.begin() + static_cast<std::ptrdiff_t>(i * k));
        failed[i] = r.converged ? 0 : 1;
        sat[i] = r.saturated ? 1 : 0;
    });
    EmpiricalMeasure mu = EmpiricalMeasure::uniform(k, std::move(pts), EmpiricalMeasure::Provenance::Pullback);
    mu.failures = static_cast<std::size_t>(std::count(failed.begin(), failed.end(), 1));
    mu.saturated = std::any_of(sat.begin(), sat.end(), [](unsigned char c) { return c != 0; });
    if (static_cast<double>(mu.failures) > 0.01 * static_cast<double>(n))
        throw DiagnosticError("pullback_sample: " + std::to_string(mu.failures) + " of " + std::to_string(n) +
                              " samples did not converge (tol " + io::num(tol) + ", n_max " +
                              std::to_string(n_max) + ")");
    return mu;
}

EmpiricalMeasure push_forward(const MapFamily& fam, const EmpiricalMeasure& mu, std::size_t steps,
                              std::uint64_t seed, unsigned threads)
{
    require_dim(mu.k, fam.dim(), "push_forward");
    EmpiricalMeasure out = mu;
    if (steps == 0)
        return out;
    out.provenance = EmpiricalMeasure::Provenance::PushForward;
    const std::size_t k = mu.k;
    const std::uint64_t sub = derive_seed(seed, "push-forward");
    std::vector<unsigned char> sat(mu.size(), 0);
    parallel_for(mu.size(), threads, [&](std::size_t i) {
        const NoiseStream stream(fam.noise(), sub, i);
        std::span<double> p(out.points.data() + i * k, k);
        Point tmp(k);
        for (std::size_t s = 0; s < steps; ++s) {
            sat[i] |= fam.apply_into(stream(s), p, tmp) ? 1 : 0;
            std::copy(tmp.begin(), tmp.end(), p.begin());
        }
    });
    out.saturated = mu.saturated || std::any_of(sat.begin(), sat.end(), [](unsigned char c) { return c != 0; });
    return out;
}

std::string to_string(TransportReport::Method m)
{
    switch (m) {
    case TransportReport::Method::Sorted1D: return "Sorted1D";
    case TransportReport::Method::ExactMatching: return "ExactMatching";
    case TransportReport::Method::Sliced: return "Sliced";
    }
    return "?";
}

namespace {

// W1 between two weighted samples on the line.
double w1_line(std::vector<std::pair<double, double>> a, std::vector<std::pair<double, double>> b)
{
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a.size() == b.size()) {
        const double w = 1.0 / static_cast<double>(a.size());
        const bool uniform = std::all_of(a.begin(), a.end(), [w](auto& p) { return p.second == w; }) &&
                             std::all_of(b.begin(), b.end(), [w](auto& p) { return p.second == w; });
        if (uniform) {
            double s = 0.0;
            for (std::size_t i = 0; i < a.size(); ++i)
                s += std::abs(a[i].first - b[i].first);
            return s / static_cast<double>(a.size());
        }
    }
    // Integrate |F_a - F_b| over the merged support.
    double fa = 0.0, fb = 0.0, total = 0.0;
    std::size_t i = 0, j = 0;
    double prev = std::min(a.front().first, b.front().first);
    while (i < a.size() || j < b.size()) {
        const double next = (j >= b.size() || (i < a.size() && a[i].first <= b[j].first)) ? a[i].first : b[j].first;
        total += std::abs(fa - fb) * (next - prev);
        while (i < a.size() && a[i].first == next)
            fa += a[i++].second;
        while (j < b.size() && b[j].first == next)
            fb += b[j++].second;
        prev = next;
    }
    return total;
}

std::vector<std::pair<double, double>> projected(const EmpiricalMeasure& mu, std::span<const double> dir)
{
    std::vector<std::pair<double, double>> out(mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i) {
        double v = 0.0;
        for (std::size_t d = 0; d < mu.k; ++d)
            v += dir[d] * mu.points[i * mu.k + d];
        out[i] = {v, mu.weights[i]};
    }
    return out;
}

// The two arguments in a fixed order, so that every distance below is
// bitwise symmetric.
std::pair<const EmpiricalMeasure*, const EmpiricalMeasure*> canonical(const EmpiricalMeasure& a,
                                                                      const EmpiricalMeasure& b)
{
    const auto key = [](const EmpiricalMeasure& m) { return std::tie(m.k, m.points, m.weights); };
    if (key(b) < key(a))
        return {&b, &a};
    return {&a, &b};
}

} // namespace

double w1_sorted_1d(const EmpiricalMeasure& a, const EmpiricalMeasure& b)
{
    require(a.k == 1 && b.k == 1, "w1_sorted_1d: one-dimensional measures required");
    const auto [p1, p2] = canonical(a, b);
    const EmpiricalMeasure& mu1 = *p1;
    const EmpiricalMeasure& mu2 = *p2;
    const double one = 1.0;
    return w1_line(projected(mu1, {&one, 1}), projected(mu2, {&one, 1}));
}

std::vector<std::size_t> min_cost_assignment(std::span<const double> cost, std::size_t n)
{
    require(cost.size() == n * n, "min_cost_assignment: cost matrix must be n x n");
    // Shortest augmenting paths with potentials; rows/cols are 1-based inside.
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
    std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
    std::vector<bool> used(n + 1);
    for (std::size_t i = 1; i <= n; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::fill(minv.begin(), minv.end(), inf);
        std::fill(used.begin(), used.end(), false);
        do {
            used[j0] = true;
            const std::size_t i0 = p[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j])
                    continue;
                const double cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<std::size_t> assignment(n);
    for (std::size_t j = 1; j <= n; ++j)
        assignment[p[j] - 1] = j - 1;
    return assignment;
}

double w1_exact_matching(const EmpiricalMeasure& a, const EmpiricalMeasure& b)
{
    require(a.k == b.k, "w1_exact_matching: dimension mismatch");
    const auto [p1, p2] = canonical(a, b);
    const EmpiricalMeasure& mu1 = *p1;
    const EmpiricalMeasure& mu2 = *p2;
    require(mu1.size() == mu2.size() && mu1.uniform_weights() && mu2.uniform_weights(),
            "w1_exact_matching: requires uniform weights and equal sample sizes");
    const std::size_t n = mu1.size();
    std::vector<double> cost(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            cost[i * n + j] = l1_distance(mu1.point(i), mu2.point(j));
    const auto match = min_cost_assignment(cost, n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        total += cost[i * n + match[i]];
    return total / static_cast<double>(n);
}

double w1_sliced(const EmpiricalMeasure& a, const EmpiricalMeasure& b, std::size_t n_projections,
                 std::uint64_t seed)
{
    require(a.k == b.k, "w1_sliced: dimension mismatch");
    const auto [p1, p2] = canonical(a, b);
    const EmpiricalMeasure& mu1 = *p1;
    const EmpiricalMeasure& mu2 = *p2;
    require(n_projections >= 1, "w1_sliced: need at least one projection");
    StreamCursor rng(derive_seed(seed, "sliced-directions"), 0);
    Point dir(mu1.k);
    double total = 0.0;
    for (std::size_t p = 0; p < n_projections; ++p) {
        double sup = 0.0;
        for (double& d : dir) {
            d = rng.normal();
            sup = std::max(sup, std::abs(d));
        }
        for (double& d : dir)
            d /= sup;
        total += w1_line(projected(mu1, dir), projected(mu2, dir));
    }
    return total / static_cast<double>(n_projections);
}

TransportReport wasserstein1(const EmpiricalMeasure& mu1, const EmpiricalMeasure& mu2, std::uint64_t seed)
{
    mu1.validate();
    mu2.validate();
    require(mu1.k == mu2.k, "wasserstein1: dimension mismatch");
    TransportReport rep;
    if (mu1.k == 1) {
        rep.method = TransportReport::Method::Sorted1D;
        rep.distance = w1_sorted_1d(mu1, mu2);
    } else if (mu1.size() <= 512 && mu2.size() <= 512) {
        rep.method = TransportReport::Method::ExactMatching;
        rep.distance = w1_exact_matching(mu1, mu2);
    } else {
        rep.method = TransportReport::Method::Sliced;
        rep.n_projections = 128;
        rep.distance = w1_sliced(mu1, mu2, rep.n_projections, seed);
    }
    return rep;
}

W1DecayCurve w1_decay_curve(const MapFamily& fam, const EmpiricalMeasure& initial, std::size_t n_max,
                            std::size_t n_particles, std::uint64_t seed, double tol, std::size_t n_ref,
                            bool coupled, unsigned threads)
{
    initial.validate();
    require_dim(initial.k, fam.dim(), "w1_decay_curve");
    require(n_particles >= 1 && n_ref >= 1, "w1_decay_curve: sample sizes must be >= 1");
    require(!coupled || n_particles == n_ref, "w1_decay_curve: coupled mode pairs particles with reference points");
    const std::size_t k = fam.dim();
    const auto probe = probe_cloud(fam.probe());

    W1DecayCurve curve;
    curve.coupled = coupled;
    curve.reference_size = n_ref;

    EmpiricalMeasure ref = pullback_sample(fam, derive_seed(seed, "w1-reference"), n_ref, tol, 400, probe, threads);

    // Particles drawn from the initial measure by inverse-CDF on its weights.
    std::vector<double> cum(initial.size());
    std::partial_sum(initial.weights.begin(), initial.weights.end(), cum.begin());
    const CounterStream pick(derive_seed(seed, "w1-initial"), 0);
    std::vector<double> pts(n_particles * k);
    for (std::size_t i = 0; i < n_particles; ++i) {
        std::size_t idx = initial.size() == n_particles
                              ? i
                              : static_cast<std::size_t>(std::upper_bound(cum.begin(), cum.end(), pick.uniform(i) * cum.back()) -
                                                         cum.begin());
        idx = std::min(idx, initial.size() - 1);
        std::copy_n(initial.points.begin() + static_cast<std::ptrdiff_t>(idx * k), k,
                    pts.begin() + static_cast<std::ptrdiff_t>(i * k));
    }
    EmpiricalMeasure particles = EmpiricalMeasure::uniform(k, std::move(pts), EmpiricalMeasure::Provenance::PushForward);

    const std::uint64_t noise_seed = derive_seed(seed, "w1-noise");
    const auto advance = [&](EmpiricalMeasure& mu, std::size_t step) {
        std::vector<unsigned char> sat(mu.size(), 0);
        parallel_for(mu.size(), threads, [&](std::size_t i) {
            const NoiseStream stream(fam.noise(), noise_seed, i);
            std::span<double> p(mu.points.data() + i * k, k);
            Point tmp(k);
            sat[i] = fam.apply_into(stream(step), p, tmp) ? 1 : 0;
            std::copy(tmp.begin(), tmp.end(), p.begin());
        });
        if (std::any_of(sat.begin(), sat.end(), [](unsigned char c) { return c != 0; }))
            mu.saturated = true;
    };

    for (std::size_t n = 0; n <= n_max; ++n) {
        if (n > 0) {
            advance(particles, n - 1);
            if (coupled)
                advance(ref, n - 1);
        }
        const TransportReport rep = wasserstein1(particles, ref, seed);
        curve.method = rep.method;
        curve.w1.push_back(rep.distance);
    }

    std::vector<double> steps, vals;
    for (std::size_t n = 1; n <= n_max; ++n) {
        steps.push_back(static_cast<double>(n));
        vals.push_back(curve.w1[n]);
    }
    curve.fit = fit_log_linear(steps, vals, 0.0, 2);

    const auto diam = diameter_series(fam, probe, 20, 64, derive_seed(seed, "w1-bounded"));
    curve.bounded = diam.bounded && !particles.saturated && !ref.saturated;
    return curve;
}

double pullback_noise_floor(const MapFamily& fam, std::uint64_t seed, std::size_t n, double tol,
                            std::size_t n_max, unsigned threads, std::size_t pairs)
{
    require(pairs >= 1, "pullback_noise_floor: pairs must be >= 1");
    const auto probe = probe_cloud(fam.probe());
    // A single pair fluctuates by a factor of ~5 at N in the thousands.
    double sum = 0.0;
    for (std::size_t p = 0; p < pairs; ++p) {
        const auto a = pullback_sample(fam, derive_seed(seed, "floor-a", p), n, tol, n_max, probe, threads);
        const auto b = pullback_sample(fam, derive_seed(seed, "floor-b", p), n, tol, n_max, probe, threads);
        sum += wasserstein1(a, b, derive_seed(seed, "floor-w1", p)).distance;
    }
    return sum / static_cast<double>(pairs);
}

void write_measure_csv(std::ostream& os, const EmpiricalMeasure& mu, std::uint64_t seed)
{
    std::vector<std::string> cols;
    for (std::size_t d = 1; d <= mu.k; ++d)
        cols.push_back("x_" + std::to_string(d));
    cols.push_back("weight");
    io::csv_header(os, seed, cols, "failures=" + std::to_string(mu.failures));
    std::vector<std::string> row(mu.k + 1);
    for (std::size_t i = 0; i < mu.size(); ++i) {
        for (std::size_t d = 0; d < mu.k; ++d)
            row[d] = io::num(mu.points[i * mu.k + d]);
        row[mu.k] = io::num(mu.weights[i]);
        io::csv_row(os, row);
    }
}

EmpiricalMeasure read_measure_csv(std::istream& is)
{
    EmpiricalMeasure mu;
    std::string line;
    bool header = false;
    std::size_t cols = 0;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#')
            continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ','))
            cells.push_back(cell);
        if (!header) {
            header = true;
            require(cells.size() >= 2 && cells.back() == "weight", "measure CSV: header must end with 'weight'");
            cols = cells.size();
            mu.k = cols - 1;
            continue;
        }
        require(cells.size() == cols, "measure CSV: ragged row");
        try {
            for (std::size_t d = 0; d < mu.k; ++d)
                mu.points.push_back(std::stod(cells[d]));
            mu.weights.push_back(std::stod(cells.back()));
        } catch (const std::exception&) {
            throw UsageError("measure CSV: non-numeric cell in row '" + line + "'");
        }
    }
    require(header && !mu.weights.empty(), "measure CSV: no data rows");
    mu.validate();
    return mu;
}

void write_decay_csv(std::ostream& os, const W1DecayCurve& curve, std::uint64_t seed)
{
    io::csv_header(os, seed, {"n", "w1", "c_rn_bound"},
                   "method=" + to_string(curve.method) + " coupled=" + (curve.coupled ? "1" : "0"));
    for (std::size_t n = 0; n < curve.w1.size(); ++n) {
        const double bound =
            curve.fit.degenerate ? 0.0 : curve.fit.c_bound * std::pow(curve.fit.r_hat, static_cast<double>(n));
        io::csv_row(os, {std::to_string(n), io::num(curve.w1[n]), io::num(bound)});
    }
}

} // namespace rdsync
