#include "rdsync/clt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include "rdsync/engine.hpp"
#include "rdsync/io.hpp"
#include "rdsync/parallel.hpp"
#include "rdsync/random.hpp"
#include "rdsync/stats.hpp"

namespace rdsync {

using nlohmann::json;

Observable Observable::coordinate(std::size_t k, std::size_t s)
{
    require(s >= 1 && s <= k, "observable: coordinate index outside 1..k");
    Point a(k, 0.0);
    a[s - 1] = 1.0;
    Observable o = affine(std::move(a), 0.0);
    o.kind_ = Kind::Coordinate;
    o.label_ = "coord:" + std::to_string(s);
    return o;
}

Observable Observable::affine(Point a, double b)
{
    require(!a.empty(), "observable: empty coefficient vector");
    Observable o;
    o.kind_ = Kind::Affine;
    o.k_ = a.size();
    double sup = 0.0;
    for (double v : a)
        sup = std::max(sup, std::abs(v));
    require(sup > 0.0, "observable: affine observable must be non-constant");
    // Lipschitz constant with respect to the taxicab metric.
    o.lipschitz_ = sup;
    o.a_ = std::move(a);
    o.b_ = b;
    o.label_ = "affine";
    return o;
}

Observable Observable::table(std::size_t k, std::vector<double> points, std::vector<double> values, double lipschitz)
{
    require(k >= 1 && !values.empty() && points.size() == values.size() * k, "observable: bad table shape");
    require(lipschitz > 0.0, "observable: Lipschitz constant must be positive");
    Observable o;
    o.kind_ = Kind::Table;
    o.k_ = k;
    o.table_points_ = std::move(points);
    o.table_values_ = std::move(values);
    o.lipschitz_ = lipschitz;
    o.label_ = "table";
    return o;
}

Observable Observable::parse(const std::string& spec, std::size_t k)
{
    const auto colon = spec.find(':');
    require(colon != std::string::npos, "observable: expected 'coord:<s>' or 'affine:<a..>:<b>'");
    const std::string kind = spec.substr(0, colon);
    const std::string rest = spec.substr(colon + 1);
    try {
        if (kind == "coord")
            return coordinate(k, static_cast<std::size_t>(std::stoul(rest)));
        if (kind == "affine") {
            const auto c2 = rest.find(':');
            const std::string coeffs = rest.substr(0, c2);
            const double b = c2 == std::string::npos ? 0.0 : std::stod(rest.substr(c2 + 1));
            Point a;
            std::stringstream ss(coeffs);
            std::string cell;
            while (std::getline(ss, cell, ','))
                a.push_back(std::stod(cell));
            require_dim(a.size(), k, "observable affine coefficients");
            Observable o = affine(std::move(a), b);
            o.label_ = spec;
            return o;
        }
    } catch (const std::logic_error&) {
        throw UsageError("observable: malformed spec '" + spec + "'");
    }
    throw UsageError("observable: unknown kind '" + kind + "'");
}

double Observable::operator()(std::span<const double> x) const
{
    double v = 0.0;
    if (kind_ == Kind::Table) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < table_values_.size(); ++i) {
            const double d = l1_distance(x, {table_points_.data() + i * k_, k_});
            if (d < best) {
                best = d;
                v = table_values_[i];
            }
        }
    } else {
        v = b_;
        for (std::size_t i = 0; i < k_; ++i)
            v += a_[i] * x[i];
    }
    return scale_ * v - center_;
}

Observable Observable::centered(double c) const
{
    Observable o = *this;
    o.center_ += c;
    return o;
}

Observable Observable::scaled(double factor) const
{
    require(factor != 0.0, "observable: scale factor must be nonzero");
    Observable o = *this;
    o.scale_ *= factor;
    o.center_ *= factor;
    o.lipschitz_ *= std::abs(factor);
    return o;
}

double stationary_mean(const MapFamily& fam, const ScalarFn& phi, std::size_t n, std::uint64_t seed, double tol,
                       unsigned threads)
{
    require(n >= 1, "stationary_mean: n must be >= 1");
    const auto probe = probe_cloud(fam.probe());
    const std::uint64_t sub = derive_seed(seed, "stationary-mean");
    constexpr std::size_t n_max = 400;

    if (!fam.noise().is_finite()) {
        std::vector<double> vals(n);
        parallel_for(n, threads, [&](std::size_t i) {
            vals[i] = phi(pullback_point(fam, sub, i, probe, tol, n_max).point);
        });
        return stats::mean(vals);
    }

    const std::size_t q = fam.noise().symbols();
    std::size_t strata = 1;
    std::size_t depth = 0;
    while (q > 1 && strata * q <= n) {
        strata *= q;
        ++depth;
    }
    const std::size_t per = n / strata;
    std::vector<double> contrib(strata, 0.0);
    parallel_for(strata, threads, [&](std::size_t b) {
        std::vector<NoiseValue> prefix(depth);
        double weight = 1.0;
        std::size_t code = b;
        for (std::size_t i = depth; i-- > 0;) {
            prefix[i] = static_cast<double>(code % q + 1);
            weight *= fam.noise().prob(code % q + 1);
            code /= q;
        }
        if (weight == 0.0)
            return;
        double acc = 0.0;
        for (std::size_t i = 0; i < per; ++i) {
            const NoiseStream tail(fam.noise(), sub, b * per + i);
            const auto outer = [&](std::size_t j) { return j < depth ? prefix[j] : tail(j - depth); };
            acc += phi(pullback_limit(fam, outer, probe, tol, depth + n_max).point);
        }
        contrib[b] = weight * acc / static_cast<double>(per);
    });
    double total = 0.0;
    for (double c : contrib)
        total += c;
    return total;
}

Observable center_observable(const MapFamily& fam, const Observable& phi, std::size_t n, std::uint64_t seed,
                             unsigned threads)
{
    const double c = stationary_mean(fam, [&phi](std::span<const double> x) { return phi(x); }, n, seed, 1e-10,
                                     threads);
    return phi.centered(c);
}

std::vector<double> transfer_apply(const MapFamily& fam, const ScalarFn& phi, std::span<const double> grid,
                                   std::size_t m, std::uint64_t seed, bool exact)
{
    const std::size_t k = fam.dim();
    require(grid.size() % k == 0, "transfer_apply: ragged grid");
    const std::size_t n = grid.size() / k;
    std::vector<double> out(n, 0.0);
    Point y(k);
    if (exact) {
        require(fam.noise().is_finite(), "transfer_apply: exact mode requires finite noise");
        const auto& probs = fam.noise().probs();
        for (std::size_t g = 0; g < n; ++g) {
            const std::span<const double> x = grid.subspan(g * k, k);
            double acc = 0.0;
            for (std::size_t s = 0; s < probs.size(); ++s) {
                if (probs[s] == 0.0)
                    continue;
                fam.apply_into(static_cast<double>(s + 1), x, y);
                acc += probs[s] * phi(y);
            }
            out[g] = acc;
        }
        return out;
    }
    require(m >= 100, "transfer_apply: Monte Carlo mode needs at least 100 inner samples");
    const NoiseStream stream(fam.noise(), derive_seed(seed, "transfer"), 0);
    for (std::size_t g = 0; g < n; ++g) {
        const std::span<const double> x = grid.subspan(g * k, k);
        double acc = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            fam.apply_into(stream(i), x, y);
            acc += phi(y);
        }
        out[g] = acc / static_cast<double>(m);
    }
    return out;
}

namespace {

// Taxicab nearest-neighbour lookup on a flat grid; sorted search in 1D.
class NearestIndex {
public:
    NearestIndex(std::span<const double> grid, std::size_t k) : grid_(grid), k_(k)
    {
        if (k_ == 1) {
            order_.resize(grid.size());
            std::iota(order_.begin(), order_.end(), std::size_t{0});
            std::sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) { return grid[a] < grid[b]; });
            sorted_.resize(grid.size());
            for (std::size_t i = 0; i < order_.size(); ++i)
                sorted_[i] = grid[order_[i]];
        }
    }

    std::size_t operator()(std::span<const double> x) const
    {
        if (k_ == 1) {
            const auto it = std::lower_bound(sorted_.begin(), sorted_.end(), x[0]);
            std::size_t i = static_cast<std::size_t>(it - sorted_.begin());
            if (i == sorted_.size() || (i > 0 && x[0] - sorted_[i - 1] <= sorted_[i] - x[0]))
                --i;
            return order_[i];
        }
        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t g = 0; g * k_ < grid_.size(); ++g) {
            const double d = l1_distance(x, grid_.subspan(g * k_, k_));
            if (d < best_d) {
                best_d = d;
                best = g;
            }
        }
        return best;
    }

private:
    std::span<const double> grid_;
    std::size_t k_;
    std::vector<std::size_t> order_;
    std::vector<double> sorted_;
};

} // namespace

std::vector<double> transfer_apply(const MapFamily& fam, std::span<const double> phi_values,
                                   std::span<const double> grid, std::size_t m, std::uint64_t seed, bool exact)
{
    const std::size_t k = fam.dim();
    require(phi_values.size() * k == grid.size(), "transfer_apply: one value per grid point required");
    const NearestIndex nearest(grid, k);
    const ScalarFn lookup = [&](std::span<const double> x) { return phi_values[nearest(x)]; };
    return transfer_apply(fam, lookup, grid, m, seed, exact);
}

namespace {

// Exact P^j phi(x) for finite noise: weighted sum over all q^j blocks.
class ExactExpansion {
public:
    ExactExpansion(const MapFamily& fam, const Observable& phi, std::size_t budget) : fam_(fam), phi_(phi)
    {
        for (std::size_t s = 0; s < fam.noise().symbols(); ++s)
            if (fam.noise().probs()[s] > 0.0)
                symbols_.push_back(s + 1);
        budget_ = budget;
    }

    void check_budget(std::size_t j) const
    {
        double blocks = 1.0;
        for (std::size_t i = 0; i < j; ++i)
            blocks *= static_cast<double>(symbols_.size());
        if (blocks > static_cast<double>(budget_))
            throw DiagnosticError("poisson_solve: exact enumeration of " + io::num(blocks) +
                                  " blocks at level " + std::to_string(j) + " exceeds the budget; use Monte Carlo mode");
    }

    double term(std::span<const double> x, std::size_t j) const
    {
        if (j == 0)
            return phi_(x);
        Point y(x.size());
        double acc = 0.0;
        for (std::size_t s : symbols_) {
            fam_.apply_into(static_cast<double>(s), x, y);
            acc += fam_.noise().prob(s) * term(y, j - 1);
        }
        return acc;
    }

    /// sum_{j=0}^{depth} P^j phi(x).
    double partial_sum(std::span<const double> x, std::size_t depth) const
    {
        double acc = phi_(x);
        if (depth == 0)
            return acc;
        Point y(x.size());
        for (std::size_t s : symbols_) {
            fam_.apply_into(static_cast<double>(s), x, y);
            acc += fam_.noise().prob(s) * partial_sum(y, depth - 1);
        }
        return acc;
    }

private:
    const MapFamily& fam_;
    const Observable& phi_;
    std::vector<std::size_t> symbols_;
    std::size_t budget_ = 0;
};

void check_decay(const std::vector<double>& norms, std::size_t m0, std::size_t& stalled)
{
    const std::size_t j = norms.size() - 1;
    if (j <= m0)
        return;
    if (norms[j] > 0.95 * norms[j - 1])
        ++stalled;
    else
        stalled = 0;
    if (stalled >= 10)
        throw DiagnosticError("poisson_solve: NoDecay, term norms did not contract by 0.95 over 10 steps (j = " +
                              std::to_string(j) + ", norm " + io::num(norms[j]) + ")");
}

} // namespace

PoissonSolution poisson_solve(const MapFamily& fam, const Observable& phi, const EmpiricalMeasure& mu_sample,
                              const PoissonOptions& opts, std::uint64_t seed)
{
    const std::size_t k = fam.dim();
    require_dim(mu_sample.k, k, "poisson_solve sample");
    require_dim(phi.dim(), k, "poisson_solve observable");
    require(opts.tol > 0.0, "poisson_solve: tol must be positive");
    require(opts.grid_size >= 1, "poisson_solve: grid_size must be >= 1");

    const bool exact = opts.mode == PoissonOptions::Mode::Exact ||
                       (opts.mode == PoissonOptions::Mode::Auto && fam.noise().is_finite());
    require(!exact || fam.noise().is_finite(), "poisson_solve: exact mode requires finite noise");

    PoissonSolution sol;
    sol.k = k;
    sol.exact = exact;
    const std::size_t n = std::min(opts.grid_size, mu_sample.size());
    sol.grid.assign(mu_sample.points.begin(), mu_sample.points.begin() + static_cast<std::ptrdiff_t>(n * k));
    sol.phi.resize(n);
    for (std::size_t g = 0; g < n; ++g)
        sol.phi[g] = phi(std::span<const double>(sol.grid).subspan(g * k, k));
    sol.psi = sol.phi;

    const auto sup = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v)
            s = std::max(s, std::abs(x));
        return s;
    };
    sol.term_norms.push_back(sup(sol.phi));
    std::size_t stalled = 0;
    std::vector<double> term(n);

    if (exact) {
        const ExactExpansion expansion(fam, phi, opts.exact_budget);
        std::size_t j = 0;
        while (sol.term_norms.back() > opts.tol && j < opts.j_max) {
            ++j;
            expansion.check_budget(j);
            parallel_for(n, opts.threads, [&](std::size_t g) {
                term[g] = expansion.term(std::span<const double>(sol.grid).subspan(g * k, k), j);
            });
            for (std::size_t g = 0; g < n; ++g)
                sol.psi[g] += term[g];
            sol.term_norms.push_back(sup(term));
            check_decay(sol.term_norms, opts.m0, stalled);
        }
        sol.truncation = j;
        // P psi via one more exact transfer step, psi re-expanded off the grid.
        const ScalarFn psi_eval = [&](std::span<const double> y) { return expansion.partial_sum(y, j); };
        sol.p_psi.resize(n);
        parallel_for(n, opts.threads, [&](std::size_t g) {
            sol.p_psi[g] = transfer_apply(fam, psi_eval, std::span<const double>(sol.grid).subspan(g * k, k), 0, seed,
                                          true)[0];
        });
    } else {
        require(opts.inner_samples >= 100, "poisson_solve: inner_samples must be >= 100");
        const std::size_t m = opts.inner_samples;
        const std::uint64_t chain_seed = derive_seed(seed, "poisson-chains");
        // chains[g][i] advances with noise stream (chain_seed, i), shared across grid points.
        std::vector<double> chains(n * m * k);
        for (std::size_t g = 0; g < n; ++g)
            for (std::size_t i = 0; i < m; ++i)
                std::copy_n(sol.grid.begin() + static_cast<std::ptrdiff_t>(g * k), k,
                            chains.begin() + static_cast<std::ptrdiff_t>((g * m + i) * k));
        std::size_t j = 0;
        while (sol.term_norms.back() > opts.tol && j < opts.j_max) {
            ++j;
            parallel_for(n, opts.threads, [&](std::size_t g) {
                Point tmp(k);
                double acc = 0.0;
                for (std::size_t i = 0; i < m; ++i) {
                    const NoiseStream stream(fam.noise(), chain_seed, i);
                    std::span<double> p(chains.data() + (g * m + i) * k, k);
                    fam.apply_into(stream(j - 1), p, tmp);
                    std::copy(tmp.begin(), tmp.end(), p.begin());
                    acc += phi(p);
                }
                term[g] = acc / static_cast<double>(m);
            });
            // int P^j phi dmu = 0 and the grid is a mu-sample: removing the grid
            // mean cancels the noise shared by all points through common streams.
            double shared = 0.0;
            for (std::size_t g = 0; g < n; ++g)
                shared += term[g];
            shared /= static_cast<double>(n);
            for (std::size_t g = 0; g < n; ++g) {
                term[g] -= shared;
                sol.psi[g] += term[g];
            }
            sol.term_norms.push_back(sup(term));
            check_decay(sol.term_norms, opts.m0, stalled);
        }
        sol.truncation = j;
        sol.p_psi = transfer_apply(fam, sol.psi, sol.grid, m, seed, fam.noise().is_finite());
    }

    for (std::size_t g = 0; g < n; ++g)
        sol.residual = std::max(sol.residual, std::abs(sol.psi[g] - sol.p_psi[g] - sol.phi[g]));
    return sol;
}

SigmaEstimate sigma_estimate(const PoissonSolution& sol)
{
    require(sol.size() >= 1, "sigma_estimate: empty solution");
    double psi2 = 0.0, ppsi2 = 0.0, diff2 = 0.0;
    for (std::size_t g = 0; g < sol.size(); ++g) {
        psi2 += sol.psi[g] * sol.psi[g];
        ppsi2 += sol.p_psi[g] * sol.p_psi[g];
        const double d = sol.psi[g] - sol.p_psi[g];
        diff2 += d * d;
    }
    const double n = static_cast<double>(sol.size());
    SigmaEstimate est{(psi2 - ppsi2) / n, diff2 / n};
    if (!(est.sigma2_mg > 0.0))
        throw DiagnosticError("sigma_estimate: NonPositive martingale variance " + io::num(est.sigma2_mg) +
                              " (degenerate observable)");
    return est;
}

PathEnsemble partial_sum_paths(const MapFamily& fam, const Observable& phi, double sigma2, std::size_t n,
                               std::vector<double> grid_t, std::size_t replicas, std::uint64_t seed,
                               unsigned threads, std::optional<Point> start)
{
    const std::size_t k = fam.dim();
    require(sigma2 > 0.0, "partial_sum_paths: sigma2 must be positive");
    require(n >= 1 && replicas >= 1, "partial_sum_paths: n and replicas must be >= 1");
    require(!grid_t.empty() && std::is_sorted(grid_t.begin(), grid_t.end()) && grid_t.front() >= 0.0 &&
                grid_t.back() <= 1.0,
            "partial_sum_paths: time grid must be sorted within [0, 1]");
    if (start)
        require_dim(start->size(), k, "partial_sum_paths start");

    PathEnsemble out;
    out.n = n;
    out.sigma2 = sigma2;
    out.t = grid_t;
    out.y.assign(replicas, std::vector<double>(grid_t.size()));
    out.s_n.assign(replicas, 0.0);

    std::vector<std::size_t> marks(grid_t.size());
    for (std::size_t i = 0; i < grid_t.size(); ++i)
        marks[i] = static_cast<std::size_t>(std::floor(static_cast<double>(n) * grid_t[i] + 1e-9));
    const double norm = std::sqrt(sigma2 * static_cast<double>(n));
    const auto probe = probe_cloud(fam.probe());
    const std::uint64_t start_seed = derive_seed(seed, "clt-start");
    const std::uint64_t chain_seed = derive_seed(seed, "clt-chain");

    parallel_for(replicas, threads, [&](std::size_t r) {
        Point z = start ? *start : pullback_point(fam, start_seed, r, probe, 1e-12, 400).point;
        Point tmp(k);
        const NoiseStream stream(fam.noise(), chain_seed, r);
        double sum = 0.0;
        std::size_t next = 0;
        for (std::size_t j = 0; j <= n; ++j) {
            sum += phi(z);
            if (j == n - 1)
                out.s_n[r] = sum;
            while (next < marks.size() && marks[next] == j)
                out.y[r][next++] = sum / norm;
            if (j < n) {
                fam.apply_into(stream(j), z, tmp);
                z.swap(tmp);
            }
        }
    });
    return out;
}

json CltReport::to_json() const
{
    return json{{"sigma2_mg", sigma2_mg},
                {"sigma2_resid", sigma2_resid},
                {"sigma2_direct", sigma2_direct},
                {"sigma2_discrepancy", sigma2_mg - sigma2_resid},
                {"ks_stat", ks_stat},
                {"p_value", p_value},
                {"variance_slope", variance_slope},
                {"increment_corr", increment_corr},
                {"mean_y1", mean_y1},
                {"var_y1", var_y1},
                {"poisson_residual", poisson_residual},
                {"truncation", truncation},
                {"replicas", replicas},
                {"n", n}};
}

CltReport fclt_tests(const PathEnsemble& paths)
{
    const std::size_t reps = paths.y.size();
    require(reps >= 500, "fclt_tests: need at least 500 replicas");
    const std::size_t nt = paths.t.size();
    CltReport rep;
    rep.replicas = reps;
    rep.n = paths.n;

    std::vector<std::vector<double>> cols(nt, std::vector<double>(reps));
    for (std::size_t r = 0; r < reps; ++r)
        for (std::size_t i = 0; i < nt; ++i)
            cols[i][r] = paths.y[r][i];

    const auto& y1 = cols.back();
    const auto ks = stats::ks_test_normal(y1);
    rep.ks_stat = ks.statistic;
    rep.p_value = ks.p_value;
    rep.mean_y1 = stats::mean(y1);
    rep.var_y1 = stats::variance(y1);

    if (nt >= 2) {
        std::vector<double> vars(nt);
        for (std::size_t i = 0; i < nt; ++i)
            vars[i] = stats::variance(cols[i]);
        rep.variance_slope = stats::least_squares(paths.t, vars).slope;
    }
    if (nt >= 3) {
        double acc = 0.0;
        std::vector<double> a(reps), b(reps);
        for (std::size_t i = 1; i + 1 < nt; ++i) {
            for (std::size_t r = 0; r < reps; ++r) {
                a[r] = cols[i][r] - cols[i - 1][r];
                b[r] = cols[i + 1][r] - cols[i][r];
            }
            acc += stats::correlation(a, b);
        }
        rep.increment_corr = acc / static_cast<double>(nt - 2);
    }
    rep.sigma2_direct = stats::variance(paths.s_n) / static_cast<double>(paths.n);
    return rep;
}

void write_paths_csv(std::ostream& os, const PathEnsemble& paths, std::uint64_t seed)
{
    io::csv_header(os, seed, {"replica", "t", "Y"}, "n=" + std::to_string(paths.n) + " sigma2=" + io::num(paths.sigma2));
    for (std::size_t r = 0; r < paths.y.size(); ++r)
        for (std::size_t i = 0; i < paths.t.size(); ++i)
            io::csv_row(os, {std::to_string(r), io::num(paths.t[i]), io::num(paths.y[r][i])});
}

} // namespace rdsync
