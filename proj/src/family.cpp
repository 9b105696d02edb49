#include "rdsync/family.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "rdsync/random.hpp"

namespace rdsync {

using nlohmann::json;

NoiseSpec NoiseSpec::finite(std::vector<double> probs)
{
    require(!probs.empty(), "noise: probability vector is empty");
    double total = 0.0;
    for (double p : probs) {
        require(std::isfinite(p) && p >= 0.0, "noise: probabilities must be finite and nonnegative");
        total += p;
    }
    require(std::abs(total - 1.0) <= 1e-12, "noise: probabilities must sum to 1 (got " + std::to_string(total) + ")");
    NoiseSpec n;
    n.kind_ = Kind::Finite;
    n.probs_ = std::move(probs);
    n.cumulative_.resize(n.probs_.size());
    std::partial_sum(n.probs_.begin(), n.probs_.end(), n.cumulative_.begin());
    return n;
}

NoiseSpec NoiseSpec::uniform(double lo, double hi)
{
    require(std::isfinite(lo) && std::isfinite(hi) && lo <= hi, "noise: uniform bounds must satisfy lo <= hi");
    NoiseSpec n;
    n.kind_ = Kind::Uniform;
    n.lo_ = lo;
    n.hi_ = hi;
    return n;
}

NoiseValue NoiseSpec::from_uniform(double u) const noexcept
{
    if (kind_ == Kind::Uniform)
        return lo_ + (hi_ - lo_) * u;
    // First symbol whose cumulative mass exceeds u; zero-mass symbols are never drawn.
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    std::size_t idx = static_cast<std::size_t>(it - cumulative_.begin());
    if (idx >= probs_.size()) {
        idx = probs_.size() - 1;
        while (idx > 0 && probs_[idx] == 0.0)
            --idx;
    }
    return static_cast<double>(idx + 1);
}

json NoiseSpec::to_json() const
{
    if (kind_ == Kind::Uniform)
        return json{{"kind", "uniform"}, {"lo", lo_}, {"hi", hi_}};
    return json{{"kind", "finite"}, {"probs", probs_}};
}

MapFamily::MapFamily(std::string name, std::size_t k, NoiseSpec noise, Kernel kernel, std::optional<Box> domain,
                     Box probe, double clamp)
    : name_(std::move(name)), k_(k), noise_(std::move(noise)), kernel_(std::move(kernel)), domain_(std::move(domain)),
      probe_(std::move(probe)), clamp_(clamp)
{
    require(k_ >= 1, "family: dimension must be >= 1");
    require(static_cast<bool>(kernel_), "family: missing map kernel");
    require(clamp_ > 0.0, "family: clamp bound must be positive");
    require_dim(probe_.dim(), k_, "family probe box");
    if (domain_)
        require_dim(domain_->dim(), k_, "family domain box");
    for (std::size_t i = 0; i < k_; ++i)
        require(std::isfinite(probe_.lo[i]) && std::isfinite(probe_.hi[i]), "family: probe box must be bounded");
}

bool MapFamily::apply_into(NoiseValue alpha, std::span<const double> x, std::span<double> out) const
{
    kernel_(alpha, x, out);
    bool saturated = false;
    for (double& v : out) {
        if (std::isnan(v)) {
            v = clamp_;
            saturated = true;
        } else if (v > clamp_) {
            v = clamp_;
            saturated = true;
        } else if (v < -clamp_) {
            v = -clamp_;
            saturated = true;
        }
    }
    return saturated;
}

Point MapFamily::apply(NoiseValue alpha, std::span<const double> x, bool* saturated) const
{
    require_dim(x.size(), k_, "apply");
    Point out(k_);
    const bool sat = apply_into(alpha, x, out);
    if (saturated)
        *saturated = sat;
    return out;
}

MapFamily MapFamily::with_bounds(std::optional<Box> domain, Box probe, double clamp) const
{
    MapFamily out(name_, k_, noise_, kernel_, std::move(domain), std::move(probe), clamp);
    out.config_ = config_;
    return out;
}

bool compose_in_place(const MapFamily& fam, std::span<const NoiseValue> block, std::span<double> cloud)
{
    const std::size_t k = fam.dim();
    require(cloud.size() % k == 0, "compose: ragged point cloud");
    bool saturated = false;
    Point tmp(k);
    for (std::size_t off = 0; off < cloud.size(); off += k) {
        auto p = cloud.subspan(off, k);
        for (std::size_t j = block.size(); j-- > 0;) {
            saturated |= fam.apply_into(block[j], p, tmp);
            std::copy(tmp.begin(), tmp.end(), p.begin());
        }
    }
    return saturated;
}

Box image_box(const MapFamily& fam, std::span<const NoiseValue> block, std::span<const double> probe_points,
              bool* saturated)
{
    require(!probe_points.empty(), "image_box: empty probe cloud");
    require(!block.empty(), "image_box: empty noise block");
    std::vector<double> cloud(probe_points.begin(), probe_points.end());
    const bool sat = compose_in_place(fam, block, cloud);
    if (saturated)
        *saturated = sat;
    return Box::hull(cloud, fam.dim());
}

namespace {

std::vector<unsigned> first_primes(std::size_t n)
{
    std::vector<unsigned> primes;
    for (unsigned c = 2; primes.size() < n; ++c)
        if (std::none_of(primes.begin(), primes.end(), [c](unsigned p) { return c % p == 0; }))
            primes.push_back(c);
    return primes;
}

double radical_inverse(std::size_t i, unsigned base)
{
    double f = 1.0;
    double r = 0.0;
    while (i > 0) {
        f /= base;
        r += f * static_cast<double>(i % base);
        i /= base;
    }
    return r;
}

} // namespace

std::vector<double> probe_cloud(const Box& box, std::size_t interior)
{
    const std::size_t k = box.dim();
    std::vector<double> out;
    if (k <= 10)
        out = box.corners();
    const auto primes = first_primes(k);
    out.reserve(out.size() + interior * k);
    for (std::size_t i = 1; i <= interior; ++i)
        for (std::size_t d = 0; d < k; ++d)
            out.push_back(box.lo[d] + box.span(d) * radical_inverse(i, primes[d]));
    return out;
}

std::string to_string(MonotonicityVerdict::Kind k)
{
    switch (k) {
    case MonotonicityVerdict::Kind::Increasing: return "Increasing";
    case MonotonicityVerdict::Kind::Decreasing: return "Decreasing";
    case MonotonicityVerdict::Kind::Neither: return "Neither";
    }
    return "?";
}

MonotonicityVerdict classify_monotonicity(const MapFamily& fam, NoiseValue alpha, const JOrder& ord,
                                          const Box& probe, std::size_t n_pairs, std::uint64_t seed)
{
    require(n_pairs >= 1, "classify_monotonicity: n_pairs must be >= 1");
    const std::size_t k = fam.dim();
    require_dim(ord.dim(), k, "classify_monotonicity");
    require_dim(probe.dim(), k, "classify_monotonicity probe");

    StreamCursor rng(derive_seed(seed, "monotonicity"), 0);
    Point x(k), y(k), fx(k), fy(k);
    bool all_less = true;
    bool all_greater = true;
    std::optional<MonotonicityVerdict::Witness> witness;
    std::size_t found = 0;
    const std::size_t max_draws = 100 * n_pairs;
    for (std::size_t draw = 0; draw < max_draws && found < n_pairs; ++draw) {
        for (std::size_t i = 0; i < k; ++i)
            x[i] = probe.lo[i] + probe.span(i) * rng.uniform();
        for (std::size_t i = 0; i < k; ++i)
            y[i] = probe.lo[i] + probe.span(i) * rng.uniform();
        const PointOrder o = cmp_points(x, y, ord);
        if (o == PointOrder::Greater)
            std::swap(x, y);
        else if (o != PointOrder::Less)
            continue;
        ++found;
        fam.apply_into(alpha, x, fx);
        fam.apply_into(alpha, y, fy);
        const PointOrder img = cmp_points(fx, fy, ord);
        if (img != PointOrder::Less)
            all_less = false;
        if (img != PointOrder::Greater)
            all_greater = false;
        if (!all_less && !all_greater && !witness)
            witness = MonotonicityVerdict::Witness{x, y, fx, fy};
    }
    if (found < n_pairs)
        throw DiagnosticError("classify_monotonicity: degenerate probe, only " + std::to_string(found) +
                              " comparable pairs in " + std::to_string(max_draws) + " draws");

    MonotonicityVerdict v;
    v.pairs_tested = found;
    if (all_less)
        v.kind = MonotonicityVerdict::Kind::Increasing;
    else if (all_greater)
        v.kind = MonotonicityVerdict::Kind::Decreasing;
    else {
        v.kind = MonotonicityVerdict::Kind::Neither;
        v.witness = std::move(witness);
    }
    return v;
}

namespace families {

namespace {

std::size_t symbol_index(NoiseValue alpha, std::size_t q)
{
    const auto s = static_cast<std::size_t>(alpha);
    return std::min(q, std::max<std::size_t>(1, s)) - 1;
}

std::vector<double> uniform_probs(std::size_t q)
{
    std::vector<double> p(q, 1.0 / static_cast<double>(q));
    // Make the sum exact for the 1e-12 check regardless of q.
    p.back() = 1.0 - std::accumulate(p.begin(), p.end() - 1, 0.0);
    return p;
}

Box cube(std::size_t k, double lo, double hi)
{
    return Box(Point(k, lo), Point(k, hi));
}

json box_json(const Box& b)
{
    return json{{"lo", b.lo}, {"hi", b.hi}};
}

json base_config(const std::string& name, const NoiseSpec& noise, const std::optional<Box>& domain, const Box& probe,
                 std::vector<std::size_t> default_j)
{
    json cfg;
    cfg["family"] = name;
    if (noise.is_finite())
        cfg["probs"] = noise.probs();
    else
        cfg["noise"] = json{{"lo", noise.lo()}, {"hi", noise.hi()}};
    cfg["domain"] = domain ? box_json(*domain) : json(nullptr);
    cfg["probe"] = box_json(probe);
    cfg["clamp"] = MapFamily::default_clamp;
    cfg["J"] = default_j;
    cfg["strict_tol"] = JOrder::default_strict_tol;
    return cfg;
}

void require_two(const std::vector<double>& probs, const char* name)
{
    require(probs.size() == 2, std::string(name) + ": expects exactly two probabilities");
}

} // namespace

MapFamily cantor1d(std::vector<double> probs)
{
    require_two(probs, "cantor1d");
    auto noise = NoiseSpec::finite(std::move(probs));
    Box domain({0.0}, {1.0});
    MapFamily fam("cantor1d", 1, noise,
                  [](NoiseValue a, std::span<const double> x, std::span<double> out) {
                      out[0] = x[0] / 3.0 + (symbol_index(a, 2) == 1 ? 2.0 / 3.0 : 0.0);
                  },
                  domain, domain);
    fam.set_config(base_config("cantor1d", noise, domain, domain, {1}));
    return fam;
}

MapFamily cantor2d(std::vector<double> probs)
{
    require_two(probs, "cantor2d");
    auto noise = NoiseSpec::finite(std::move(probs));
    Box probe({0.0, -1.0}, {1.0, 0.0});
    MapFamily fam("cantor2d", 2, noise,
                  [](NoiseValue a, std::span<const double> x, std::span<double> out) {
                      const bool second = symbol_index(a, 2) == 1;
                      out[0] = x[0] / 3.0 + (second ? 2.0 / 3.0 : 0.0);
                      out[1] = x[1] / 3.0 - (second ? 2.0 / 3.0 : 0.0);
                  },
                  std::nullopt, probe);
    fam.set_config(base_config("cantor2d", noise, std::nullopt, probe, {1}));
    return fam;
}

MapFamily exp1d(std::vector<double> probs)
{
    require_two(probs, "exp1d");
    auto noise = NoiseSpec::finite(std::move(probs));
    Box probe({-1.0}, {1.0});
    MapFamily fam("exp1d", 1, noise,
                  [](NoiseValue a, std::span<const double> x, std::span<double> out) {
                      const double e = std::exp(x[0]);
                      out[0] = symbol_index(a, 2) == 0 ? e : -e;
                  },
                  std::nullopt, probe);
    fam.set_config(base_config("exp1d", noise, std::nullopt, probe, {1}));
    return fam;
}

MapFamily fig1_2d()
{
    auto noise = NoiseSpec::finite({1.0});
    Box probe = cube(2, -1.0, 1.0);
    MapFamily fam("fig1-2d", 2, noise,
                  [](NoiseValue, std::span<const double> x, std::span<double> out) {
                      out[0] = std::atan(x[1] - x[0]);
                      out[1] = std::exp(x[0] - x[1]);
                  },
                  std::nullopt, probe);
    fam.set_config(base_config("fig1-2d", noise, std::nullopt, probe, {1}));
    return fam;
}

MapFamily lip_pair(std::vector<double> probs, bool disjoint)
{
    require_two(probs, "lip-pair");
    auto noise = NoiseSpec::finite(std::move(probs));
    std::optional<Box> domain;
    Box probe({-1.0}, {1.0});
    MapFamily::Kernel kernel;
    if (disjoint) {
        domain = Box({0.0}, {1.0});
        probe = *domain;
        kernel = [](NoiseValue a, std::span<const double> x, std::span<double> out) {
            out[0] = symbol_index(a, 2) == 0 ? std::min(2.0 * x[0], 1.0 / 3.0) : 0.5 * x[0] + 0.5;
        };
    } else {
        kernel = [](NoiseValue a, std::span<const double> x, std::span<double> out) {
            out[0] = symbol_index(a, 2) == 0 ? 2.0 * x[0] : 0.5 * x[0];
        };
    }
    MapFamily fam("lip-pair", 1, noise, std::move(kernel), domain, probe);
    auto cfg = base_config("lip-pair", noise, domain, probe, {1});
    cfg["disjoint"] = disjoint;
    fam.set_config(std::move(cfg));
    return fam;
}

MapFamily affine(std::vector<AffineMap> maps, std::vector<double> probs, std::optional<Box> domain, Box probe)
{
    require(!maps.empty(), "affine: at least one map required");
    const std::size_t k = maps.front().b.size();
    require(k >= 1, "affine: offset vector must be nonempty");
    for (const auto& m : maps) {
        require_dim(m.b.size(), k, "affine offset");
        require_dim(m.a.size(), k, "affine matrix rows");
        for (const auto& row : m.a)
            require_dim(row.size(), k, "affine matrix columns");
    }
    if (probs.empty())
        probs = uniform_probs(maps.size());
    require(probs.size() == maps.size(), "affine: one probability per map required");
    auto noise = NoiseSpec::finite(std::move(probs));

    json maps_json = json::array();
    for (const auto& m : maps)
        maps_json.push_back(json{{"A", m.a}, {"b", m.b}});

    const std::size_t q = maps.size();
    MapFamily fam("affine", k, noise,
                  [maps = std::move(maps), k, q](NoiseValue a, std::span<const double> x, std::span<double> out) {
                      const AffineMap& m = maps[symbol_index(a, q)];
                      for (std::size_t i = 0; i < k; ++i) {
                          double v = m.b[i];
                          for (std::size_t j = 0; j < k; ++j)
                              v += m.a[i][j] * x[j];
                          out[i] = v;
                      }
                  },
                  domain, probe);
    std::vector<std::size_t> all(k);
    std::iota(all.begin(), all.end(), std::size_t{1});
    auto cfg = base_config("affine", noise, domain, probe, all);
    cfg["maps"] = std::move(maps_json);
    fam.set_config(std::move(cfg));
    return fam;
}

MapFamily constant(std::vector<Point> values, std::vector<double> probs)
{
    require(!values.empty(), "constant: at least one value required");
    const std::size_t k = values.front().size();
    std::vector<AffineMap> maps;
    for (auto& v : values) {
        require_dim(v.size(), k, "constant value");
        maps.push_back(AffineMap{std::vector<std::vector<double>>(k, std::vector<double>(k, 0.0)), v});
    }
    Box probe = Box::of_point(values.front());
    for (const auto& v : values)
        probe.expand(v);
    for (std::size_t i = 0; i < k; ++i) {
        probe.lo[i] -= 1.0;
        probe.hi[i] += 1.0;
    }
    MapFamily base = affine(maps, std::move(probs), std::nullopt, probe);
    auto cfg = base.config();
    cfg["family"] = "constant";
    cfg.erase("maps");
    cfg["values"] = values;
    MapFamily fam("constant", k, base.noise(),
                  [values](NoiseValue a, std::span<const double>, std::span<double> out) {
                      const Point& v = values[symbol_index(a, values.size())];
                      std::copy(v.begin(), v.end(), out.begin());
                  },
                  std::nullopt, probe);
    fam.set_config(std::move(cfg));
    return fam;
}

MapFamily rotations(std::vector<double> angles, std::vector<double> probs)
{
    require(!angles.empty(), "rotations: at least one angle required");
    std::vector<AffineMap> maps;
    for (double t : angles)
        maps.push_back(AffineMap{{{std::cos(t), -std::sin(t)}, {std::sin(t), std::cos(t)}}, {0.0, 0.0}});
    MapFamily base = affine(std::move(maps), std::move(probs), std::nullopt, cube(2, -1.0, 1.0));
    auto cfg = base.config();
    cfg["family"] = "rotations";
    cfg.erase("maps");
    cfg["angles"] = angles;
    MapFamily fam = base.with_bounds(std::nullopt, base.probe(), base.clamp_bound());
    fam.set_config(std::move(cfg));
    return fam;
}

MapFamily noisy_contraction(double slope, double lo, double hi)
{
    require(slope > 0.0 && slope < 1.0, "noisy-contraction: slope must lie in (0, 1)");
    auto noise = NoiseSpec::uniform(lo, hi);
    Box domain({lo / (1.0 - slope)}, {hi / (1.0 - slope)});
    MapFamily fam("noisy-contraction", 1, noise,
                  [slope](NoiseValue a, std::span<const double> x, std::span<double> out) { out[0] = slope * x[0] + a; },
                  domain, domain);
    auto cfg = base_config("noisy-contraction", noise, domain, domain, {1});
    cfg["slope"] = slope;
    fam.set_config(std::move(cfg));
    return fam;
}

} // namespace families

namespace {

std::optional<Box> read_box(const json& cfg, const char* key)
{
    if (!cfg.contains(key) || cfg.at(key).is_null())
        return std::nullopt;
    const json& b = cfg.at(key);
    require(b.is_object() && b.contains("lo") && b.contains("hi"), std::string("config: '") + key + "' needs lo and hi");
    return Box(b.at("lo").get<Point>(), b.at("hi").get<Point>());
}

void check_keys(const json& cfg, std::set<std::string> extra)
{
    static const std::set<std::string> common = {"family", "probs", "clamp", "domain", "probe", "J", "strict_tol"};
    for (const auto& [key, _] : cfg.items())
        if (!common.count(key) && !extra.count(key))
            throw UsageError("config: unknown key '" + key + "' for family " + cfg.at("family").get<std::string>());
}

} // namespace

std::vector<std::string> family_names()
{
    return {"cantor1d", "cantor2d", "exp1d", "fig1-2d", "lip-pair", "affine", "constant", "rotations",
            "noisy-contraction"};
}

MapFamily make_family(const json& cfg)
{
    require(cfg.is_object() && cfg.contains("family") && cfg.at("family").is_string(),
            "config: missing string key 'family'");
    const auto name = cfg.at("family").get<std::string>();
    auto probs = [&](std::vector<double> dflt) {
        return cfg.contains("probs") ? cfg.at("probs").get<std::vector<double>>() : dflt;
    };

    std::optional<MapFamily> fam;
    try {
        if (name == "cantor1d") {
            check_keys(cfg, {});
            fam = families::cantor1d(probs({0.5, 0.5}));
        } else if (name == "cantor2d") {
            check_keys(cfg, {});
            fam = families::cantor2d(probs({0.5, 0.5}));
        } else if (name == "exp1d") {
            check_keys(cfg, {});
            fam = families::exp1d(probs({0.5, 0.5}));
        } else if (name == "fig1-2d") {
            check_keys(cfg, {});
            require(!cfg.contains("probs") || cfg.at("probs") == json::array({1.0}), "fig1-2d: single map, probs must be [1]");
            fam = families::fig1_2d();
        } else if (name == "lip-pair") {
            check_keys(cfg, {"disjoint"});
            fam = families::lip_pair(probs({0.5, 0.5}), cfg.value("disjoint", false));
        } else if (name == "affine") {
            check_keys(cfg, {"maps"});
            require(cfg.contains("maps") && cfg.at("maps").is_array(), "affine: 'maps' array required");
            std::vector<families::AffineMap> maps;
            for (const auto& m : cfg.at("maps"))
                maps.push_back({m.at("A").get<std::vector<std::vector<double>>>(), m.at("b").get<Point>()});
            const std::size_t k = maps.empty() ? 0 : maps.front().b.size();
            auto domain = read_box(cfg, "domain");
            auto probe = read_box(cfg, "probe");
            if (!probe)
                probe = domain ? *domain : Box(Point(k, -1.0), Point(k, 1.0));
            fam = families::affine(std::move(maps), probs({}), domain, *probe);
        } else if (name == "constant") {
            check_keys(cfg, {"values"});
            fam = families::constant(cfg.at("values").get<std::vector<Point>>(), probs({}));
        } else if (name == "rotations") {
            check_keys(cfg, {"angles"});
            fam = families::rotations(cfg.value("angles", std::vector<double>{0.3, 2.0}), probs({}));
        } else if (name == "noisy-contraction") {
            check_keys(cfg, {"slope", "noise"});
            const json noise = cfg.value("noise", json{{"lo", 0.0}, {"hi", 2.0 / 3.0}});
            fam = families::noisy_contraction(cfg.value("slope", 1.0 / 3.0), noise.at("lo").get<double>(),
                                              noise.at("hi").get<double>());
        } else {
            throw UsageError("config: unknown family '" + name + "'");
        }
    } catch (const json::exception& e) {
        throw UsageError(std::string("config: malformed value: ") + e.what());
    }

    // Generic overrides on top of the built-in defaults.
    json resolved = fam->config();
    std::optional<Box> domain = fam->domain();
    Box probe = fam->probe();
    if (name != "affine") {
        if (auto d = read_box(cfg, "domain"))
            domain = *d;
        if (auto p = read_box(cfg, "probe"))
            probe = *p;
    }
    const double clamp = cfg.value("clamp", MapFamily::default_clamp);
    if (cfg.contains("J"))
        resolved["J"] = cfg.at("J");
    if (cfg.contains("strict_tol"))
        resolved["strict_tol"] = cfg.at("strict_tol");
    resolved["domain"] = domain ? json{{"lo", domain->lo}, {"hi", domain->hi}} : json(nullptr);
    resolved["probe"] = json{{"lo", probe.lo}, {"hi", probe.hi}};
    resolved["clamp"] = clamp;

    MapFamily out = fam->with_bounds(domain, probe, clamp);
    out.set_config(std::move(resolved));
    return out;
}

} // namespace rdsync
