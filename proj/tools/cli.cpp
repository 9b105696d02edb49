#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "rdsync/clt.hpp"
#include "rdsync/engine.hpp"
#include "rdsync/family.hpp"
#include "rdsync/io.hpp"
#include "rdsync/splitting.hpp"
#include "rdsync/sync.hpp"
#include "rdsync/transport.hpp"

namespace rdsync::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

enum class ParamKind { Int, Real, Text, Flag, Reals };

struct ParamSpec {
    std::string name;
    ParamKind kind;
    json fallback;
    std::string help;
};

struct Command {
    std::string name;
    std::string help;
    std::vector<ParamSpec> params;
};

const std::vector<Command>& commands()
{
    static const std::vector<Command> table = {
        {"check-monotone",
         "classify every map of the family as J-increasing, J-decreasing or neither",
         {{"pairs", ParamKind::Int, 1000, "comparable pairs sampled per map"}}},
        {"check-splitting",
         "search for a J-splitting certificate (exact scan or Monte Carlo)",
         {{"m-max", ParamKind::Int, 2, "largest block length tried"},
          {"method", ParamKind::Text, "auto", "auto | exact | montecarlo"},
          {"blocks", ParamKind::Int, 256, "sampled blocks per length (Monte Carlo)"}}},
        {"sigma-decay",
         "estimate P(x in the s-th projection of the jm-step reverse image)",
         {{"m", ParamKind::Int, 1, "block length"},
          {"x", ParamKind::Reals, json::array(), "reference point (default: probe centre)"},
          {"s", ParamKind::Int, 1, "coordinate (1-based)"},
          {"j-max", ParamKind::Int, 8, "largest j"},
          {"replicas", ParamKind::Int, 10000, "noise replicas"}}},
        {"sync-rate",
         "diameter decay of reverse-order images and its exponential rate",
         {{"n-max", ParamKind::Int, 25, "largest composition depth"},
          {"replicas", ParamKind::Int, 200, "noise replicas"},
          {"m0", ParamKind::Int, -1, "burn-in override (-1: detect)"},
          {"bootstrap", ParamKind::Int, 200, "bootstrap resamples for the rate interval"}}},
        {"forward-gap",
         "distance between the forward orbit and the pullback attractor point",
         {{"x0", ParamKind::Reals, json::array(), "initial point (default: probe lower corner)"},
          {"n", ParamKind::Int, 15, "largest checkpoint"},
          {"tail-tol", ParamKind::Real, 1e-9, "pullback tolerance"}}},
        {"stationary",
         "sample the stationary measure by pullback iteration",
         {{"N", ParamKind::Int, 10000, "sample size"},
          {"tol", ParamKind::Real, 1e-9, "pullback diameter tolerance"},
          {"n-max", ParamKind::Int, 400, "pullback depth limit"}}},
        {"w1-decay",
         "Wasserstein-1 distance between T^n(initial) and the stationary measure",
         {{"n-max", ParamKind::Int, 12, "largest n"},
          {"N", ParamKind::Int, 4096, "particles and reference sample size"},
          {"tol", ParamKind::Real, 1e-9, "pullback tolerance of the reference"},
          {"initial", ParamKind::Reals, json::array(), "initial Dirac point (default: probe lower corner)"},
          {"initial-csv", ParamKind::Text, "", "initial measure CSV (x_1..x_k, weight)"},
          {"coupled", ParamKind::Flag, true, "advance the reference with the particles' noise"}}},
        {"clt",
         "Poisson equation, variance estimates and functional CLT diagnostics",
         {{"observable", ParamKind::Text, "coord:1", "coord:<s> | affine:<a1,..,ak>:<b>"},
          {"n", ParamKind::Int, 10000, "chain length"},
          {"replicas", ParamKind::Int, 1000, "chains"},
          {"grid", ParamKind::Int, 2048, "Poisson grid size"},
          {"poisson-tol", ParamKind::Real, 1e-6, "truncation tolerance of the Neumann series"},
          {"mode", ParamKind::Text, "auto", "auto | exact | montecarlo transfer operator"},
          {"inner-samples", ParamKind::Int, 1000, "Monte Carlo chains per grid point"},
          {"centering-samples", ParamKind::Int, 16384, "samples for the stationary mean"},
          {"t-points", ParamKind::Int, 20, "time grid points in (0, 1]"},
          {"x0", ParamKind::Reals, json::array(), "start of the secondary non-stationary run (default: probe lower corner)"},
          {"dump-paths", ParamKind::Flag, false, "write paths.csv"}}},
        {"simulate",
         "a single forward or reverse orbit with probe boxes",
         {{"steps", ParamKind::Int, 20, "orbit length"},
          {"x0", ParamKind::Reals, json::array(), "initial point (default: probe lower corner)"},
          {"direction", ParamKind::Text, "forward", "forward | reverse"},
          {"stream", ParamKind::Int, 0, "noise stream id"}}},
    };
    return table;
}

json parse_value(const ParamSpec& spec, const std::string& raw)
{
    try {
        switch (spec.kind) {
        case ParamKind::Int: return std::stoll(raw);
        case ParamKind::Real: return std::stod(raw);
        case ParamKind::Text: return raw;
        case ParamKind::Flag:
            if (raw == "true" || raw == "1")
                return true;
            if (raw == "false" || raw == "0")
                return false;
            break;
        case ParamKind::Reals: {
            json arr = json::array();
            std::stringstream ss(raw);
            std::string cell;
            while (std::getline(ss, cell, ','))
                arr.push_back(std::stod(cell));
            return arr;
        }
        }
    } catch (const std::logic_error&) {
    }
    throw UsageError("--" + spec.name + ": cannot parse '" + raw + "'");
}

json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw UsageError("cannot open config '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw UsageError("config '" + path + "' is not valid JSON: " + e.what());
    }
}

class Artifacts {
public:
    explicit Artifacts(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

    std::ofstream open(const std::string& name) const
    {
        std::ofstream f(dir_ / name, std::ios::binary);
        if (!f)
            throw UsageError("cannot write " + (dir_ / name).string());
        return f;
    }

    void write_json(const std::string& name, const json& doc) const { open(name) << doc.dump(2) << '\n'; }

private:
    fs::path dir_;
};

Point point_param(const json& v, const Point& fallback, std::size_t k, const char* what)
{
    if (v.empty())
        return fallback;
    Point p = v.get<Point>();
    require_dim(p.size(), k, what);
    return p;
}

struct Context {
    MapFamily fam;
    JOrder ord;
    std::uint64_t seed;
    unsigned threads;
    const json& params;
    const Artifacts& out;
    std::ostream& log;
};

int cmd_check_monotone(const Context& c)
{
    const std::size_t pairs = c.params.at("pairs").get<std::size_t>();
    require(c.fam.noise().is_finite(), "check-monotone: needs finite noise (one verdict per symbol)");
    json verdicts = json::array();
    bool all_monotone = true;
    for (std::size_t s = 1; s <= c.fam.noise().symbols(); ++s) {
        const auto v = classify_monotonicity(c.fam, static_cast<double>(s), c.ord, c.fam.probe(), pairs,
                                             derive_seed(c.seed, "check-monotone", s));
        json entry{{"symbol", s}, {"kind", to_string(v.kind)}, {"pairs_tested", v.pairs_tested}};
        if (v.witness)
            entry["witness"] = json{{"x", v.witness->x}, {"y", v.witness->y}, {"fx", v.witness->fx}, {"fy", v.witness->fy}};
        all_monotone &= v.kind != MonotonicityVerdict::Kind::Neither;
        c.log << "symbol " << s << ": " << to_string(v.kind) << '\n';
        verdicts.push_back(std::move(entry));
    }
    c.out.write_json("monotone.json", json{{"seed", c.seed}, {"J", c.ord.members()}, {"verdicts", verdicts}});
    return all_monotone ? exit_ok : exit_soft_failure;
}

int cmd_check_splitting(const Context& c)
{
    const auto m_max = c.params.at("m-max").get<std::size_t>();
    const auto method = c.params.at("method").get<std::string>();
    const auto n_blocks = c.params.at("blocks").get<std::size_t>();
    require(method == "auto" || method == "exact" || method == "montecarlo", "--method: auto | exact | montecarlo");
    require(m_max >= 1, "--m-max must be >= 1");
    const auto probe = probe_cloud(c.fam.probe());

    SplittingReport rep;
    const bool finite = c.fam.noise().is_finite();
    const bool exact = method == "exact" || (method == "auto" && finite);
    if (exact) {
        require(finite, "check-splitting: exact scan needs finite noise");
        for (std::size_t m = 1; m <= m_max; ++m) {
            double blocks = 1.0;
            for (std::size_t i = 0; i < m; ++i)
                blocks *= static_cast<double>(c.fam.noise().symbols());
            if (blocks > 1e6)
                break;
            rep = exact_splitting_scan(c.fam, c.ord, m, probe);
            if (rep.verified)
                break;
        }
    } else {
        rep = find_splitting_witness(c.fam, c.ord, m_max, probe, n_blocks, c.seed);
    }
    json doc = rep.to_json();
    doc["seed"] = c.seed;
    doc["J"] = c.ord.members();
    doc["m_max"] = m_max;
    if (rep.verified)
        doc["projections_disjoint"] = projections_disjoint(rep.box_a, rep.box_b);
    c.out.write_json("splitting.json", doc);
    c.log << (rep.verified ? "verified" : "Unverified") << " m=" << rep.m << '\n';
    return rep.verified ? exit_ok : exit_soft_failure;
}

int cmd_sigma_decay(const Context& c)
{
    const std::size_t k = c.fam.dim();
    const Point x = point_param(c.params.at("x"), c.fam.probe().center(), k, "--x");
    const auto series = sigma_decay(c.fam, c.params.at("m").get<std::size_t>(), x, c.params.at("s").get<std::size_t>(),
                                    c.params.at("j-max").get<std::size_t>(), c.params.at("replicas").get<std::size_t>(),
                                    probe_cloud(c.fam.probe()), c.seed, c.threads);
    auto f = c.out.open("sigma_decay.csv");
    write_sigma_csv(f, series, c.seed);
    json doc{{"seed", c.seed}, {"x", series.x}, {"s", series.s}, {"m", series.m}, {"replicas", series.replicas},
             {"p_hat", series.p_hat}, {"stderr", series.stderr_}, {"mean_length", series.mean_length},
             {"lambda_bound", series.lambda_bound}};
    doc["zero_at"] = series.zero_at ? json(*series.zero_at) : json(nullptr);
    c.out.write_json("sigma_decay.json", doc);
    c.log << "lambda_bound=" << io::num(series.lambda_bound) << '\n';
    return exit_ok;
}

int cmd_sync_rate(const Context& c)
{
    const auto m0 = c.params.at("m0").get<long long>();
    const auto series = diameter_series(c.fam, probe_cloud(c.fam.probe()), c.params.at("n-max").get<std::size_t>(),
                                        c.params.at("replicas").get<std::size_t>(), c.seed, c.threads,
                                        m0 >= 0 ? std::optional<std::size_t>(static_cast<std::size_t>(m0)) : std::nullopt);
    const auto fit = fit_rate(series, c.params.at("bootstrap").get<std::size_t>(), c.seed);
    auto f = c.out.open("diameters.csv");
    write_diam_csv(f, series, fit);
    json doc = fit.to_json();
    doc["seed"] = c.seed;
    doc["m0"] = series.m0;
    doc["bounded"] = series.bounded;
    doc["saturated"] = series.saturated;
    c.out.write_json("rate.json", doc);
    c.log << "r_hat=" << io::num(fit.r_hat) << (fit.warning ? " (warning: no contraction)" : "") << '\n';
    return exit_ok;
}

int cmd_forward_gap(const Context& c)
{
    const Point x0 = point_param(c.params.at("x0"), c.fam.probe().lo, c.fam.dim(), "--x0");
    const auto gaps = forward_attractor_gap(c.fam, c.seed, x0, c.params.at("n").get<std::size_t>(),
                                            c.params.at("tail-tol").get<double>(), probe_cloud(c.fam.probe()));
    auto f = c.out.open("gap.csv");
    write_gap_csv(f, gaps, c.seed);
    c.log << "final gap=" << io::num(gaps.gap.back()) << '\n';
    return exit_ok;
}

int cmd_stationary(const Context& c)
{
    const auto mu = pullback_sample(c.fam, c.seed, c.params.at("N").get<std::size_t>(), c.params.at("tol").get<double>(),
                                    c.params.at("n-max").get<std::size_t>(), probe_cloud(c.fam.probe()), c.threads);
    auto f = c.out.open("measure.csv");
    write_measure_csv(f, mu, c.seed);
    c.out.write_json("stationary.json", json{{"seed", c.seed}, {"N", mu.size()}, {"mean", mu.mean()},
                                             {"variance", mu.variance()}, {"failures", mu.failures},
                                             {"saturated", mu.saturated}});
    c.log << "mean=" << json(mu.mean()).dump() << " variance=" << json(mu.variance()).dump() << '\n';
    return exit_ok;
}

int cmd_w1_decay(const Context& c)
{
    EmpiricalMeasure initial;
    const auto csv = c.params.at("initial-csv").get<std::string>();
    if (!csv.empty()) {
        std::ifstream in(csv);
        require(static_cast<bool>(in), "cannot open --initial-csv '" + csv + "'");
        initial = read_measure_csv(in);
    } else {
        initial = EmpiricalMeasure::dirac(point_param(c.params.at("initial"), c.fam.probe().lo, c.fam.dim(), "--initial"));
    }
    const auto n = c.params.at("N").get<std::size_t>();
    const auto curve = w1_decay_curve(c.fam, initial, c.params.at("n-max").get<std::size_t>(), n, c.seed,
                                      c.params.at("tol").get<double>(), n, c.params.at("coupled").get<bool>(), c.threads);
    auto f = c.out.open("decay.csv");
    write_decay_csv(f, curve, c.seed);
    json doc = curve.fit.to_json();
    doc["seed"] = c.seed;
    doc["w1"] = curve.w1;
    doc["method"] = to_string(curve.method);
    doc["coupled"] = curve.coupled;
    doc["bounded"] = curve.bounded;
    if (!curve.bounded)
        doc["warning"] = "bounded support not detected; the exponential bound may not apply";
    c.out.write_json("decay.json", doc);
    c.log << "r=" << io::num(curve.fit.r_hat) << " R2=" << io::num(curve.fit.r_squared) << '\n';
    return exit_ok;
}

int cmd_clt(const Context& c)
{
    const auto& p = c.params;
    const Observable raw = Observable::parse(p.at("observable").get<std::string>(), c.fam.dim());
    const Observable phi =
        center_observable(c.fam, raw, p.at("centering-samples").get<std::size_t>(), c.seed, c.threads);

    PoissonOptions opts;
    opts.grid_size = p.at("grid").get<std::size_t>();
    opts.tol = p.at("poisson-tol").get<double>();
    opts.inner_samples = p.at("inner-samples").get<std::size_t>();
    opts.threads = c.threads;
    const auto mode = p.at("mode").get<std::string>();
    require(mode == "auto" || mode == "exact" || mode == "montecarlo", "--mode: auto | exact | montecarlo");
    opts.mode = mode == "exact"        ? PoissonOptions::Mode::Exact
                : mode == "montecarlo" ? PoissonOptions::Mode::MonteCarlo
                                       : PoissonOptions::Mode::Auto;

    const auto mu = pullback_sample(c.fam, derive_seed(c.seed, "clt-mu"), opts.grid_size, 1e-12, 400,
                                    probe_cloud(c.fam.probe()), c.threads);
    const auto sol = poisson_solve(c.fam, phi, mu, opts, c.seed);
    const auto sigma = sigma_estimate(sol);

    const auto t_points = p.at("t-points").get<std::size_t>();
    require(t_points >= 1, "--t-points must be >= 1");
    std::vector<double> grid_t(t_points);
    for (std::size_t i = 0; i < t_points; ++i)
        grid_t[i] = static_cast<double>(i + 1) / static_cast<double>(t_points);
    const auto paths = partial_sum_paths(c.fam, phi, sigma.sigma2_mg, p.at("n").get<std::size_t>(), grid_t,
                                         p.at("replicas").get<std::size_t>(), c.seed, c.threads);
    CltReport rep = fclt_tests(paths);
    rep.sigma2_mg = sigma.sigma2_mg;
    rep.sigma2_resid = sigma.sigma2_resid;
    rep.poisson_residual = sol.residual;
    rep.truncation = sol.truncation;

    // Same diagnostics for chains started at a fixed point instead of a pullback sample.
    const Point x0 = point_param(p.at("x0"), c.fam.probe().lo, c.fam.dim(), "--x0");
    const auto point_paths = partial_sum_paths(c.fam, phi, sigma.sigma2_mg, p.at("n").get<std::size_t>(), grid_t,
                                               p.at("replicas").get<std::size_t>(), derive_seed(c.seed, "clt-point"),
                                               c.threads, x0);
    const CltReport from_point = fclt_tests(point_paths);

    json doc = rep.to_json();
    doc["from_point"] = json{{"x0", x0},
                             {"sigma2_direct", from_point.sigma2_direct},
                             {"ks_stat", from_point.ks_stat},
                             {"p_value", from_point.p_value},
                             {"variance_slope", from_point.variance_slope},
                             {"increment_corr", from_point.increment_corr},
                             {"mean_y1", from_point.mean_y1},
                             {"var_y1", from_point.var_y1}};
    doc["seed"] = c.seed;
    doc["observable"] = raw.label();
    doc["centering"] = phi.center();
    doc["transfer"] = sol.exact ? "exact" : "montecarlo";
    doc["term_norms"] = sol.term_norms;
    c.out.write_json("clt.json", doc);
    if (p.at("dump-paths").get<bool>()) {
        auto f = c.out.open("paths.csv");
        write_paths_csv(f, paths, c.seed);
    }
    c.log << "sigma2_mg=" << io::num(rep.sigma2_mg) << " sigma2_resid=" << io::num(rep.sigma2_resid)
          << " sigma2_direct=" << io::num(rep.sigma2_direct) << " ks_p=" << io::num(rep.p_value) << '\n';
    return exit_ok;
}

int cmd_simulate(const Context& c)
{
    const auto dir = c.params.at("direction").get<std::string>();
    require(dir == "forward" || dir == "reverse", "--direction: forward | reverse");
    const Point x0 = point_param(c.params.at("x0"), c.fam.probe().lo, c.fam.dim(), "--x0");
    const auto block = sample_block(c.fam.noise(), c.seed, c.params.at("stream").get<std::uint64_t>(),
                                    c.params.at("steps").get<std::size_t>());
    const auto probe = probe_cloud(c.fam.probe());
    const auto trace = dir == "forward" ? forward_orbit(c.fam, block, x0, probe) : reverse_orbit(c.fam, block, x0, probe);
    auto f = c.out.open("orbit.csv");
    write_orbit_csv(f, trace);
    c.log << "final=" << json(trace.positions.back()).dump() << (trace.saturated ? " (saturated)" : "") << '\n';
    return exit_ok;
}

int dispatch(const std::string& name, const Context& c)
{
    static const std::map<std::string, int (*)(const Context&)> table = {
        {"check-monotone", cmd_check_monotone}, {"check-splitting", cmd_check_splitting},
        {"sigma-decay", cmd_sigma_decay},       {"sync-rate", cmd_sync_rate},
        {"forward-gap", cmd_forward_gap},       {"stationary", cmd_stationary},
        {"w1-decay", cmd_w1_decay},             {"clt", cmd_clt},
        {"simulate", cmd_simulate}};
    return table.at(name)(c);
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"rdsync: random iterations of J-monotone maps"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    std::string family_name, config_path, out_dir = "out", j_text, probs_text;
    std::uint64_t seed = 1;
    bool seed_given = false;
    unsigned threads = 1;
    app.add_option("--family", family_name, "built-in family name");
    app.add_option("--config", config_path, "family config or run manifest (JSON)");
    app.add_option("--seed", seed, "root seed")->each([&](const std::string&) { seed_given = true; });
    app.add_option("--threads", threads, "worker threads")->check(CLI::Range(1u, 1024u));
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--J", j_text, "comma-separated 1-based J (overrides the config)");
    app.add_option("--probs", probs_text, "comma-separated symbol probabilities (overrides the config)");

    std::map<std::string, std::map<std::string, std::string>> raw;
    std::map<std::string, CLI::App*> subs;
    for (const auto& cmd : commands()) {
        CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
        subs[cmd.name] = sub;
        for (const auto& p : cmd.params) {
            auto* slot = &raw[cmd.name][p.name];
            sub->add_option("--" + p.name, *slot, p.help + " (default " + p.fallback.dump() + ")");
        }
        sub->fallthrough();
    }

    std::vector<const char*> argv;
    for (const auto& a : args)
        argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::Success& e) {
        app.exit(e, out, err);
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        const CLI::App* failed = &app;
        for (const auto* sub : app.get_subcommands())
            failed = sub;
        err << failed->help();
        return exit_usage;
    }

    std::string command;
    for (const auto& [name, sub] : subs)
        if (sub->parsed())
            command = name;
    const Command& spec = *std::find_if(commands().begin(), commands().end(),
                                        [&](const Command& c) { return c.name == command; });

    try {
        // Resolution order: built-in defaults < manifest params < explicit flags.
        json family_cfg;
        json params = json::object();
        if (!config_path.empty()) {
            json doc = read_json_file(config_path);
            if (doc.contains("family") && doc.at("family").is_object()) {
                require(!doc.contains("command") || doc.at("command") == command,
                        "manifest was written by '" + doc.value("command", std::string()) + "', not '" + command + "'");
                family_cfg = doc.at("family");
                if (doc.contains("params"))
                    params = doc.at("params");
                if (!seed_given && doc.contains("seed"))
                    seed = doc.at("seed").get<std::uint64_t>();
            } else {
                family_cfg = std::move(doc);
            }
        }
        if (!family_name.empty()) {
            require(family_cfg.is_null() || family_cfg.value("family", family_name) == family_name,
                    "--family disagrees with the config's family");
            if (family_cfg.is_null())
                family_cfg = json{{"family", family_name}};
        }
        require(!family_cfg.is_null(), "one of --family or --config is required");
        if (!j_text.empty()) {
            json members = json::array();
            for (const auto& v : parse_value({"J", ParamKind::Reals, {}, ""}, j_text)) {
                const double d = v.get<double>();
                require(d >= 1 && d == static_cast<double>(static_cast<std::size_t>(d)), "--J: indices are 1-based integers");
                members.push_back(static_cast<std::size_t>(d));
            }
            family_cfg["J"] = members;
        }
        if (!probs_text.empty())
            family_cfg["probs"] = parse_value({"probs", ParamKind::Reals, {}, ""}, probs_text);

        const MapFamily fam = make_family(family_cfg);
        const json& resolved = fam.config();
        std::vector<std::size_t> j_members;
        for (const auto& v : resolved.at("J"))
            j_members.push_back(static_cast<std::size_t>(v.get<double>()));
        const JOrder ord(fam.dim(), j_members, resolved.value("strict_tol", JOrder::default_strict_tol));

        json resolved_params = json::object();
        for (const auto& p : spec.params) {
            const std::string& flag = raw[command][p.name];
            if (!flag.empty())
                resolved_params[p.name] = parse_value(p, flag);
            else if (params.contains(p.name))
                resolved_params[p.name] = params.at(p.name);
            else
                resolved_params[p.name] = p.fallback;
        }
        for (const auto& [key, _] : params.items())
            require(resolved_params.contains(key), "manifest: unknown parameter '" + key + "' for " + command);

        const Artifacts artifacts{fs::path(out_dir)};
        json manifest{{"command", command}, {"seed", seed}, {"family", resolved}, {"params", resolved_params}};
        artifacts.write_json("manifest.json", manifest);

        const Context ctx{fam, ord, seed, threads, resolved_params, artifacts, out};
        return dispatch(command, ctx);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n' << app.help();
        return exit_usage;
    } catch (const DiagnosticError& e) {
        err << e.what() << '\n';
        return exit_soft_failure;
    } catch (const json::exception& e) {
        err << "usage error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    }
}

} // namespace rdsync::cli
