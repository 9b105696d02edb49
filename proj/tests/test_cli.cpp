#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
    int code = -1;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args)
{
    args.insert(args.begin(), "rdsync");
    std::ostringstream out, err;
    Result r;
    r.code = rdsync::cli::run(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

fs::path scratch(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / ("rdsync_cli_" + name);
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::map<std::string, std::string> artifacts(const fs::path& dir)
{
    std::map<std::string, std::string> files;
    for (const auto& e : fs::directory_iterator(dir))
        files[e.path().filename().string()] = slurp(e.path());
    return files;
}

json read_json(const fs::path& p)
{
    return json::parse(slurp(p));
}

// Small but complete invocations of every command.
const std::vector<std::vector<std::string>>& small_runs()
{
    static const std::vector<std::vector<std::string>> runs{
        {"check-monotone", "--family", "fig1-2d", "--pairs", "200"},
        {"check-splitting", "--family", "cantor2d", "--method", "montecarlo", "--blocks", "128"},
        {"sigma-decay", "--family", "cantor1d", "--x", "0.1", "--replicas", "500", "--j-max", "5"},
        {"sync-rate", "--family", "lip-pair", "--n-max", "12", "--replicas", "64", "--bootstrap", "20"},
        {"forward-gap", "--family", "cantor2d", "--n", "6"},
        {"stationary", "--family", "cantor2d", "--N", "300"},
        {"w1-decay", "--family", "cantor1d", "--n-max", "5", "--N", "256"},
        {"clt", "--family", "cantor1d", "--n", "200", "--replicas", "500", "--grid", "128", "--centering-samples", "512"},
        {"simulate", "--family", "cantor2d", "--steps", "6"},
    };
    return runs;
}

} // namespace

TEST(Cli, SplittingVerifiedOnCantor)
{
    const auto dir = scratch("split_ok");
    const auto r = run({"check-splitting", "--family", "cantor1d", "--m-max", "2", "--out", dir.string()});
    ASSERT_EQ(r.code, rdsync::cli::exit_ok) << r.err;
    const auto rep = read_json(dir / "splitting.json");
    EXPECT_TRUE(rep.at("verified").get<bool>());
    EXPECT_EQ(rep.at("m").get<int>(), 1);
}

TEST(Cli, RotationsAreASoftFailure)
{
    const auto dir = scratch("split_rot");
    const auto r = run({"check-splitting", "--family", "rotations", "--out", dir.string()});
    EXPECT_EQ(r.code, rdsync::cli::exit_soft_failure);
    EXPECT_FALSE(read_json(dir / "splitting.json").at("verified").get<bool>());
}

TEST(Cli, UsageErrors)
{
    const auto dir = scratch("usage");
    const auto out = dir.string();
    for (const auto& args : std::vector<std::vector<std::string>>{
             {"frobnicate", "--family", "cantor1d", "--out", out},
             {"check-splitting", "--family", "cantor1d", "--bogus", "1", "--out", out},
             {"check-splitting", "--out", out},
             {"check-splitting", "--family", "no-such-family", "--out", out},
             {"check-splitting", "--family", "cantor1d", "--method", "psychic", "--out", out},
             {"sigma-decay", "--family", "cantor1d", "--replicas", "10", "--out", out},
             {"stationary", "--family", "cantor1d", "--N", "many", "--out", out},
             {"check-monotone", "--family", "cantor2d", "--J", "0", "--out", out},
             {}}) {
        const auto r = run(args);
        EXPECT_EQ(r.code, rdsync::cli::exit_usage) << (args.empty() ? "" : args[0]) << ": " << r.err;
        EXPECT_FALSE(r.err.empty());
    }
    EXPECT_NE(run({"check-splitting", "--bogus"}).err.find("Usage"), std::string::npos);
}

TEST(Cli, HelpExitsCleanly)
{
    EXPECT_EQ(run({"--help"}).code, rdsync::cli::exit_ok);
}

TEST(Cli, ManifestEchoesResolvedRun)
{
    const auto dir = scratch("manifest");
    ASSERT_EQ(run({"sync-rate", "--family", "cantor1d", "--n-max", "10", "--replicas", "40", "--bootstrap", "10",
                   "--seed", "77", "--out", dir.string()})
                  .code,
              0);
    const auto m = read_json(dir / "manifest.json");
    EXPECT_EQ(m.at("command"), "sync-rate");
    EXPECT_EQ(m.at("seed").get<std::uint64_t>(), 77u);
    EXPECT_EQ(m.at("family").at("family"), "cantor1d");
    EXPECT_EQ(m.at("params").at("n-max").get<int>(), 10);
    EXPECT_EQ(m.at("params").at("replicas").get<int>(), 40);
    EXPECT_FALSE(m.at("params").contains("threads"));
}

TEST(Cli, ManifestRoundTripIsByteIdentical)
{
    for (const auto& args : small_runs()) {
        const auto a = scratch("rt_a_" + args[0]);
        const auto b = scratch("rt_b_" + args[0]);
        auto first = args;
        first.insert(first.end(), {"--seed", "5", "--out", a.string()});
        const auto r1 = run(first);
        ASSERT_EQ(r1.code, 0) << args[0] << ": " << r1.err;
        const auto r2 = run({args[0], "--config", (a / "manifest.json").string(), "--out", b.string()});
        ASSERT_EQ(r2.code, 0) << args[0] << ": " << r2.err;
        EXPECT_EQ(artifacts(a), artifacts(b)) << args[0];
    }
}

TEST(Cli, ManifestForAnotherCommandIsRejected)
{
    const auto a = scratch("wrong_cmd_a");
    ASSERT_EQ(run({"simulate", "--family", "cantor1d", "--steps", "3", "--out", a.string()}).code, 0);
    const auto r = run({"stationary", "--config", (a / "manifest.json").string(), "--out", scratch("wrong_cmd_b").string()});
    EXPECT_EQ(r.code, rdsync::cli::exit_usage);
}

TEST(Cli, ExplicitFlagsOverrideTheManifest)
{
    const auto a = scratch("override_a");
    const auto b = scratch("override_b");
    ASSERT_EQ(run({"simulate", "--family", "cantor1d", "--steps", "3", "--seed", "4", "--out", a.string()}).code, 0);
    ASSERT_EQ(run({"simulate", "--config", (a / "manifest.json").string(), "--steps", "5", "--out", b.string()}).code, 0);
    const auto m = read_json(b / "manifest.json");
    EXPECT_EQ(m.at("params").at("steps").get<int>(), 5);
    EXPECT_EQ(m.at("seed").get<int>(), 4);
}

TEST(Cli, ThreadCountDoesNotChangeArtifacts)
{
    for (const auto& args : small_runs()) {
        const auto a = scratch("th1_" + args[0]);
        const auto b = scratch("th8_" + args[0]);
        auto one = args;
        one.insert(one.end(), {"--seed", "9", "--threads", "1", "--out", a.string()});
        auto eight = args;
        eight.insert(eight.end(), {"--seed", "9", "--threads", "8", "--out", b.string()});
        ASSERT_EQ(run(one).code, 0) << args[0];
        ASSERT_EQ(run(eight).code, 0) << args[0];
        EXPECT_EQ(artifacts(a), artifacts(b)) << args[0];
    }
}

TEST(Cli, NumericFilesCarrySeedAndHeader)
{
    for (const auto& args : small_runs()) {
        const auto dir = scratch("hdr_" + args[0]);
        auto full = args;
        full.insert(full.end(), {"--seed", "31", "--out", dir.string()});
        ASSERT_EQ(run(full).code, 0) << args[0];
        for (const auto& [name, body] : artifacts(dir)) {
            if (name.ends_with(".csv")) {
                EXPECT_EQ(body.rfind("# seed=31", 0), 0u) << name;
                std::istringstream lines(body);
                std::string line;
                while (std::getline(lines, line) && line.starts_with("#")) {
                }
                EXPECT_NE(line.find(','), std::string::npos) << name << " has no header row";
            } else if (name.ends_with(".json")) {
                EXPECT_EQ(json::parse(body).at("seed").get<int>(), 31) << name;
            }
        }
    }
}

TEST(Cli, CltOnCantor)
{
    const auto dir = scratch("clt");
    const auto r = run({"clt", "--family", "cantor1d", "--observable", "coord:1", "--n", "10000", "--replicas", "1000",
                        "--out", dir.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rep = read_json(dir / "clt.json");
    EXPECT_NEAR(rep.at("sigma2_mg").get<double>(), 0.25, 0.025);
    // The chain started at the probe corner obeys the same limit.
    EXPECT_EQ(rep.at("from_point").at("x0"), json::array({0.0}));
    EXPECT_NEAR(rep.at("from_point").at("var_y1").get<double>(), 1.0, 0.2);
}
