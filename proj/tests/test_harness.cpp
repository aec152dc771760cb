#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "sopt/harness.hpp"

using namespace sopt;
using namespace sopt::harness;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("sopt_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, const std::string& s) {
    std::ofstream f(p, std::ios::binary);
    f << s;
}

std::string run_cfg(const std::string& text, const fs::path& root, double scale = 1.0) {
    RunOptions opt;
    opt.scale = scale;
    opt.out_root = root.string();
    return run_experiment(Config::parse(text), opt);
}

const char* kTinyNav = R"(
[experiment]
kind = nav-ga
threads = 2
[nav]
steps = 40
obstacles = 5
drones = 10
test_seeds = 6
[ga]
population = 6
generations = 3
[grid]
nu = 0, 0.001
)";

}  // namespace

TEST(Config, ParseSectionsAndComments) {
    const auto c = Config::parse("top = 1\n[a]\nx = 2 # note\n; comment\ny = 3, 4 ,5\n[b]\nflag = yes\nname = hi\n");
    EXPECT_EQ(c.integer("top", 0), 1);
    EXPECT_EQ(c.num("a.x", 0), 2.0);
    EXPECT_EQ(c.nums("a.y", {}), (std::vector<double>{3, 4, 5}));
    EXPECT_TRUE(c.flag("b.flag", false));
    EXPECT_EQ(c.str("b.name", ""), "hi");
    EXPECT_EQ(c.num("b.missing", 7.5), 7.5);
    const auto eff = c.effective();
    EXPECT_NE(eff.find("[b]\nflag = true\nmissing = 7.5\nname = hi\n"), std::string::npos);
}

TEST(Config, ErrorsNameTheKey) {
    const auto c = Config::parse("[ga]\npopulation = ten\ngenerations = 2.5\n[x]\nflag = maybe\n");
    try {
        c.integer("ga.population", 1);
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("ga.population"), std::string::npos);
    }
    EXPECT_THROW(c.integer("ga.generations", 1), ConfigError);
    EXPECT_THROW(c.flag("x.flag", false), ConfigError);
    EXPECT_THROW(Config::parse("[broken\n"), ConfigError);
    EXPECT_THROW(Config::parse("novalue\n"), ConfigError);
    EXPECT_THROW(Config::load("/nonexistent/file.ini"), ConfigError);
}

TEST(Config, CheckUnused) {
    const auto c = Config::parse("[a]\nx = 1\ny = 2\n");
    c.num("a.x", 0);
    try {
        c.check_unused();
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("a.y"), std::string::npos);
    }
}

TEST(Scale, Apply) {
    EXPECT_EQ(Scale{1.0}.apply(1000), 1000);
    EXPECT_EQ(Scale{10.0}.apply(1000), 100);
    EXPECT_EQ(Scale{10000.0}.apply(1000), 1);
}

TEST(Run, UnknownKeyRejected) {
    const auto root = scratch("unknown");
    try {
        run_cfg("[experiment]\nkind = nav-ga\n[ga]\npopulaton = 3\n", root);
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("ga.populaton"), std::string::npos);
    }
    EXPECT_THROW(run_cfg("[experiment]\nkind = chess\n", root), ConfigError);
    EXPECT_THROW(run_cfg("[experiment]\nkind = bj1\n[bj]\nbet_variant = 4\n", root), ConfigError);
}

TEST(Run, NavTableAndDeterminism) {
    const auto root = scratch("nav");
    const auto a = run_cfg(std::string(kTinyNav) + "[experiment]\nname = a\n", root);
    const auto b = run_cfg(std::string(kTinyNav) + "[experiment]\nname = b\n", root);
    const auto t = read_csv((fs::path(a) / "table.csv").string());
    EXPECT_EQ(t.header, (std::vector<std::string>{"model", "method", "family", "nu", "beta", "k_in", "median_k_out",
                                                  "mean_k_out", "r_detection", "max_log_cond_post", "ess",
                                                  "invgamma_shape", "invgamma_rate", "trend_tau"}));
    EXPECT_EQ(t.rows.size(), 2u);
    EXPECT_EQ(slurp(fs::path(a) / "table.csv"), slurp(fs::path(b) / "table.csv"));
    EXPECT_EQ(slurp(fs::path(a) / "ga_navI_nu0_oos.csv"), slurp(fs::path(b) / "ga_navI_nu0_oos.csv"));
    EXPECT_TRUE(fs::exists(fs::path(a) / "ga_navI_nu0_trace.csv"));
    const auto eff = slurp(fs::path(a) / "effective_config.ini");
    EXPECT_NE(eff.find("population = 6"), std::string::npos);
    EXPECT_NE(eff.find("mutation_rate = 0.1"), std::string::npos);
    EXPECT_NE(eff.find("train_seed = 2024"), std::string::npos);
    // Line endings are LF only.
    EXPECT_EQ(slurp(fs::path(a) / "table.csv").find('\r'), std::string::npos);
}

TEST(Run, ThreadCountDoesNotChangeResults) {
    const auto root = scratch("threads");
    const auto a = run_cfg(std::string(kTinyNav) + "[experiment]\nname = one\nthreads = 1\n", root);
    const auto b = run_cfg(std::string(kTinyNav) + "[experiment]\nname = four\nthreads = 4\n", root);
    EXPECT_EQ(slurp(fs::path(a) / "table.csv"), slurp(fs::path(b) / "table.csv"));
}

TEST(Run, EnvOverridesOutputRoot) {
    const auto root = scratch("envroot");
    const auto other = scratch("envroot_cli");
    ::setenv("SOPT_OUT_ROOT", root.c_str(), 1);
    const auto dir = run_cfg(std::string(kTinyNav) + "[experiment]\nname = env\n", other);
    ::unsetenv("SOPT_OUT_ROOT");
    EXPECT_EQ(fs::path(dir).parent_path(), root);
}

TEST(Run, TicTacToeTableHasBaseline) {
    const auto root = scratch("ttt");
    const auto dir = run_cfg(R"(
[experiment]
kind = ttt-mcmc
[ttt]
train_games = 20
test_games = 50
baseline_games = 2000
[mcmc]
iterations = 300
burn_in = 100
[likelihood]
beta = 1, 10
)",
                             root);
    const auto t = read_csv((fs::path(dir) / "table.csv").string());
    ASSERT_EQ(t.rows.size(), 3u);
    EXPECT_EQ(t.rows.back()[t.index("method")], "baseline");
    const double base = std::stod(t.rows.back()[t.index("out_of_sample_pct")]);
    EXPECT_NEAR(base, 58.5, 3.5);
    EXPECT_FALSE(t.rows[0][t.index("ess")].empty());
    EXPECT_TRUE(fs::exists(fs::path(dir) / "test_games_sample.csv"));
    EXPECT_TRUE(fs::exists(fs::path(dir) / "mcmc_tttII_exponential_beta10_init1_summary.json"));
}

TEST(Run, BlackjackBaselinesAndArtifacts) {
    const auto root = scratch("bj");
    const auto dir = run_cfg(R"(
[experiment]
kind = bj2
[bj]
hands = 100
test_nights = 20
stake_log_nights = 3
bet_variant = 1
[ga]
population = 4
generations = 2
)",
                             root);
    const auto t = read_csv((fs::path(dir) / "table.csv").string());
    std::vector<std::string> policies;
    for (const auto& r : t.rows) policies.push_back(r[t.index("policy")]);
    EXPECT_EQ(policies, (std::vector<std::string>{"Unit Bet", "Random Bet", "TC > 0", "TC > 1", "TC > 2", "TC > 3",
                                                  "network"}));
    const auto stakes = read_csv((fs::path(dir) / "baseline_Unit_Bet_stakes.csv").string()).column("stake");
    EXPECT_EQ(stakes.size(), 300u);
    for (double s : stakes) EXPECT_EQ(s, 1.0);
    EXPECT_EQ(read_csv((fs::path(dir) / "ga_bjII_bet1_nu0_nights.csv").string()).rows.size(), 20u);
}

TEST(Run, ScaleShrinksCounts) {
    const auto root = scratch("scale");
    const auto dir = run_cfg(R"(
[experiment]
kind = bj1
[bj]
hands = 50
test_nights = 40
baselines = false
[ga]
population = 4
generations = 20
)",
                             root, 10.0);
    EXPECT_EQ(read_csv((fs::path(dir) / "ga_bjI_nu0_nights.csv").string()).rows.size(), 4u);
    EXPECT_EQ(read_csv((fs::path(dir) / "ga_bjI_nu0_trace.csv").string()).rows.size(), 2u);
    EXPECT_NE(slurp(fs::path(dir) / "effective_config.ini").find("# scale = 10"), std::string::npos);
}

TEST(Particles, CountsSplitAndAccuracyBand) {
    const auto ds = generate_particle_data(7);
    ASSERT_EQ(ds.rows.size(), 360u);
    int cls[3] = {0, 0, 0}, train[3] = {0, 0, 0};
    for (const auto& p : ds.rows) {
        ++cls[p.cls];
        train[p.cls] += p.train;
    }
    for (int c = 0; c < 3; ++c) {
        EXPECT_EQ(cls[c], 120);
        EXPECT_EQ(train[c], 60);
    }
    EXPECT_EQ(ds.train().size(), 180u);
    const double acc = nearest_centroid_accuracy(ds);
    EXPECT_GE(acc, 0.80);
    EXPECT_LE(acc, 0.92);
}

TEST(Particles, AccuracyBandAcrossSeeds) {
    double sum = 0;
    for (std::uint64_t s = 1; s <= 50; ++s) sum += nearest_centroid_accuracy(generate_particle_data(s));
    EXPECT_GE(sum / 50, 0.80);
    EXPECT_LE(sum / 50, 0.92);
}

TEST(Particles, CsvRoundTripAndSameSeedSameBytes) {
    const auto dir = scratch("particles");
    write_particle_csv((dir / "a.csv").string(), generate_particle_data(11));
    write_particle_csv((dir / "b.csv").string(), generate_particle_data(11));
    write_particle_csv((dir / "c.csv").string(), generate_particle_data(12));
    EXPECT_EQ(slurp(dir / "a.csv"), slurp(dir / "b.csv"));
    EXPECT_NE(slurp(dir / "a.csv"), slurp(dir / "c.csv"));
    const auto back = read_particle_csv((dir / "a.csv").string());
    ASSERT_EQ(back.rows.size(), 360u);
    const auto orig = generate_particle_data(11);
    for (std::size_t i = 0; i < 360; ++i) {
        EXPECT_NEAR(back.rows[i].x1, orig.rows[i].x1, 1e-9);
        EXPECT_EQ(back.rows[i].cls, orig.rows[i].cls);
        EXPECT_EQ(back.rows[i].train, orig.rows[i].train);
    }
}

TEST(Plot, HistogramProperties) {
    const auto one = histogram(std::vector<double>(25, 1.0), 50);
    ASSERT_EQ(one.count.size(), 1u);
    EXPECT_EQ(one.count[0], 25u);
    Rng r(1);
    std::vector<double> v(1000);
    for (auto& x : v) x = r.normal();
    const auto h = histogram(v, 50);
    std::size_t total = 0;
    for (auto c : h.count) total += c;
    EXPECT_EQ(total, 1000u);
    EXPECT_EQ(h.count.size(), 50u);
}

TEST(Plot, EmitHistogramsAndCurves) {
    const auto dir = scratch("plot");
    write_file(dir / "stakes.csv", "night,hand,stake\n1,1,1\n1,2,1\n1,3,1\n");
    emit_plot_data("bet-hist", (dir / "stakes.csv").string(), (dir / "bet.csv").string());
    const auto bet = read_csv((dir / "bet.csv").string());
    ASSERT_EQ(bet.rows.size(), 1u);
    EXPECT_EQ(bet.column("fraction")[0], 1.0);

    std::string nights = "night,seed,roi,hit_rate\n";
    Rng r(2);
    for (int i = 0; i < 1000; ++i) nights += std::to_string(i) + ",0," + std::to_string(r.normal(0, 3)) + ",0.4\n";
    write_file(dir / "nights.csv", nights);
    emit_plot_data("roi-hist", (dir / "nights.csv").string(), (dir / "roi.csv").string());
    double total = 0;
    for (double c : read_csv((dir / "roi.csv").string()).column("count")) total += c;
    EXPECT_EQ(total, 1000.0);

    nlohmann::json j;
    j["model"] = "navI";
    j["theta"] = std::vector<double>(27, 0.0);
    write_file(dir / "nav.json", j.dump());
    emit_plot_data("response-curve", (dir / "nav.json").string(), (dir / "curve.csv").string());
    const auto curve = read_csv((dir / "curve.csv").string());
    EXPECT_EQ(curve.rows.size(), 401u);
    for (double v : curve.column("out1")) EXPECT_EQ(v, 0.0);
    for (double v : curve.column("out2")) EXPECT_EQ(v, 0.0);

    EXPECT_THROW(emit_plot_data("pie-chart", (dir / "nights.csv").string(), (dir / "x.csv").string()),
                 std::invalid_argument);
}

TEST(Cli, GenDataMatchesLibraryAndRejectsBadInput) {
    const auto dir = scratch("cli");
    const std::string out = (dir / "p.csv").string();
    ASSERT_EQ(std::system((std::string(SOPT_CLI) + " gen-data --seed 5 --out " + out).c_str()), 0);
    write_particle_csv((dir / "q.csv").string(), generate_particle_data(5));
    EXPECT_EQ(slurp(out), slurp(dir / "q.csv"));

    write_file(dir / "bad.ini", "[experiment]\nkind = nav-ga\nbogus = 1\n");
    const std::string cmd = std::string(SOPT_CLI) + " run " + (dir / "bad.ini").string() + " > " +
                            (dir / "err.txt").string() + " 2>&1";
    EXPECT_NE(std::system(cmd.c_str()), 0);
    EXPECT_NE(slurp(dir / "err.txt").find("experiment.bogus"), std::string::npos);
}

TEST(Cli, RunWritesToOutRoot) {
    const auto dir = scratch("cli_run");
    write_file(dir / "nav.ini", std::string(kTinyNav) + "[experiment]\nname = viacli\n");
    const std::string cmd = std::string(SOPT_CLI) + " --scale 1 run " + (dir / "nav.ini").string() + " --out-root " +
                            (dir / "out").string() + " > /dev/null";
    ASSERT_EQ(std::system(cmd.c_str()), 0);
    EXPECT_TRUE(fs::exists(dir / "out" / "viacli" / "table.csv"));
}
