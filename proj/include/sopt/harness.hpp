#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "sopt/blackjack.hpp"
#include "sopt/mcmc.hpp"
#include "sopt/network.hpp"
#include "sopt/optimizers.hpp"

namespace sopt::harness {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Sectioned key = value text. Keys are addressed as "section.key"; '#' and ';' start comments.
/// Every lookup is remembered so the values actually used can be echoed back.
class Config {
public:
    static Config parse(const std::string& text);
    static Config load(const std::string& path);

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    void set(const std::string& key, const std::string& value) { values_[key] = value; }

    std::string str(const std::string& key, const std::string& def) const;
    double num(const std::string& key, double def) const;
    long integer(const std::string& key, long def) const;
    bool flag(const std::string& key, bool def) const;
    std::vector<double> nums(const std::string& key, const std::vector<double>& def) const;
    std::vector<std::string> strs(const std::string& key, const std::vector<std::string>& def) const;

    std::vector<std::string> keys() const;
    /// Throws naming the first key that was never looked up.
    void check_unused() const;
    /// Every consulted key with the value used, grouped by section.
    std::string effective() const;

private:
    std::map<std::string, std::string> values_;
    mutable std::map<std::string, std::string> used_;
};

/// `--scale F` divides iteration counts, generations, night counts and test-set sizes.
struct Scale {
    double factor = 1.0;
    long apply(long n) const;
};

// Particle data.

struct Particle {
    double x1, y2;
    int cls;  // 0, 1, 2
    bool train;
};

struct ParticleDataset {
    std::vector<Particle> rows;
    LabeledSet train() const;
    LabeledSet test() const;
};

/// Three Gaussian classes of 120 points around the corners of an equilateral triangle.
/// Each class is split 60/60 between train and test.
ParticleDataset generate_particle_data(std::uint64_t seed, double radius = 2.0, double sigma = 1.2);
void write_particle_csv(const std::string& path, const ParticleDataset& ds);
ParticleDataset read_particle_csv(const std::string& path);
/// Centroids from the training rows, accuracy on the test rows.
double nearest_centroid_accuracy(const ParticleDataset& ds);

/// 2 -> 3 -> 3 -> 3, softmax head.
NetworkShape classifier_shape();

struct ClassifyResult {
    std::string method;
    ParamVector theta;
    double in_acc = 0.0, out_acc = 0.0;
    std::vector<double> theta_norm2, sigma2;
};

ClassifyResult classify_mcmc(const ParticleDataset& ds, const ParamVector& theta0, const ChainConfig& cfg, Rng& rng);
ClassifyResult classify_gd(const ParticleDataset& ds, const ParamVector& theta0, const GdHybridConfig& cfg, Rng& rng);
ClassifyResult classify_ga(const ParticleDataset& ds, const ParamVector& theta0, HybridConfig cfg, Rng& rng);

// Blackjack problems.

struct BjProblem {
    int problem = 1;      // 1 decision, 2 bet size, 3 both
    int bet_variant = 2;  // 1 true count only, 2 all features
    int hands = 1000;
    bj::Rules rules;
};

NetworkShape bj_decision_shape();
NetworkShape bj_bet_shape(int variant);
std::size_t bj_dim(const BjProblem& p);
/// Problem III packs [theta_bet, theta_decision].
bj::NightResult bj_night(const BjProblem& p, const ParamVector& theta, std::uint64_t seed, bool keep_log = false);

// Experiments.

struct RunOptions {
    double scale = 1.0;
    /// Overrides experiment.out_root; the SOPT_OUT_ROOT environment variable overrides both.
    std::string out_root;
};

/// Runs one experiment file and returns the output directory.
std::string run_experiment(const std::string& config_path, const RunOptions& opt);
std::string run_experiment(Config cfg, const RunOptions& opt);

// Plot data.

struct Histogram {
    std::vector<double> lo, hi;
    std::vector<std::size_t> count;
};

/// Equal-width bins over [min, max]; a constant input gives a single bin.
Histogram histogram(const std::vector<double>& values, std::size_t bins);

/// Kinds: roi-hist, bet-hist, sigma2-hist (CSV input with roi / stake / sigma2 column),
/// response-curve (theta JSON input). Unknown kinds throw.
void emit_plot_data(const std::string& kind, const std::string& in, const std::string& out);

/// Minimal CSV reader used by the plot emitters and tests: header plus rows of cells.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<double> column(const std::string& name) const;
    std::size_t index(const std::string& name) const;
};
CsvTable read_csv(const std::string& path);

}  // namespace sopt::harness
