#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace sopt {

/// xoshiro256** 1.0 seeded through splitmix64.
///
/// The four state words are the first four outputs of splitmix64 started at
/// `seed`. Sub-streams hash (seed, index) through splitmix64 so that each
/// drone, hand or game can own an independent generator.
///
/// Test vector: Rng(0).next_u64() == 0x99ec5f36cb75f2b4.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0);

    std::uint64_t seed() const { return seed_; }

    /// Independent generator for a labelled sub-task.
    Rng substream(std::uint64_t index) const;

    std::uint64_t next_u64();
    /// Uniform on [0, 1) with 53 bits of resolution.
    double uniform();
    /// Uniform on (0, 1); never returns 0.
    double uniform_open();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Uniform integer on [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n);
    /// Standard normal via the Marsaglia polar method.
    double normal();
    double normal(double mean, double sd) { return mean + sd * normal(); }

private:
    std::uint64_t seed_;
    std::uint64_t s_[4];
    bool has_spare_ = false;
    double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t& state);

struct InvGammaParams {
    double shape;
    double rate;
};

/// Gamma(shape, 1) by Marsaglia and Tsang; shape < 1 uses the u^(1/shape) boost.
double sample_gamma(double shape, Rng& rng);

/// rate / Gamma(shape, 1). Throws std::invalid_argument on nonpositive parameters.
double sample_inv_gamma(const InvGammaParams& p, Rng& rng);

/// Posterior of the dispersion given theta: (a + S/2, b + ||theta||^2 / 2).
InvGammaParams inv_gamma_posterior(double a, double b, std::size_t S, double theta_norm2);

/// Draw from N(mean, cov). The covariance is factored with a pivoted LDLT so
/// rank-deficient matrices are allowed; a negative pivot beyond round-off
/// raises DegenerateCovariance.
Eigen::VectorXd sample_mvn(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov, Rng& rng);

/// Factor once, draw many times.
class MvnSampler {
public:
    MvnSampler() = default;
    explicit MvnSampler(const Eigen::MatrixXd& cov);
    Eigen::VectorXd draw(const Eigen::VectorXd& mean, Rng& rng) const;
    const Eigen::MatrixXd& factor() const { return L_; }

private:
    Eigen::MatrixXd L_;
};

struct DegenerateCovariance : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace sopt
