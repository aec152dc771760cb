#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sopt/rng.hpp"

namespace sopt {

using ParamVector = std::vector<double>;
using LogLikFn = std::function<double(const ParamVector&)>;

struct ChainConfig {
    int iterations = 100000;
    int burn_in = 20000;
    double sigma_init2 = 1.0;
    int stride = 1000;     // delta
    int window = 100;      // Delta
    double jitter = 1e-6;  // epsilon
    double kappa = 0.6;
    double a = 1e-6;
    double b = 1e-6;
    double s2_init = 1.0;
    double target_accept = 0.234;
    int rate_window = 500;
    int thin = 1;
    void validate() const;
};

/// 1-based history indices that feed the proposal covariance at iteration j.
std::vector<long> strided_indices(long j, long stride, long window);

/// Sample covariance (n-1 denominator) of the columns of `points` plus eps I.
Eigen::MatrixXd adapt_covariance(const std::vector<const double*>& points, std::size_t dim, double eps);

/// s2 * exp(j^-kappa (rate - target)).
double adapt_scale(double s2, double rate, long j, double kappa, double target = 0.234);

double norm2(const ParamVector& v);

/// loglik(theta*) - loglik(theta) with the convention that two -inf values cancel.
double loglik_difference(double ll_new, double ll_old);

/// log alpha for the theta block, capped at 0.
double block1_log_alpha(double ll_new, double norm2_new, double ll_old, double norm2_old, double sigma2);

/// One Inv-Gamma(a + S/2, b + ||theta||^2/2) draw.
double block2_step(const ParamVector& theta, double a, double b, Rng& rng);

/// log alpha for a joint (theta, sigma2) move whose sigma2 proposal is drawn
/// independently from Inv-Gamma(aQ, bQ).
double joint_log_alpha(double ll_new, double norm2_new, double s2_new, double ll_old, double norm2_old,
                       double s2_old, std::size_t S, double a, double b, double aQ, double bQ);

/// log N(theta; 0, sigma2 I) including the normalizing constant.
double log_normal_prior(double norm2, std::size_t S, double sigma2);

struct ChainState {
    ParamVector theta;
    double loglik = 0.0;
    double sigma2 = 1.0;
    long j = 0;
    double s2 = 1.0;
};

struct ChainOutput {
    std::size_t dim = 0;
    int burn_in = 0;
    // Full-resolution traces, one entry per iteration.
    std::vector<double> log_cond_post;
    std::vector<double> loglik;
    std::vector<double> theta_norm2;
    std::vector<double> sigma2;
    std::vector<std::uint8_t> accepted;
    // Post-burn-in samples (thinned) with their iteration numbers.
    std::vector<ParamVector> samples;
    std::vector<long> sample_iter;
    std::vector<double> sample_log_cond_post;
    std::vector<double> sample_sigma2;
    ParamVector best_theta;
    double best_loglik = -std::numeric_limits<double>::infinity();
    double final_s2 = 1.0;
    Eigen::MatrixXd final_cov;

    double acceptance_rate(long from_iter, long to_iter) const;
    void write_trace_csv(const std::string& path) const;
};

struct LogLikNaN : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Two-block sampler: adaptive random-walk MH on theta, then a Gibbs draw of sigma2.
class TwoBlockSampler {
public:
    TwoBlockSampler(ChainConfig cfg, std::size_t dim, LogLikFn loglik);

    /// Draws theta^(1) ~ N(0, sigma_init2 I), sigma2^(1) from its conditional.
    void initialize(Rng& rng);
    /// Start from a given theta instead of a random draw.
    void initialize(const ParamVector& theta0, Rng& rng);

    /// One MH move on theta using the current proposal. Returns whether it was accepted.
    bool block1_step(Rng& rng);
    /// Gibbs draw of sigma2 given theta.
    void block2_step(Rng& rng);
    /// Full iteration including adaptation while in burn-in.
    bool step(Rng& rng);

    const ChainState& state() const { return st_; }
    const Eigen::MatrixXd& proposal_cov() const { return cov_; }
    double scale() const { return st_.s2; }
    bool frozen() const { return st_.j > cfg_.burn_in; }

    /// Force the state (used by tests and the joint variant).
    void set_state(const ParamVector& theta, double sigma2);

private:
    void record_history();
    void update_proposal();

    ChainConfig cfg_;
    std::size_t dim_;
    LogLikFn loglik_;
    ChainState st_;
    Eigen::MatrixXd cov_;
    MvnSampler sampler_;
    std::vector<double> history_;  // burn-in thetas, row j-1 holds theta^(j)
    Eigen::VectorXd run_mean_;
    Eigen::MatrixXd run_m2_;
    std::vector<std::uint8_t> recent_;
    long recent_sum_ = 0;
};

ChainOutput run_two_block(const ChainConfig& cfg, std::size_t dim, const LogLikFn& loglik, Rng& rng);
/// Same, starting from theta0 (sigma2 is still drawn from its conditional).
ChainOutput run_two_block(const ChainConfig& cfg, const ParamVector& theta0, const LogLikFn& loglik, Rng& rng);

struct JointMhConfig {
    int iterations = 100000;
    int burn_in = 20000;
    double sigma_init2 = 1.0;
    double proposal_var = 0.01;  // sigma_Q^2 for theta
    double aQ = 2.0;
    double bQ = 1.0;
    double a = 1e-6;
    double b = 1e-6;
};

struct JointState {
    ParamVector theta;
    double loglik;
    double sigma2;
};

/// One joint MH step on (theta, sigma2). Returns whether it was accepted.
bool joint_mh_step(JointState& st, const LogLikFn& loglik, const JointMhConfig& cfg, Rng& rng);

ChainOutput run_joint_mh(const JointMhConfig& cfg, std::size_t dim, const LogLikFn& loglik, Rng& rng);

/// Sample with the largest recorded log conditional posterior; earliest wins ties.
ParamVector map_estimate(const ChainOutput& out);
std::size_t map_index(const std::vector<double>& log_posts);

}  // namespace sopt
