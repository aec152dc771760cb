#include "sopt/mcmc.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

namespace sopt {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

void ChainConfig::validate() const {
    if (iterations < 1) throw std::invalid_argument("chain needs at least one iteration");
    if (burn_in < 0 || burn_in >= iterations) throw std::invalid_argument("burn_in must be in [0, iterations)");
    if (stride < 1 || window < 1) throw std::invalid_argument("stride and window must be at least 1");
    if (!(sigma_init2 > 0.0) || !(s2_init > 0.0) || !(jitter > 0.0))
        throw std::invalid_argument("variances must be positive");
    if (a < 0.0 || b < 0.0) throw std::invalid_argument("hyperprior parameters must be nonnegative");
    if (rate_window < 1 || thin < 1) throw std::invalid_argument("rate_window and thin must be at least 1");
}

std::vector<long> strided_indices(long j, long stride, long window) {
    std::vector<long> idx;
    if (j <= 0) return idx;
    if (j <= stride) {
        idx.reserve(j);
        for (long i = 1; i <= j; ++i) idx.push_back(i);
        return idx;
    }
    if (j <= stride * window) {
        const long m = j / stride;
        const long start = j - m * stride;
        for (long i = 0; i < m; ++i) {
            const long v = start + i * stride;
            if (v >= 1) idx.push_back(v);
        }
    } else {
        const long start = j - stride * window;
        for (long i = 0; i < window; ++i) idx.push_back(start + i * stride);
    }
    idx.push_back(j);
    return idx;
}

Eigen::MatrixXd adapt_covariance(const std::vector<const double*>& points, std::size_t dim, double eps) {
    const auto d = static_cast<Eigen::Index>(dim);
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
    const std::size_t n = points.size();
    if (n >= 2) {
        Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
        for (auto p : points) mean += Eigen::Map<const Eigen::VectorXd>(p, d);
        mean /= static_cast<double>(n);
        for (auto p : points) {
            const Eigen::VectorXd c = Eigen::Map<const Eigen::VectorXd>(p, d) - mean;
            cov.selfadjointView<Eigen::Lower>().rankUpdate(c);
        }
        cov = cov.selfadjointView<Eigen::Lower>();
        cov /= static_cast<double>(n - 1);
    }
    cov.diagonal().array() += eps;
    return cov;
}

double adapt_scale(double s2, double rate, long j, double kappa, double target) {
    const double gamma = std::pow(static_cast<double>(j), -kappa);
    return s2 * std::exp(gamma * (rate - target));
}

double norm2(const ParamVector& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
}

double loglik_difference(double ll_new, double ll_old) {
    if (ll_new == kNegInf && ll_old == kNegInf) return 0.0;
    return ll_new - ll_old;
}

double block1_log_alpha(double ll_new, double norm2_new, double ll_old, double norm2_old, double sigma2) {
    if (std::isnan(ll_new) || std::isnan(ll_old)) throw LogLikNaN("log-likelihood returned NaN");
    const double v = loglik_difference(ll_new, ll_old) - norm2_new / (2.0 * sigma2) + norm2_old / (2.0 * sigma2);
    return std::min(v, 0.0);
}

double block2_step(const ParamVector& theta, double a, double b, Rng& rng) {
    return sample_inv_gamma(inv_gamma_posterior(a, b, theta.size(), norm2(theta)), rng);
}

double log_normal_prior(double norm2, std::size_t S, double sigma2) {
    return -0.5 * static_cast<double>(S) * std::log(2.0 * std::numbers::pi * sigma2) - norm2 / (2.0 * sigma2);
}

double joint_log_alpha(double ll_new, double norm2_new, double s2_new, double ll_old, double norm2_old,
                       double s2_old, std::size_t S, double a, double b, double aQ, double bQ) {
    if (std::isnan(ll_new) || std::isnan(ll_old)) throw LogLikNaN("log-likelihood returned NaN");
    auto log_ig_kernel = [](double x, double shape, double rate) { return -(shape + 1.0) * std::log(x) - rate / x; };
    const double target_new = log_normal_prior(norm2_new, S, s2_new) + log_ig_kernel(s2_new, a, b);
    const double target_old = log_normal_prior(norm2_old, S, s2_old) + log_ig_kernel(s2_old, a, b);
    // q(old | new) / q(new | old) for an independence proposal on sigma2.
    const double hastings = log_ig_kernel(s2_old, aQ, bQ) - log_ig_kernel(s2_new, aQ, bQ);
    const double v = loglik_difference(ll_new, ll_old) + target_new - target_old + hastings;
    return std::min(v, 0.0);
}

double ChainOutput::acceptance_rate(long from_iter, long to_iter) const {
    long n = 0, acc = 0;
    for (long j = std::max(from_iter, 1L); j <= to_iter && j <= static_cast<long>(accepted.size()); ++j) {
        ++n;
        acc += accepted[j - 1];
    }
    return n ? static_cast<double>(acc) / static_cast<double>(n) : 0.0;
}

void ChainOutput::write_trace_csv(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path);
    f.precision(17);
    f << "iteration,log_cond_post,theta_norm2,sigma2,accepted\n";
    for (std::size_t i = 0; i < log_cond_post.size(); ++i)
        f << (i + 1) << ',' << log_cond_post[i] << ',' << theta_norm2[i] << ',' << sigma2[i] << ','
          << static_cast<int>(accepted[i]) << '\n';
}

TwoBlockSampler::TwoBlockSampler(ChainConfig cfg, std::size_t dim, LogLikFn loglik)
    : cfg_(cfg), dim_(dim), loglik_(std::move(loglik)) {
    cfg_.validate();
    if (dim_ == 0) throw std::invalid_argument("parameter dimension must be positive");
    const auto d = static_cast<Eigen::Index>(dim_);
    cov_ = Eigen::MatrixXd::Identity(d, d);
    sampler_ = MvnSampler(cov_);
    run_mean_ = Eigen::VectorXd::Zero(d);
    run_m2_ = Eigen::MatrixXd::Zero(d, d);
    recent_.assign(static_cast<std::size_t>(cfg_.rate_window), 0);
}

void TwoBlockSampler::initialize(Rng& rng) {
    ParamVector theta(dim_);
    const double sd = std::sqrt(cfg_.sigma_init2);
    for (auto& t : theta) t = sd * rng.normal();
    initialize(theta, rng);
}

void TwoBlockSampler::initialize(const ParamVector& theta0, Rng& rng) {
    if (theta0.size() != dim_) throw std::invalid_argument("initial theta has wrong dimension");
    st_.theta = theta0;
    st_.loglik = loglik_(st_.theta);
    if (std::isnan(st_.loglik)) throw LogLikNaN("log-likelihood returned NaN at the initial point");
    st_.s2 = cfg_.s2_init;
    st_.j = 1;
    st_.sigma2 = sopt::block2_step(st_.theta, cfg_.a, cfg_.b, rng);
    history_.clear();
    run_mean_.setZero();
    run_m2_.setZero();
    recent_sum_ = 0;
    std::fill(recent_.begin(), recent_.end(), 0);
    if (cfg_.burn_in >= 1) {
        record_history();
        update_proposal();
    }
}

void TwoBlockSampler::set_state(const ParamVector& theta, double sigma2) {
    st_.theta = theta;
    st_.loglik = loglik_(theta);
    st_.sigma2 = sigma2;
}

void TwoBlockSampler::record_history() {
    history_.insert(history_.end(), st_.theta.begin(), st_.theta.end());
    const auto d = static_cast<Eigen::Index>(dim_);
    const double n = static_cast<double>(st_.j);
    const Eigen::Map<const Eigen::VectorXd> x(st_.theta.data(), d);
    const Eigen::VectorXd delta = x - run_mean_;
    run_mean_ += delta / n;
    run_m2_.noalias() += delta * (x - run_mean_).transpose();
}

void TwoBlockSampler::update_proposal() {
    const long j = st_.j;
    const auto d = static_cast<Eigen::Index>(dim_);
    if (j < 2) {
        cov_ = Eigen::MatrixXd::Identity(d, d);
    } else if (j <= cfg_.stride) {
        cov_ = run_m2_ / static_cast<double>(j - 1);
        cov_ = 0.5 * (cov_ + cov_.transpose()).eval();
        cov_.diagonal().array() += cfg_.jitter;
    } else {
        const auto idx = strided_indices(j, cfg_.stride, cfg_.window);
        std::vector<const double*> pts;
        pts.reserve(idx.size());
        for (long i : idx) pts.push_back(history_.data() + static_cast<std::size_t>(i - 1) * dim_);
        cov_ = adapt_covariance(pts, dim_, cfg_.jitter);
    }
    sampler_ = MvnSampler(cov_);
}

bool TwoBlockSampler::block1_step(Rng& rng) {
    const auto d = static_cast<Eigen::Index>(dim_);
    const Eigen::Map<const Eigen::VectorXd> cur(st_.theta.data(), d);
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(d);
    const Eigen::VectorXd step = sampler_.draw(zero, rng) * std::sqrt(st_.s2);
    ParamVector prop(dim_);
    Eigen::Map<Eigen::VectorXd>(prop.data(), d) = cur + step;
    const double ll_new = loglik_(prop);
    const double la = block1_log_alpha(ll_new, norm2(prop), st_.loglik, norm2(st_.theta), st_.sigma2);
    const double lu = std::log(rng.uniform_open());
    if (lu < la) {
        st_.theta = std::move(prop);
        st_.loglik = ll_new;
        return true;
    }
    return false;
}

void TwoBlockSampler::block2_step(Rng& rng) { st_.sigma2 = sopt::block2_step(st_.theta, cfg_.a, cfg_.b, rng); }

bool TwoBlockSampler::step(Rng& rng) {
    const bool acc = block1_step(rng);
    block2_step(rng);
    const long j = st_.j;  // proposal index just used
    if (j <= cfg_.burn_in) {
        const auto w = static_cast<std::size_t>(cfg_.rate_window);
        auto& slot = recent_[static_cast<std::size_t>(j - 1) % w];
        recent_sum_ += static_cast<long>(acc) - slot;
        slot = acc;
        const long n = std::min<long>(j, cfg_.rate_window);
        const double rate = static_cast<double>(recent_sum_) / static_cast<double>(n);
        st_.s2 = adapt_scale(st_.s2, rate, j, cfg_.kappa, cfg_.target_accept);
    }
    ++st_.j;
    if (st_.j <= cfg_.burn_in) {
        record_history();
        update_proposal();
    }
    return acc;
}

namespace {

ChainOutput run_chain(const ChainConfig& cfg, std::size_t dim, const LogLikFn& loglik, Rng& rng,
                      const ParamVector* theta0) {
    TwoBlockSampler s(cfg, dim, loglik);
    if (theta0) s.initialize(*theta0, rng);
    else s.initialize(rng);
    ChainOutput out;
    out.dim = dim;
    out.burn_in = cfg.burn_in;
    const auto n = static_cast<std::size_t>(cfg.iterations);
    out.log_cond_post.reserve(n);
    out.loglik.reserve(n);
    out.theta_norm2.reserve(n);
    out.sigma2.reserve(n);
    out.accepted.reserve(n);
    auto record = [&](long iter, bool acc) {
        const auto& st = s.state();
        const double n2 = norm2(st.theta);
        const double lcp = st.loglik + log_normal_prior(n2, dim, st.sigma2);
        out.log_cond_post.push_back(lcp);
        out.loglik.push_back(st.loglik);
        out.theta_norm2.push_back(n2);
        out.sigma2.push_back(st.sigma2);
        out.accepted.push_back(acc);
        if (iter > cfg.burn_in && (iter - cfg.burn_in - 1) % cfg.thin == 0) {
            out.samples.push_back(st.theta);
            out.sample_iter.push_back(iter);
            out.sample_log_cond_post.push_back(lcp);
            out.sample_sigma2.push_back(st.sigma2);
        }
        if (st.loglik > out.best_loglik || out.best_theta.empty()) {
            out.best_loglik = st.loglik;
            out.best_theta = st.theta;
        }
    };
    // Iteration 1 is the initial draw; each further iteration is one MH move plus one Gibbs draw.
    record(1, true);
    for (long it = 2; it <= cfg.iterations; ++it) record(it, s.step(rng));
    out.final_s2 = s.scale();
    out.final_cov = s.proposal_cov();
    return out;
}

}  // namespace

ChainOutput run_two_block(const ChainConfig& cfg, std::size_t dim, const LogLikFn& loglik, Rng& rng) {
    return run_chain(cfg, dim, loglik, rng, nullptr);
}

ChainOutput run_two_block(const ChainConfig& cfg, const ParamVector& theta0, const LogLikFn& loglik, Rng& rng) {
    return run_chain(cfg, theta0.size(), loglik, rng, &theta0);
}

bool joint_mh_step(JointState& st, const LogLikFn& loglik, const JointMhConfig& cfg, Rng& rng) {
    const std::size_t S = st.theta.size();
    ParamVector prop(S);
    const double sd = std::sqrt(cfg.proposal_var);
    for (std::size_t i = 0; i < S; ++i) prop[i] = st.theta[i] + sd * rng.normal();
    const double s2_new = sample_inv_gamma({cfg.aQ, cfg.bQ}, rng);
    const double ll_new = loglik(prop);
    const double la = joint_log_alpha(ll_new, norm2(prop), s2_new, st.loglik, norm2(st.theta), st.sigma2, S, cfg.a,
                                      cfg.b, cfg.aQ, cfg.bQ);
    if (std::log(rng.uniform_open()) < la) {
        st.theta = std::move(prop);
        st.loglik = ll_new;
        st.sigma2 = s2_new;
        return true;
    }
    return false;
}

ChainOutput run_joint_mh(const JointMhConfig& cfg, std::size_t dim, const LogLikFn& loglik, Rng& rng) {
    if (cfg.iterations < 1 || cfg.burn_in < 0 || cfg.burn_in >= cfg.iterations)
        throw std::invalid_argument("joint MH: bad iteration counts");
    JointState st;
    st.theta.resize(dim);
    const double sd = std::sqrt(cfg.sigma_init2);
    for (auto& t : st.theta) t = sd * rng.normal();
    st.loglik = loglik(st.theta);
    st.sigma2 = sample_inv_gamma({cfg.aQ, cfg.bQ}, rng);
    ChainOutput out;
    out.dim = dim;
    out.burn_in = cfg.burn_in;
    for (long it = 1; it <= cfg.iterations; ++it) {
        const bool acc = it == 1 ? true : joint_mh_step(st, loglik, cfg, rng);
        const double n2 = norm2(st.theta);
        const double lcp = st.loglik + log_normal_prior(n2, dim, st.sigma2);
        out.log_cond_post.push_back(lcp);
        out.loglik.push_back(st.loglik);
        out.theta_norm2.push_back(n2);
        out.sigma2.push_back(st.sigma2);
        out.accepted.push_back(acc);
        if (it > cfg.burn_in) {
            out.samples.push_back(st.theta);
            out.sample_iter.push_back(it);
            out.sample_log_cond_post.push_back(lcp);
            out.sample_sigma2.push_back(st.sigma2);
        }
        if (st.loglik > out.best_loglik || out.best_theta.empty()) {
            out.best_loglik = st.loglik;
            out.best_theta = st.theta;
        }
    }
    return out;
}

std::size_t map_index(const std::vector<double>& log_posts) {
    if (log_posts.empty()) throw std::invalid_argument("map estimate of an empty chain");
    std::size_t best = 0;
    for (std::size_t i = 1; i < log_posts.size(); ++i)
        if (log_posts[i] > log_posts[best]) best = i;
    return best;
}

ParamVector map_estimate(const ChainOutput& out) {
    if (out.samples.empty()) throw std::invalid_argument("map estimate of an empty chain");
    return out.samples[map_index(out.sample_log_cond_post)];
}

}  // namespace sopt
