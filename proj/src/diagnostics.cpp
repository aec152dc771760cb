#include "sopt/diagnostics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include "json.hpp"
#include <numeric>
#include <stdexcept>

namespace sopt::diag {

EssResult ess_univariate(const std::vector<double>& x) {
    const std::size_t n = x.size();
    if (n < 10) throw std::invalid_argument("ESS needs at least 10 values");
    const double dn = static_cast<double>(n);
    // Lags are added in pairs until a pair sums negative, so the cost is only the lags used.
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / dn;
    auto gamma = [&](std::size_t k) {
        double s = 0.0;
        for (std::size_t i = 0; i + k < n; ++i) s += (x[i] - mean) * (x[i + k] - mean);
        return s / dn;
    };
    const double c0 = gamma(0);
    if (!(c0 > 0.0)) return {0.0, true};
    // Geyer: tau = -1 + 2 sum_m Gamma_m, Gamma_m = rho_2m + rho_2m+1 while positive.
    double tau = -1.0;
    for (std::size_t m = 0; 2 * m + 1 < n; ++m) {
        const double pair = (gamma(2 * m) + gamma(2 * m + 1)) / c0;
        if (pair <= 0.0) break;
        tau += 2.0 * pair;
    }
    double ess = dn / tau;
    if (!(ess > 0.0) || ess > dn) ess = dn;
    return {ess, false};
}

EssResult ess_multivariate(const std::vector<std::vector<double>>& samples) {
    const std::size_t n = samples.size();
    if (n == 0) throw std::invalid_argument("no samples");
    const std::size_t S = samples.front().size();
    if (n <= S) throw std::invalid_argument("multivariate ESS needs more samples than dimensions");

    Eigen::MatrixXd X(n, S);
    for (std::size_t i = 0; i < n; ++i) {
        if (samples[i].size() != S) throw std::invalid_argument("ragged samples");
        for (std::size_t d = 0; d < S; ++d) X(i, d) = samples[i][d];
    }
    const Eigen::RowVectorXd mean = X.colwise().mean();
    const Eigen::MatrixXd C = X.rowwise() - mean;
    const Eigen::MatrixXd lambda = C.transpose() * C / static_cast<double>(n - 1);

    const std::size_t b = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n))));
    const std::size_t a = n / b;
    Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(S, S);
    for (std::size_t k = 0; k < a; ++k) {
        const Eigen::RowVectorXd bm = X.middleRows(k * b, b).colwise().mean() - mean;
        sigma += bm.transpose() * bm;
    }
    sigma *= static_cast<double>(b) / static_cast<double>(a - 1 > 0 ? a - 1 : 1);

    // Log-determinants through LDLT keep large S from under/overflowing.
    auto logdet = [](const Eigen::MatrixXd& m, bool& ok) {
        Eigen::LDLT<Eigen::MatrixXd> f(m);
        const auto d = f.vectorD();
        double s = 0.0;
        ok = f.info() == Eigen::Success;
        for (Eigen::Index i = 0; i < d.size() && ok; ++i) {
            if (!(d(i) > 1e-300)) ok = false;
            else s += std::log(d(i));
        }
        return s;
    };
    bool ok1 = false, ok2 = false;
    const double l1 = logdet(lambda, ok1), l2 = logdet(sigma, ok2);
    if (!ok1 || !ok2) {
        double best = static_cast<double>(n);
        std::vector<double> col(n);
        for (std::size_t d = 0; d < S; ++d) {
            for (std::size_t i = 0; i < n; ++i) col[i] = X(i, d);
            best = std::min(best, ess_univariate(col).ess);
        }
        return {best, true};
    }
    double ess = static_cast<double>(n) * std::exp((l1 - l2) / static_cast<double>(S));
    return {std::clamp(ess, 0.0, static_cast<double>(n)), false};
}

InvGammaFit fit_inv_gamma(const std::vector<double>& samples) {
    if (samples.size() < 2) throw std::invalid_argument("need at least two samples");
    double mean = 0.0, m2 = 0.0;
    std::size_t k = 0;
    for (double v : samples) {
        if (!(v > 0.0)) throw std::invalid_argument("inverse-gamma samples must be positive");
        ++k;
        const double d = v - mean;
        mean += d / static_cast<double>(k);
        m2 += d * (v - mean);
    }
    const double var = m2 / static_cast<double>(k - 1);
    if (!(var > 0.0)) throw std::invalid_argument("zero variance");
    const double shape = mean * mean / var + 2.0;
    return {shape, mean * (shape - 1.0)};
}

double trend_stat(const std::vector<double>& x) {
    const std::size_t n = x.size();
    if (n < 2) return 0.0;
    // Knight's O(n log n): count discordant pairs by merge-sorting values in index order.
    std::vector<double> v(x);
    std::vector<double> buf(n);
    long double swaps = 0;
    for (std::size_t width = 1; width < n; width *= 2) {
        for (std::size_t lo = 0; lo < n; lo += 2 * width) {
            const std::size_t mid = std::min(lo + width, n), hi = std::min(lo + 2 * width, n);
            std::size_t i = lo, j = mid, k = lo;
            while (i < mid && j < hi) {
                if (v[j] < v[i]) {
                    swaps += static_cast<long double>(mid - i);
                    buf[k++] = v[j++];
                } else {
                    buf[k++] = v[i++];
                }
            }
            while (i < mid) buf[k++] = v[i++];
            while (j < hi) buf[k++] = v[j++];
        }
        std::swap(v, buf);
    }
    // v is sorted; count tied values.
    long double ties = 0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && v[j] == v[i]) ++j;
        const long double t = static_cast<long double>(j - i);
        ties += t * (t - 1) / 2;
        i = j;
    }
    const long double n0 = static_cast<long double>(n) * (n - 1) / 2;
    const long double denom = std::sqrt(n0 * (n0 - ties));
    if (denom == 0) return 0.0;
    // Tied pairs are neither concordant nor discordant.
    const long double concordant_minus_discordant = n0 - ties - 2 * swaps;
    return static_cast<double>(concordant_minus_discordant / denom);
}

std::string ChainSummary::to_json() const {
    nlohmann::json j;
    j["ess"] = ess;
    j["ess_flagged"] = ess_flagged;
    j["ess_per_dim"] = ess_per_dim;
    j["invgamma_shape"] = invgamma.shape;
    j["invgamma_rate"] = invgamma.rate;
    j["trend_tau"] = trend_tau;
    return j.dump(2);
}

ChainSummary summarize(const std::vector<std::vector<double>>& samples, const std::vector<double>& sigma2,
                       const std::vector<double>& theta_norm2) {
    ChainSummary s;
    if (!samples.empty() && samples.size() > samples.front().size()) {
        const auto e = ess_multivariate(samples);
        s.ess = e.ess;
        s.ess_flagged = e.flagged;
        std::vector<double> col(samples.size());
        for (std::size_t d = 0; d < samples.front().size(); ++d) {
            for (std::size_t i = 0; i < samples.size(); ++i) col[i] = samples[i][d];
            s.ess_per_dim.push_back(col.size() >= 10 ? ess_univariate(col).ess : 0.0);
        }
    }
    try {
        s.invgamma = fit_inv_gamma(sigma2);
    } catch (const std::invalid_argument&) {
        s.invgamma = {0.0, 0.0};
    }
    s.trend_tau = trend_stat(theta_norm2);
    return s;
}

}  // namespace sopt::diag
