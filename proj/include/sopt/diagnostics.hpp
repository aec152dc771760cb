#pragma once

#include <string>
#include <vector>

namespace sopt::diag {

struct EssResult {
    double ess = 0.0;
    /// Set when the estimator fell back or the input was degenerate.
    bool flagged = false;
};

/// n / (1 + 2 sum rho_k), truncated by the initial positive sequence rule, clipped to (0, n].
/// A constant series gives 0 with the flag set.
EssResult ess_univariate(const std::vector<double>& x);

/// n (det Lambda / det Sigma_bm)^(1/S), batch means with batch size floor(sqrt(n)).
/// `samples` is n rows of S values. Falls back to the smallest per-dimension ESS when
/// either covariance is singular.
EssResult ess_multivariate(const std::vector<std::vector<double>>& samples);

struct InvGammaFit {
    double shape, rate;
};

/// Method of moments: shape = mean^2/var + 2, rate = mean (shape - 1).
InvGammaFit fit_inv_gamma(const std::vector<double>& samples);

/// Kendall tau-b between the index and the value.
double trend_stat(const std::vector<double>& x);

struct ChainSummary {
    double ess = 0.0;
    bool ess_flagged = false;
    std::vector<double> ess_per_dim;
    InvGammaFit invgamma{0.0, 0.0};
    double trend_tau = 0.0;
    std::string to_json() const;
};

ChainSummary summarize(const std::vector<std::vector<double>>& samples, const std::vector<double>& sigma2,
                       const std::vector<double>& theta_norm2);

}  // namespace sopt::diag
