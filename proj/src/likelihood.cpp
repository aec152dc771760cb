#include "sopt/likelihood.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace sopt {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// x log y with 0 log 0 = 0.
double xlogy(double x, double y) { return x == 0.0 ? 0.0 : x * std::log(y); }

// log f at a real point x in [0, T].
double binomial_log_f_real(double x, double T) {
    return std::lgamma(T + 1.0) - std::lgamma(x + 1.0) - std::lgamma(T - x + 1.0) + xlogy(x, x / T) +
           xlogy(T - x, 1.0 - x / T);
}

void check_range(int k, int T) {
    if (k < 0 || k > T) throw std::domain_error("success count outside [0, T]");
}

}  // namespace

LikelihoodFamily parse_family(const std::string& name) {
    if (name == "binomial") return LikelihoodFamily::Binomial;
    if (name == "beta") return LikelihoodFamily::Beta;
    if (name == "exponential") return LikelihoodFamily::Exponential;
    throw std::invalid_argument("unknown likelihood family: " + name);
}

std::string to_string(LikelihoodFamily f) {
    switch (f) {
        case LikelihoodFamily::Binomial: return "binomial";
        case LikelihoodFamily::Beta: return "beta";
        case LikelihoodFamily::Exponential: return "exponential";
    }
    return "?";
}

void LikelihoodSpec::validate() const {
    if (!(beta > 0.0)) throw std::invalid_argument("likelihood sharpness must be positive");
    if (trials < 1) throw std::invalid_argument("likelihood trials must be at least 1");
}

double binomial_log_f(int k, int T) {
    check_range(k, T);
    return binomial_log_f_real(k, T);
}

double binomial_log_h(int k, const LikelihoodSpec& spec) {
    const int T = spec.trials;
    check_range(k, T);
    if (k == 0) return kNegInf;
    const double half = 0.5 * T;
    if (k >= half) return spec.beta * binomial_log_f_real(k, T);
    const double log_a = std::log(2.0 / T) + binomial_log_f_real(half, T);
    return spec.beta * (log_a + std::log(static_cast<double>(k)));
}

double beta_log_f(double x) {
    if (x < 0.0 || x > 1.0) throw std::domain_error("beta_log_f: x outside [0, 1]");
    return -std::lgamma(x + 1.0) - std::lgamma(2.0 - x) + xlogy(x, x) + xlogy(1.0 - x, 1.0 - x);
}

double beta_log_h(int k, const LikelihoodSpec& spec) {
    const int T = spec.trials;
    check_range(k, T);
    if (k == 0) return kNegInf;
    const double x = static_cast<double>(k) / T;
    if (x >= 0.5) return spec.beta * beta_log_f(x);
    return spec.beta * (std::log(2.0) + beta_log_f(0.5) + std::log(x));
}

double exp_log_h(double ratio, const LikelihoodSpec& spec) { return spec.beta * ratio; }

double log_pseudo_likelihood(const LikelihoodSpec& spec, double value) {
    switch (spec.family) {
        case LikelihoodFamily::Binomial:
        case LikelihoodFamily::Beta: {
            const double r = std::round(value);
            if (r != value) throw std::invalid_argument("count-based likelihood needs an integer success count");
            const int k = static_cast<int>(r);
            return spec.family == LikelihoodFamily::Binomial ? binomial_log_h(k, spec) : beta_log_h(k, spec);
        }
        case LikelihoodFamily::Exponential: return exp_log_h(value, spec);
    }
    return kNegInf;
}

}  // namespace sopt
