#pragma once

#include <string>

namespace sopt {

enum class LikelihoodFamily { Binomial, Beta, Exponential };

LikelihoodFamily parse_family(const std::string& name);
std::string to_string(LikelihoodFamily f);

struct LikelihoodSpec {
    LikelihoodFamily family = LikelihoodFamily::Binomial;
    double beta = 1.0;  // sharpness
    int trials = 1;     // T or K
    void validate() const;
};

/// log f(k) = log C(T,k) + k log(k/T) + (T-k) log(1-k/T), with 0^0 = 1.
double binomial_log_f(int k, int T);

/// beta * log h(k) for the binomial pseudo-likelihood. Below T/2 the curve is
/// the chord g(x) = (2/T) f(T/2) x, evaluated with f at the real point T/2.
double binomial_log_h(int k, const LikelihoodSpec& spec);

/// log f(x) = -log Gamma(x+1) - log Gamma(2-x) + x log x + (1-x) log(1-x).
double beta_log_f(double x);

/// beta * log h(k/T) for the beta pseudo-likelihood.
double beta_log_h(int k, const LikelihoodSpec& spec);

/// beta * ratio.
double exp_log_h(double ratio, const LikelihoodSpec& spec);

/// Dispatch on the family. Binomial and beta read `value` as a success count.
double log_pseudo_likelihood(const LikelihoodSpec& spec, double value);

}  // namespace sopt
