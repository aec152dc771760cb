#pragma once

#include <functional>
#include <string>
#include <vector>

#include "sopt/mcmc.hpp"
#include "sopt/network.hpp"
#include "sopt/rng.hpp"

namespace sopt {

/// Fitness drives selection; objective is the raw score that gets reported.
struct Evaluation {
    double fitness;
    double objective;
};

using ObjectiveFn = std::function<Evaluation(const ParamVector&)>;

/// Wrap a plain score as both fitness and objective.
ObjectiveFn plain_objective(std::function<double(const ParamVector&)> f);

struct GAConfig {
    int population = 100;   // N
    int generations = 1000; // M, counting the initial population as generation 1
    double blend_alpha = 0.5;
    double mutation_rate = 0.1;
    double mutation_sigma2 = 0.01;
    double lo = -5.0;
    double hi = 5.0;
    int threads = 1;
    void validate() const;
};

struct GenerationStats {
    int generation;
    double best_fitness;
    double best_objective;
    double mean_fitness;
    double best_theta_norm2;
};

struct GAResult {
    ParamVector best_theta;
    double best_fitness = -std::numeric_limits<double>::infinity();
    double best_objective = -std::numeric_limits<double>::infinity();
    std::vector<GenerationStats> trace;
    // Hybrid runs record every surviving (theta, sigma2) pair per generation.
    std::vector<ParamVector> draws;
    std::vector<double> draw_sigma2;
    std::vector<int> draw_generation;

    void write_trace_csv(const std::string& path) const;
};

/// Indices (0-based) picked by roulette wheel. Fitness is shifted by its
/// minimum plus 1e-12 before normalizing.
std::vector<std::size_t> roulette_select(const std::vector<double>& fitness, std::size_t count, Rng& rng);

/// Smallest 0-based n with cumulative probability >= r.
std::size_t roulette_pick(const std::vector<double>& cumulative, double r);
std::vector<double> roulette_cumulative(const std::vector<double>& fitness);

ParamVector blend_crossover(const ParamVector& p1, const ParamVector& p2, double alpha, Rng& rng);
/// Same with the uniforms supplied.
ParamVector blend_crossover(const ParamVector& p1, const ParamVector& p2, double alpha,
                            const std::vector<double>& u);

/// Each individual is perturbed with probability `rate` by N(0, sigma2 I).
void gaussian_mutate(std::vector<ParamVector>& pop, double rate, double sigma2, Rng& rng);

/// 0-based indices into [pop ; offspring] of the N best, ties to the lower index,
/// returned in ascending index order.
std::vector<std::size_t> elitist_indices(const std::vector<double>& fitness_2n, std::size_t n);

std::vector<ParamVector> uniform_population(std::size_t n, std::size_t dim, double lo, double hi, Rng& rng);

/// Evaluate a batch, optionally across threads. NaN fitness becomes -inf.
std::vector<Evaluation> evaluate_all(const ObjectiveFn& f, const std::vector<ParamVector>& pop, int threads);

GAResult ga_run(const GAConfig& cfg, std::size_t dim, const ObjectiveFn& objective, Rng& rng);

/// Best of iterations uniform draws over [lo, hi]^dim.
GAResult random_search(std::size_t dim, long iterations, double lo, double hi, const ObjectiveFn& objective,
                       Rng& rng, int threads = 1);

struct HybridConfig {
    GAConfig ga;
    double a = 1e-6;
    double b = 1e-6;
    /// When set, every initial individual equals this vector.
    ParamVector shared_start;
};

/// fitness = loglik - ||theta||^2/(2 sigma2) - (S/2) log(2 pi sigma2).
double hybrid_fitness(double loglik, double norm2, std::size_t S, double sigma2);

/// GA whose fitness is the log conditional posterior, with each individual
/// carrying its own sigma2 that is redrawn from its conditional every generation.
GAResult ga_hybrid_run(const HybridConfig& cfg, std::size_t dim, const LogLikFn& loglik, Rng& rng);

struct GdHybridResult {
    ParamVector theta;  // final
    std::vector<double> loss;      // cross-entropy + penalty at each step
    std::vector<double> sigma2;
    std::vector<double> theta_norm2;
};

struct Divergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Gradient descent on cross-entropy + ||theta||^2/(2 sigma2), alternated with
/// sigma2 draws from Inv-Gamma(a + S/2, b + ||theta||^2/2). With resample off
/// sigma2 stays at `sigma2_fixed`.
struct GdHybridConfig {
    int steps = 1000;
    double step_size = 1e-3;
    double a = 1e-6;
    double b = 1e-6;
    bool resample = true;
    double sigma2_fixed = 1.0;
};

GdHybridResult gd_hybrid_run(const NetworkShape& shape, const LabeledSet& data, const ParamVector& theta0,
                             const GdHybridConfig& cfg, Rng& rng);

}  // namespace sopt
