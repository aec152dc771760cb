#include "sopt/optimizers.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <numeric>
#include <thread>

namespace sopt {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

ObjectiveFn plain_objective(std::function<double(const ParamVector&)> f) {
    return [f = std::move(f)](const ParamVector& t) {
        const double v = f(t);
        return Evaluation{v, v};
    };
}

void GAConfig::validate() const {
    if (population < 2) throw std::invalid_argument("GA population must be at least 2");
    if (generations < 1) throw std::invalid_argument("GA needs at least one generation");
    if (blend_alpha < 0.0) throw std::invalid_argument("blend alpha must be nonnegative");
    if (mutation_rate < 0.0 || mutation_rate > 1.0) throw std::invalid_argument("mutation rate must be in [0, 1]");
    if (!(mutation_sigma2 >= 0.0)) throw std::invalid_argument("mutation variance must be nonnegative");
    if (!(lo < hi)) throw std::invalid_argument("GA bounds need lo < hi");
}

void GAResult::write_trace_csv(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path);
    f.precision(17);
    f << "generation,best_fitness,best_objective,mean_fitness,best_theta_norm2\n";
    for (const auto& g : trace)
        f << g.generation << ',' << g.best_fitness << ',' << g.best_objective << ',' << g.mean_fitness << ','
          << g.best_theta_norm2 << '\n';
}

std::vector<double> roulette_cumulative(const std::vector<double>& fitness) {
    double mn = std::numeric_limits<double>::infinity();
    for (double f : fitness)
        if (std::isfinite(f)) mn = std::min(mn, f);
    std::vector<double> w(fitness.size());
    if (!std::isfinite(mn)) {
        std::fill(w.begin(), w.end(), 1.0);
    } else {
        for (std::size_t i = 0; i < w.size(); ++i)
            w[i] = std::isfinite(fitness[i]) ? fitness[i] - mn + 1e-12 : 0.0;
    }
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    std::vector<double> c(w.size());
    double run = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) c[i] = (run += w[i]) / total;
    if (!c.empty()) c.back() = 1.0;
    return c;
}

std::size_t roulette_pick(const std::vector<double>& cumulative, double r) {
    const auto it = std::lower_bound(cumulative.begin(), cumulative.end(), r);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), cumulative.size() - 1);
}

std::vector<std::size_t> roulette_select(const std::vector<double>& fitness, std::size_t count, Rng& rng) {
    if (fitness.empty()) throw std::invalid_argument("roulette over an empty population");
    const auto c = roulette_cumulative(fitness);
    std::vector<std::size_t> out(count);
    for (auto& o : out) o = roulette_pick(c, rng.uniform());
    return out;
}

ParamVector blend_crossover(const ParamVector& p1, const ParamVector& p2, double alpha,
                            const std::vector<double>& u) {
    if (p1.size() != p2.size() || u.size() != p1.size()) throw std::invalid_argument("crossover length mismatch");
    ParamVector child(p1.size());
    for (std::size_t r = 0; r < p1.size(); ++r) {
        const double v = (1.0 + 2.0 * alpha) * u[r] - alpha;
        child[r] = v * p1[r] + (1.0 - v) * p2[r];
    }
    return child;
}

ParamVector blend_crossover(const ParamVector& p1, const ParamVector& p2, double alpha, Rng& rng) {
    std::vector<double> u(p1.size());
    for (auto& x : u) x = rng.uniform();
    return blend_crossover(p1, p2, alpha, u);
}

void gaussian_mutate(std::vector<ParamVector>& pop, double rate, double sigma2, Rng& rng) {
    const double sd = std::sqrt(sigma2);
    for (auto& ind : pop) {
        if (!(rng.uniform() < rate)) continue;
        for (auto& g : ind) g += sd * rng.normal();
    }
}

std::vector<std::size_t> elitist_indices(const std::vector<double>& fitness_2n, std::size_t n) {
    std::vector<std::size_t> order(fitness_2n.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return fitness_2n[x] > fitness_2n[y]; });
    order.resize(std::min(n, order.size()));
    std::sort(order.begin(), order.end());
    return order;
}

std::vector<ParamVector> uniform_population(std::size_t n, std::size_t dim, double lo, double hi, Rng& rng) {
    std::vector<ParamVector> pop(n, ParamVector(dim));
    for (auto& ind : pop)
        for (auto& g : ind) g = rng.uniform(lo, hi);
    return pop;
}

std::vector<Evaluation> evaluate_all(const ObjectiveFn& f, const std::vector<ParamVector>& pop, int threads) {
    std::vector<Evaluation> out(pop.size());
    auto work = [&](std::size_t begin, std::size_t step) {
        for (std::size_t i = begin; i < pop.size(); i += step) {
            out[i] = f(pop[i]);
            if (std::isnan(out[i].fitness)) out[i].fitness = kNegInf;
        }
    };
    const std::size_t t = std::max(1, threads);
    if (t == 1 || pop.size() < 2) {
        work(0, 1);
    } else {
        std::vector<std::thread> pool;
        for (std::size_t k = 0; k < t; ++k) pool.emplace_back(work, k, t);
        for (auto& th : pool) th.join();
    }
    return out;
}

namespace {

struct Tracker {
    GAResult& res;
    void consider(const ParamVector& theta, const Evaluation& e) {
        if (res.best_theta.empty() || e.fitness > res.best_fitness) {
            res.best_fitness = e.fitness;
            res.best_objective = e.objective;
            res.best_theta = theta;
        }
    }
    void record(int gen, const std::vector<ParamVector>& pop, const std::vector<Evaluation>& ev) {
        double mean = 0.0;
        for (const auto& e : ev) mean += e.fitness;
        mean /= static_cast<double>(ev.size());
        res.trace.push_back({gen, res.best_fitness, res.best_objective, mean, norm2(res.best_theta)});
        (void)pop;
    }
};

std::vector<ParamVector> breed(const std::vector<ParamVector>& pop, const std::vector<double>& fitness,
                               const GAConfig& cfg, Rng& rng) {
    const std::size_t N = pop.size();
    const auto pool_idx = roulette_select(fitness, N, rng);
    std::vector<ParamVector> offspring;
    offspring.reserve(N);
    for (std::size_t n = 0; n < N; ++n) {
        const auto& p1 = pop[pool_idx[rng.below(N)]];
        const auto& p2 = pop[pool_idx[rng.below(N)]];
        offspring.push_back(blend_crossover(p1, p2, cfg.blend_alpha, rng));
    }
    gaussian_mutate(offspring, cfg.mutation_rate, cfg.mutation_sigma2, rng);
    return offspring;
}

std::vector<double> fitness_of(const std::vector<Evaluation>& ev) {
    std::vector<double> f(ev.size());
    for (std::size_t i = 0; i < ev.size(); ++i) f[i] = ev[i].fitness;
    return f;
}

}  // namespace

GAResult ga_run(const GAConfig& cfg, std::size_t dim, const ObjectiveFn& objective, Rng& rng) {
    cfg.validate();
    const auto N = static_cast<std::size_t>(cfg.population);
    GAResult res;
    Tracker tr{res};
    auto pop = uniform_population(N, dim, cfg.lo, cfg.hi, rng);
    auto ev = evaluate_all(objective, pop, cfg.threads);
    for (std::size_t i = 0; i < N; ++i) tr.consider(pop[i], ev[i]);
    tr.record(1, pop, ev);
    for (int m = 2; m <= cfg.generations; ++m) {
        auto off = breed(pop, fitness_of(ev), cfg, rng);
        auto ev_off = evaluate_all(objective, off, cfg.threads);
        for (std::size_t i = 0; i < N; ++i) tr.consider(off[i], ev_off[i]);
        std::vector<double> all = fitness_of(ev);
        for (const auto& e : ev_off) all.push_back(e.fitness);
        const auto keep = elitist_indices(all, N);
        std::vector<ParamVector> next;
        std::vector<Evaluation> next_ev;
        for (auto k : keep) {
            next.push_back(k < N ? pop[k] : off[k - N]);
            next_ev.push_back(k < N ? ev[k] : ev_off[k - N]);
        }
        pop.swap(next);
        ev.swap(next_ev);
        tr.record(m, pop, ev);
    }
    return res;
}

GAResult random_search(std::size_t dim, long iterations, double lo, double hi, const ObjectiveFn& objective,
                       Rng& rng, int threads) {
    if (iterations < 1) throw std::invalid_argument("random search needs at least one draw");
    GAResult res;
    Tracker tr{res};
    constexpr long kBatch = 1024;
    for (long done = 0; done < iterations; done += kBatch) {
        const auto n = static_cast<std::size_t>(std::min(kBatch, iterations - done));
        auto batch = uniform_population(n, dim, lo, hi, rng);
        auto ev = evaluate_all(objective, batch, threads);
        for (std::size_t i = 0; i < n; ++i) tr.consider(batch[i], ev[i]);
    }
    res.trace.push_back({1, res.best_fitness, res.best_objective, res.best_fitness, norm2(res.best_theta)});
    return res;
}

double hybrid_fitness(double loglik, double norm2, std::size_t S, double sigma2) {
    return loglik - norm2 / (2.0 * sigma2) - 0.5 * static_cast<double>(S) * std::log(2.0 * std::numbers::pi * sigma2);
}

GAResult ga_hybrid_run(const HybridConfig& cfg, std::size_t dim, const LogLikFn& loglik, Rng& rng) {
    cfg.ga.validate();
    const auto N = static_cast<std::size_t>(cfg.ga.population);
    GAResult res;
    Tracker tr{res};

    std::vector<ParamVector> pop;
    if (!cfg.shared_start.empty()) {
        if (cfg.shared_start.size() != dim) throw std::invalid_argument("shared start has wrong dimension");
        pop.assign(N, cfg.shared_start);
    } else {
        pop = uniform_population(N, dim, cfg.ga.lo, cfg.ga.hi, rng);
    }
    auto draw_s2 = [&](const ParamVector& t) { return block2_step(t, cfg.a, cfg.b, rng); };

    // Log-likelihoods do not depend on sigma2, so they are computed once per individual.
    auto ll_of = [&](const std::vector<ParamVector>& p) {
        const ObjectiveFn f = [&](const ParamVector& t) {
            const double v = loglik(t);
            return Evaluation{v, v};
        };
        auto ev = evaluate_all(f, p, cfg.ga.threads);
        std::vector<double> out(ev.size());
        for (std::size_t i = 0; i < ev.size(); ++i) out[i] = ev[i].objective;
        return out;
    };
    auto score = [&](const std::vector<ParamVector>& p, const std::vector<double>& ll, const std::vector<double>& s2) {
        std::vector<Evaluation> ev(p.size());
        for (std::size_t i = 0; i < p.size(); ++i) {
            double f = hybrid_fitness(ll[i], norm2(p[i]), dim, s2[i]);
            if (std::isnan(f)) f = kNegInf;
            ev[i] = {f, ll[i]};
        }
        return ev;
    };

    std::vector<double> s2(N);
    for (std::size_t i = 0; i < N; ++i) s2[i] = draw_s2(pop[i]);
    auto ll = ll_of(pop);
    auto ev = score(pop, ll, s2);
    for (std::size_t i = 0; i < N; ++i) tr.consider(pop[i], ev[i]);
    tr.record(1, pop, ev);
    auto log_draws = [&](int m) {
        for (std::size_t i = 0; i < N; ++i) {
            res.draws.push_back(pop[i]);
            res.draw_sigma2.push_back(s2[i]);
            res.draw_generation.push_back(m);
        }
    };
    log_draws(1);

    for (int m = 2; m <= cfg.ga.generations; ++m) {
        auto off = breed(pop, fitness_of(ev), cfg.ga, rng);
        std::vector<double> s2_off(N);
        for (std::size_t i = 0; i < N; ++i) s2_off[i] = draw_s2(off[i]);
        auto ll_off = ll_of(off);
        auto ev_off = score(off, ll_off, s2_off);
        for (std::size_t i = 0; i < N; ++i) tr.consider(off[i], ev_off[i]);

        std::vector<double> all = fitness_of(ev);
        for (const auto& e : ev_off) all.push_back(e.fitness);
        const auto keep = elitist_indices(all, N);
        std::vector<ParamVector> next;
        std::vector<double> next_ll;
        for (auto k : keep) {
            next.push_back(k < N ? pop[k] : off[k - N]);
            next_ll.push_back(k < N ? ll[k] : ll_off[k - N]);
        }
        pop.swap(next);
        ll.swap(next_ll);
        for (std::size_t i = 0; i < N; ++i) s2[i] = draw_s2(pop[i]);
        ev = score(pop, ll, s2);
        tr.record(m, pop, ev);
        log_draws(m);
    }
    return res;
}

GdHybridResult gd_hybrid_run(const NetworkShape& shape, const LabeledSet& data, const ParamVector& theta0,
                             const GdHybridConfig& cfg, Rng& rng) {
    if (theta0.size() != shape.num_params()) throw ShapeError("initial theta has wrong dimension");
    GdHybridResult r;
    r.theta = theta0;
    double s2 = cfg.resample ? block2_step(r.theta, cfg.a, cfg.b, rng) : cfg.sigma2_fixed;
    for (int m = 1; m <= cfg.steps; ++m) {
        const auto g = grad_cross_entropy_l2(shape, r.theta, data, s2);
        for (std::size_t i = 0; i < g.size(); ++i) r.theta[i] -= cfg.step_size * g[i];
        if (cfg.resample) s2 = block2_step(r.theta, cfg.a, cfg.b, rng);
        const double n2 = norm2(r.theta);
        const double loss = cross_entropy(shape, r.theta, data) + n2 / (2.0 * s2);
        if (!(loss <= 1e10)) throw Divergence("gradient descent diverged at step " + std::to_string(m));
        r.loss.push_back(loss);
        r.sigma2.push_back(s2);
        r.theta_norm2.push_back(n2);
    }
    return r;
}

}  // namespace sopt
