#include "sopt/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "sopt/diagnostics.hpp"
#include "sopt/likelihood.hpp"
#include "sopt/navigation.hpp"
#include "sopt/tictactoe.hpp"

namespace fs = std::filesystem;

namespace sopt::harness {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(trim(cur));
    return out;
}

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::ostringstream os;
    os << std::setprecision(10) << v;
    return os.str();
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': expected a number, got '" + v + "'");
    }
}

}  // namespace

// ---------------------------------------------------------------- config

Config Config::parse(const std::string& text) {
    Config c;
    std::istringstream is(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": unterminated section");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        c.values_[section.empty() ? key : section + "." + key] = trim(line.substr(eq + 1));
    }
    return c;
}

Config Config::load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot read config file " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse(ss.str());
}

std::string Config::str(const std::string& key, const std::string& def) const {
    const auto it = values_.find(key);
    const std::string v = it == values_.end() ? def : it->second;
    used_[key] = v;
    return v;
}

double Config::num(const std::string& key, double def) const {
    const auto it = values_.find(key);
    const double v = it == values_.end() ? def : parse_double(key, it->second);
    used_[key] = fmt(v);
    return v;
}

long Config::integer(const std::string& key, long def) const {
    const double v = num(key, static_cast<double>(def));
    if (v != std::floor(v)) throw ConfigError("key '" + key + "': expected an integer");
    used_[key] = std::to_string(static_cast<long>(v));
    return static_cast<long>(v);
}

bool Config::flag(const std::string& key, bool def) const {
    const auto it = values_.find(key);
    bool v = def;
    if (it != values_.end()) {
        const auto& s = it->second;
        if (s == "true" || s == "1" || s == "yes") v = true;
        else if (s == "false" || s == "0" || s == "no") v = false;
        else throw ConfigError("key '" + key + "': expected true or false, got '" + s + "'");
    }
    used_[key] = v ? "true" : "false";
    return v;
}

std::vector<double> Config::nums(const std::string& key, const std::vector<double>& def) const {
    const auto it = values_.find(key);
    std::vector<double> v = def;
    if (it != values_.end()) {
        v.clear();
        for (const auto& p : split(it->second, ','))
            if (!p.empty()) v.push_back(parse_double(key, p));
    }
    std::string echo;
    for (std::size_t i = 0; i < v.size(); ++i) echo += (i ? ", " : "") + fmt(v[i]);
    used_[key] = echo;
    return v;
}

std::vector<std::string> Config::strs(const std::string& key, const std::vector<std::string>& def) const {
    const auto it = values_.find(key);
    std::vector<std::string> v = def;
    if (it != values_.end()) {
        v.clear();
        for (const auto& p : split(it->second, ','))
            if (!p.empty()) v.push_back(p);
    }
    std::string echo;
    for (std::size_t i = 0; i < v.size(); ++i) echo += (i ? ", " : "") + v[i];
    used_[key] = echo;
    return v;
}

std::vector<std::string> Config::keys() const {
    std::vector<std::string> k;
    for (const auto& [key, v] : values_) k.push_back(key);
    return k;
}

void Config::check_unused() const {
    for (const auto& [k, v] : values_)
        if (!used_.count(k)) throw ConfigError("unknown key '" + k + "'");
}

std::string Config::effective() const {
    std::map<std::string, std::vector<std::pair<std::string, std::string>>> by_section;
    for (const auto& [k, v] : used_) {
        const auto dot = k.find('.');
        by_section[k.substr(0, dot)].push_back({k.substr(dot + 1), v});
    }
    std::ostringstream os;
    bool first = true;
    for (const auto& [s, kv] : by_section) {
        if (!first) os << '\n';
        first = false;
        os << '[' << s << "]\n";
        for (const auto& [k, v] : kv) os << k << " = " << v << '\n';
    }
    return os.str();
}

long Scale::apply(long n) const {
    if (factor <= 1.0) return n;
    return std::max(1L, std::lround(static_cast<double>(n) / factor));
}

// ---------------------------------------------------------------- particle data

LabeledSet ParticleDataset::train() const {
    LabeledSet s;
    for (const auto& p : rows)
        if (p.train) {
            s.x.push_back({p.x1, p.y2});
            s.label.push_back(static_cast<std::size_t>(p.cls));
        }
    return s;
}

LabeledSet ParticleDataset::test() const {
    LabeledSet s;
    for (const auto& p : rows)
        if (!p.train) {
            s.x.push_back({p.x1, p.y2});
            s.label.push_back(static_cast<std::size_t>(p.cls));
        }
    return s;
}

ParticleDataset generate_particle_data(std::uint64_t seed, double radius, double sigma) {
    Rng rng(seed);
    ParticleDataset ds;
    for (int c = 0; c < 3; ++c) {
        const double ang = std::numbers::pi / 2 + c * 2.0 * std::numbers::pi / 3.0;
        const double cx = radius * std::cos(ang), cy = radius * std::sin(ang);
        std::vector<int> order(120);
        std::iota(order.begin(), order.end(), 0);
        for (std::size_t i = order.size() - 1; i > 0; --i) std::swap(order[i], order[rng.below(i + 1)]);
        std::vector<bool> train(120, false);
        for (int i = 0; i < 60; ++i) train[order[i]] = true;
        for (int i = 0; i < 120; ++i) {
            const double x = cx + sigma * rng.normal();
            const double y = cy + sigma * rng.normal();
            ds.rows.push_back({x, y, c, train[i]});
        }
    }
    return ds;
}

void write_particle_csv(const std::string& path, const ParticleDataset& ds) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path);
    f << "X1,Y2,Yi1,Yi2,Yi3,split\n";
    for (const auto& p : ds.rows)
        f << fmt(p.x1) << ',' << fmt(p.y2) << ',' << (p.cls == 0) << ',' << (p.cls == 1) << ',' << (p.cls == 2) << ','
          << (p.train ? "train" : "test") << '\n';
}

ParticleDataset read_particle_csv(const std::string& path) {
    const auto t = read_csv(path);
    ParticleDataset ds;
    const auto ix = t.index("X1"), iy = t.index("Y2"), is = t.index("split");
    const std::size_t ic[3] = {t.index("Yi1"), t.index("Yi2"), t.index("Yi3")};
    for (const auto& r : t.rows) {
        int cls = -1;
        for (int c = 0; c < 3; ++c)
            if (r[ic[c]] == "1") cls = c;
        if (cls < 0) throw std::runtime_error("particle row without a class");
        ds.rows.push_back({std::stod(r[ix]), std::stod(r[iy]), cls, r[is] == "train"});
    }
    return ds;
}

double nearest_centroid_accuracy(const ParticleDataset& ds) {
    double sx[3] = {}, sy[3] = {};
    int n[3] = {};
    for (const auto& p : ds.rows)
        if (p.train) {
            sx[p.cls] += p.x1;
            sy[p.cls] += p.y2;
            ++n[p.cls];
        }
    int hit = 0, tot = 0;
    for (const auto& p : ds.rows) {
        if (p.train) continue;
        int best = 0;
        double bd = 1e300;
        for (int c = 0; c < 3; ++c) {
            const double d = std::hypot(p.x1 - sx[c] / n[c], p.y2 - sy[c] / n[c]);
            if (d < bd) {
                bd = d;
                best = c;
            }
        }
        hit += best == p.cls;
        ++tot;
    }
    return tot ? static_cast<double>(hit) / tot : 0.0;
}

NetworkShape classifier_shape() { return NetworkShape::standard(2, 3, Activation::Softmax); }

namespace {

ClassifyResult finish_classify(std::string method, ParamVector theta, const ParticleDataset& ds) {
    ClassifyResult r;
    r.method = std::move(method);
    r.theta = std::move(theta);
    r.in_acc = accuracy(classifier_shape(), r.theta, ds.train());
    r.out_acc = accuracy(classifier_shape(), r.theta, ds.test());
    return r;
}

}  // namespace

ClassifyResult classify_mcmc(const ParticleDataset& ds, const ParamVector& theta0, const ChainConfig& cfg, Rng& rng) {
    const auto shape = classifier_shape();
    const auto train = ds.train();
    const LogLikFn ll = [&](const ParamVector& t) { return -cross_entropy(shape, t, train); };
    auto out = run_two_block(cfg, theta0, ll, rng);
    auto r = finish_classify("MCMC", map_estimate(out), ds);
    r.theta_norm2.assign(out.theta_norm2.begin() + std::min<std::size_t>(cfg.burn_in, out.theta_norm2.size()),
                         out.theta_norm2.end());
    r.sigma2 = out.sample_sigma2;
    return r;
}

ClassifyResult classify_gd(const ParticleDataset& ds, const ParamVector& theta0, const GdHybridConfig& cfg, Rng& rng) {
    const auto g = gd_hybrid_run(classifier_shape(), ds.train(), theta0, cfg, rng);
    auto r = finish_classify("GD Hybrid", g.theta, ds);
    r.theta_norm2 = g.theta_norm2;
    r.sigma2 = g.sigma2;
    return r;
}

ClassifyResult classify_ga(const ParticleDataset& ds, const ParamVector& theta0, HybridConfig cfg, Rng& rng) {
    const auto shape = classifier_shape();
    const auto train = ds.train();
    const LogLikFn ll = [&](const ParamVector& t) { return -cross_entropy(shape, t, train); };
    cfg.shared_start = theta0;
    const auto g = ga_hybrid_run(cfg, theta0.size(), ll, rng);
    auto r = finish_classify("GA Hybrid", g.best_theta, ds);
    for (const auto& d : g.draws) r.theta_norm2.push_back(norm2(d));
    r.sigma2 = g.draw_sigma2;
    return r;
}

// ---------------------------------------------------------------- blackjack problems

NetworkShape bj_decision_shape() { return NetworkShape::standard(3, bj::kNumActions, Activation::Identity); }

NetworkShape bj_bet_shape(int variant) {
    return NetworkShape::standard(variant == 1 ? 1 : 11, 1, Activation::Sigmoid);
}

std::size_t bj_dim(const BjProblem& p) {
    switch (p.problem) {
        case 1: return bj_decision_shape().num_params();
        case 2: return bj_bet_shape(p.bet_variant).num_params();
        case 3: return bj_bet_shape(p.bet_variant).num_params() + bj_decision_shape().num_params();
    }
    throw std::invalid_argument("blackjack problem must be 1, 2 or 3");
}

bj::NightResult bj_night(const BjProblem& p, const ParamVector& theta, std::uint64_t seed, bool keep_log) {
    static const bj::BasicStrategy basic = bj::BasicStrategy::load(bj::default_chart_path());
    if (theta.size() != bj_dim(p)) throw ShapeError("blackjack theta has wrong length");
    bj::DecisionPolicy decide;
    bj::BetPolicy bet;
    if (p.problem == 1) {
        decide = bj::network_policy(bj_decision_shape(), theta);
        bet = bj::unit_bet();
    } else if (p.problem == 2) {
        decide = basic.policy();
        bet = bj::network_bet(bj_bet_shape(p.bet_variant), theta, p.bet_variant);
    } else {
        const std::size_t nb = bj_bet_shape(p.bet_variant).num_params();
        bet = bj::network_bet(bj_bet_shape(p.bet_variant), ParamVector(theta.begin(), theta.begin() + nb),
                              p.bet_variant);
        decide = bj::network_policy(bj_decision_shape(), ParamVector(theta.begin() + nb, theta.end()));
    }
    return bj::play_night(decide, bet, p.hands, seed, p.rules, keep_log);
}

// ---------------------------------------------------------------- CSV helpers

std::size_t CsvTable::index(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw std::runtime_error("CSV has no column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
}

std::vector<double> CsvTable::column(const std::string& name) const {
    const auto i = index(name);
    std::vector<double> v;
    v.reserve(rows.size());
    for (const auto& r : rows) v.push_back(std::stod(r.at(i)));
    return v;
}

CsvTable read_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot read " + path);
    CsvTable t;
    std::string line;
    if (!std::getline(f, line)) throw std::runtime_error(path + " is empty");
    t.header = split(line, ',');
    while (std::getline(f, line)) {
        if (trim(line).empty()) continue;
        t.rows.push_back(split(line, ','));
    }
    return t;
}

namespace {

class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {}
    void row(std::vector<std::string> cells) { rows_.push_back(std::move(cells)); }
    void save(const fs::path& p) const {
        std::ofstream f(p, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open " + p.string());
        auto line = [&](const std::vector<std::string>& c) {
            for (std::size_t i = 0; i < c.size(); ++i) f << (i ? "," : "") << c[i];
            f << '\n';
        };
        line(header_);
        for (const auto& r : rows_) line(r);
    }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

void write_text(const fs::path& p, const std::string& s) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + p.string());
    f << s;
}

void write_theta(const fs::path& p, const std::string& model, const ParamVector& theta) {
    nlohmann::json j;
    j["model"] = model;
    j["theta"] = theta;
    write_text(p, j.dump(1) + "\n");
}

/// Evaluate f over n items on up to `threads` threads; results land in index order.
template <class T>
std::vector<T> parallel_map(std::size_t n, int threads, const std::function<T(std::size_t)>& f) {
    std::vector<T> out(n);
    const std::size_t nt = std::max<std::size_t>(1, std::min<std::size_t>(n, static_cast<std::size_t>(threads)));
    if (nt == 1) {
        for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < nt; ++t)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next++) < n;) out[i] = f(i);
        });
    for (auto& th : pool) th.join();
    return out;
}

double mean_of(const std::vector<double>& v) {
    return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sd_of(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string tag_num(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

// A trainable problem: an in-sample score plus, for count likelihoods, the number of trials.
struct Problem {
    std::string model;
    std::size_t dim = 0;
    int trials = 0;
    std::function<double(const ParamVector&)> score;
};

struct Solution {
    std::string method, tag;
    double nu = 0.0, beta = 0.0, sigma_init2 = 0.0;
    std::string family;
    ParamVector theta;
    double in_score = 0.0;
    // MCMC only
    double max_log_cond_post = std::nan("");
    diag::ChainSummary summary;
};

struct Common {
    Config* cfg;
    Scale scale;
    fs::path out;
    int threads;
    std::uint64_t seed;
};

GAConfig read_ga(const Common& c) {
    GAConfig g;
    const Config& f = *c.cfg;
    g.population = static_cast<int>(f.integer("ga.population", g.population));
    g.generations = static_cast<int>(c.scale.apply(f.integer("ga.generations", g.generations)));
    g.blend_alpha = f.num("ga.blend_alpha", g.blend_alpha);
    g.mutation_rate = f.num("ga.mutation_rate", g.mutation_rate);
    g.mutation_sigma2 = f.num("ga.mutation_sigma2", g.mutation_sigma2);
    g.lo = f.num("ga.lo", g.lo);
    g.hi = f.num("ga.hi", g.hi);
    g.threads = c.threads;
    g.validate();
    return g;
}

ChainConfig read_chain(const Common& c, long default_burn) {
    ChainConfig m;
    const Config& f = *c.cfg;
    m.iterations = static_cast<int>(c.scale.apply(f.integer("mcmc.iterations", m.iterations)));
    m.burn_in = static_cast<int>(c.scale.apply(f.integer("mcmc.burn_in", default_burn)));
    m.sigma_init2 = f.num("mcmc.sigma_init2", m.sigma_init2);
    m.stride = static_cast<int>(f.integer("mcmc.stride", m.stride));
    m.window = static_cast<int>(f.integer("mcmc.window", m.window));
    m.kappa = f.num("mcmc.kappa", m.kappa);
    m.s2_init = f.num("mcmc.s2_init", m.s2_init);
    m.a = f.num("mcmc.a", m.a);
    m.b = f.num("mcmc.b", m.b);
    m.jitter = f.num("mcmc.jitter", m.jitter);
    m.thin = static_cast<int>(f.integer("mcmc.thin", m.thin));
    m.validate();
    return m;
}

std::vector<Solution> train_ga(const Common& c, const Problem& p, const std::string& method, Rng& rng) {
    const auto nus = c.cfg->nums("grid.nu", {0.0});
    GAConfig g = read_ga(c);
    const long rs_iters = c.scale.apply(c.cfg->integer("rs.iterations", 1000L * 100L));
    std::vector<Solution> out;
    for (std::size_t i = 0; i < nus.size(); ++i) {
        const double nu = nus[i];
        const ObjectiveFn obj = [&, nu](const ParamVector& t) {
            const double s = p.score(t);
            return Evaluation{s - nu * norm2(t), s};
        };
        Rng r = rng.substream(i);
        GAResult res = method == "ga" ? ga_run(g, p.dim, obj, r)
                                      : random_search(p.dim, rs_iters, g.lo, g.hi, obj, r, c.threads);
        Solution s;
        s.method = method;
        s.nu = nu;
        s.tag = method + "_" + p.model + "_nu" + tag_num(nu);
        s.theta = res.best_theta;
        s.in_score = res.best_objective;
        res.write_trace_csv((c.out / (s.tag + "_trace.csv")).string());
        write_theta(c.out / (s.tag + "_theta.json"), p.model, s.theta);
        out.push_back(std::move(s));
    }
    return out;
}

LogLikFn make_loglik(const Problem& p, const LikelihoodSpec& spec) {
    return [p, spec](const ParamVector& t) {
        const double s = p.score(t);
        if (spec.family == LikelihoodFamily::Exponential) return log_pseudo_likelihood(spec, s);
        return log_pseudo_likelihood(spec, std::round(s * spec.trials));
    };
}

void write_chain_artifacts(const Common& c, const Solution& s, const ChainOutput& out) {
    out.write_trace_csv((c.out / (s.tag + "_trace.csv")).string());
    write_text(c.out / (s.tag + "_summary.json"), s.summary.to_json() + "\n");
    CsvWriter sig({"iteration", "sigma2", "theta_norm2"});
    for (std::size_t i = 0; i < out.sample_sigma2.size(); ++i)
        sig.row({std::to_string(out.sample_iter[i]), fmt(out.sample_sigma2[i]), fmt(norm2(out.samples[i]))});
    sig.save(c.out / (s.tag + "_sigma2.csv"));
}

/// One chain per (family, beta, sigma_init2) combination.
std::vector<Solution> train_mcmc(const Common& c, const Problem& p, const std::vector<std::string>& families,
                                 long default_burn_count, long default_burn_other, Rng& rng) {
    const auto betas = c.cfg->nums("likelihood.beta", {1.0});
    const auto inits = c.cfg->nums("mcmc.sigma_init2_grid", {c.cfg->num("mcmc.sigma_init2", 1.0)});
    std::vector<Solution> out;
    std::size_t idx = 0;
    for (const auto& fam_name : families) {
        const auto fam = parse_family(fam_name);
        ChainConfig m = read_chain(c, fam == LikelihoodFamily::Binomial ? default_burn_count : default_burn_other);
        for (double beta : betas)
            for (double s0 : inits) {
                LikelihoodSpec spec{fam, beta, p.trials > 0 ? p.trials : 1};
                spec.validate();
                m.sigma_init2 = s0;
                Rng r = rng.substream(1000 + idx++);
                const auto chain = run_two_block(m, p.dim, make_loglik(p, spec), r);
                Solution s;
                s.method = "mcmc";
                s.family = fam_name;
                s.beta = beta;
                s.sigma_init2 = s0;
                s.tag = "mcmc_" + p.model + "_" + fam_name + "_beta" + tag_num(beta) + "_init" + tag_num(s0);
                s.theta = map_estimate(chain);
                s.in_score = p.score(s.theta);
                s.max_log_cond_post = *std::max_element(chain.sample_log_cond_post.begin(),
                                                        chain.sample_log_cond_post.end());
                std::vector<double> post_norm(chain.theta_norm2.begin() + std::min<std::size_t>(
                                                                              m.burn_in, chain.theta_norm2.size()),
                                              chain.theta_norm2.end());
                s.summary = diag::summarize(chain.samples, chain.sample_sigma2,
                                            post_norm.size() >= 2 ? post_norm : chain.theta_norm2);
                write_chain_artifacts(c, s, chain);
                write_theta(c.out / (s.tag + "_theta.json"), p.model, s.theta);
                out.push_back(std::move(s));
            }
    }
    return out;
}

std::vector<Solution> train_hybrid(const Common& c, const Problem& p, Rng& rng) {
    const auto betas = c.cfg->nums("likelihood.beta", {1.0});
    HybridConfig h;
    h.ga = read_ga(c);
    h.a = c.cfg->num("mcmc.a", h.a);
    h.b = c.cfg->num("mcmc.b", h.b);
    std::vector<Solution> out;
    for (std::size_t i = 0; i < betas.size(); ++i) {
        LikelihoodSpec spec{LikelihoodFamily::Exponential, betas[i], 1};
        Rng r = rng.substream(2000 + i);
        auto res = ga_hybrid_run(h, p.dim, make_loglik(p, spec), r);
        Solution s;
        s.method = "hybrid";
        s.family = "exponential";
        s.beta = betas[i];
        s.tag = "hybrid_" + p.model + "_beta" + tag_num(betas[i]);
        s.theta = res.best_theta;
        s.in_score = p.score(s.theta);
        s.max_log_cond_post = res.best_fitness;
        res.write_trace_csv((c.out / (s.tag + "_trace.csv")).string());
        CsvWriter d({"generation", "sigma2", "theta_norm2"});
        for (std::size_t k = 0; k < res.draws.size(); ++k)
            d.row({std::to_string(res.draw_generation[k]), fmt(res.draw_sigma2[k]), fmt(norm2(res.draws[k]))});
        d.save(c.out / (s.tag + "_sigma2.csv"));
        write_theta(c.out / (s.tag + "_theta.json"), p.model, s.theta);
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<Solution> train_all(const Common& c, const Problem& p, const std::vector<std::string>& methods,
                                const std::vector<std::string>& families, long burn_count, long burn_other) {
    Rng rng(c.seed);
    std::vector<Solution> all;
    for (std::size_t i = 0; i < methods.size(); ++i) {
        Rng r = rng.substream(i);
        std::vector<Solution> s;
        if (methods[i] == "ga" || methods[i] == "rs") s = train_ga(c, p, methods[i], r);
        else if (methods[i] == "mcmc") s = train_mcmc(c, p, families, burn_count, burn_other, r);
        else if (methods[i] == "hybrid") s = train_hybrid(c, p, r);
        else throw ConfigError("key 'run.methods': unknown method '" + methods[i] + "'");
        all.insert(all.end(), s.begin(), s.end());
    }
    return all;
}

std::vector<std::string> mcmc_headers() {
    return {"max_log_cond_post", "ess", "invgamma_shape", "invgamma_rate", "trend_tau"};
}

std::vector<std::string> mcmc_cells(const Solution& s) {
    if (s.method != "mcmc") {
        const std::string na = "";
        return {std::isnan(s.max_log_cond_post) ? na : fmt(s.max_log_cond_post), na, na, na, na};
    }
    return {fmt(s.max_log_cond_post), fmt(s.summary.ess), fmt(s.summary.invgamma.shape),
            fmt(s.summary.invgamma.rate), fmt(s.summary.trend_tau)};
}

// ---------------------------------------------------------------- navigation

void run_nav(const Common& c, const std::string& kind) {
    const Config& f = *c.cfg;
    nav::NavParams np;
    np.r_inner = f.num("nav.r_inner", np.r_inner);
    np.r_outer = f.num("nav.r_outer", np.r_outer);
    np.r_crash = f.num("nav.r_crash", np.r_crash);
    np.steps = static_cast<int>(f.integer("nav.steps", np.steps));
    np.obstacles = static_cast<int>(f.integer("nav.obstacles", np.obstacles));
    np.drones = static_cast<int>(f.integer("nav.drones", np.drones));
    np.delta = f.num("nav.delta", np.delta);
    np.p_lower = f.num("nav.p_lower", 2.0 * np.steps);
    np.p_upper = f.num("nav.p_upper", 3.0 * np.steps);
    np.sf = f.num("nav.sf", np.sf);
    np.validate();
    const auto train_seed = static_cast<std::uint64_t>(f.integer("nav.train_seed", 2024));
    const long n_test = c.scale.apply(f.integer("nav.test_seeds", 1000));
    const bool dump = f.flag("nav.dump_trajectory", false);
    const auto variants = f.strs("nav.variants", {kind == "nav-mcmc" ? "II" : "I"});

    std::vector<std::string> methods = {kind == "nav-ga" ? "ga" : kind == "nav-rs" ? "rs" : "mcmc"};
    const auto families = f.strs("likelihood.families", {"binomial", "beta", "exponential"});

    CsvWriter table({"model", "method", "family", "nu", "beta", "k_in", "median_k_out", "mean_k_out", "r_detection",
                     "max_log_cond_post", "ess", "invgamma_shape", "invgamma_rate", "trend_tau"});
    for (const auto& vname : variants) {
        if (vname != "I" && vname != "II") throw ConfigError("key 'nav.variants': expected I or II");
        const auto v = vname == "I" ? nav::Variant::I : nav::Variant::II;
        Problem p;
        p.model = "nav" + vname;
        p.dim = nav::param_count();
        p.trials = np.drones;
        p.score = [=](const ParamVector& t) {
            return nav::run_episode(t, train_seed, np, v).successes / static_cast<double>(np.drones);
        };
        const auto sols = train_all(c, p, methods, families, 20000, 60000);
        for (const auto& s : sols) {
            const auto ks = parallel_map<double>(static_cast<std::size_t>(n_test), c.threads, [&](std::size_t i) {
                return static_cast<double>(nav::run_episode(s.theta, i + 1, np, v).successes);
            });
            CsvWriter oos({"seed", "k"});
            for (std::size_t i = 0; i < ks.size(); ++i) oos.row({std::to_string(i + 1), fmt(ks[i])});
            oos.save(c.out / (s.tag + "_oos.csv"));
            if (dump) {
                const auto e = nav::run_episode(s.theta, train_seed, np, v, true);
                nav::write_trajectory_csv((c.out / (s.tag + "_trajectory.csv")).string(), e.trajectory);
            }
            std::vector<std::string> row = {vname,
                                            s.method,
                                            s.family,
                                            fmt(s.nu),
                                            s.method == "mcmc" ? fmt(s.beta) : "",
                                            fmt(std::round(s.in_score * np.drones)),
                                            fmt(median_of(ks)),
                                            fmt(mean_of(ks)),
                                            fmt(nav::phi_logistic(s.theta[0], np.sf))};
            for (auto& x : mcmc_cells(s)) row.push_back(x);
            table.row(row);
        }
    }
    table.save(c.out / "table.csv");
}

// ---------------------------------------------------------------- tic-tac-toe

void run_ttt(const Common& c, const std::string& kind) {
    const Config& f = *c.cfg;
    const auto train_n = static_cast<std::size_t>(f.integer("ttt.train_games", 100));
    const auto train_start = static_cast<std::uint64_t>(f.integer("ttt.train_seed_start", 1));
    const auto test_n = static_cast<std::size_t>(c.scale.apply(f.integer("ttt.test_games", 10000)));
    const auto test_start = static_cast<std::uint64_t>(f.integer("ttt.test_seed_start", 1000001));
    const auto baseline_games = static_cast<std::size_t>(c.scale.apply(f.integer("ttt.baseline_games", 100000)));
    const auto variants = f.strs("ttt.variants", {"II"});
    const std::vector<std::string> methods = {kind == "ttt-ga" ? "ga" : kind == "ttt-rs" ? "rs" : "mcmc"};
    const auto train_seeds = ttt::seed_range(train_start, train_n);

    CsvWriter table({"model", "method", "nu", "beta", "sigma_init2", "in_sample_pct", "out_of_sample_pct",
                     "test_games", "max_log_cond_post", "ess", "invgamma_shape", "invgamma_rate", "trend_tau"});
    CsvWriter logs({"game", "seed", "rho", "player", "opponent"});
    for (const auto& vname : variants) {
        if (vname != "I" && vname != "II") throw ConfigError("key 'ttt.variants': expected I or II");
        const auto v = vname == "I" ? ttt::Variant::I : ttt::Variant::II;
        Problem p;
        p.model = "ttt" + vname;
        p.dim = ttt::player_shape(v).num_params();
        p.trials = static_cast<int>(train_n);
        p.score = [=](const ParamVector& t) {
            return ttt::play_games(ttt::network_player(t, v), train_seeds, false).win_fraction;
        };
        std::vector<std::string> fams = {"exponential"};
        const auto sols = train_all(c, p, methods, fams, 20000, 20000);
        for (const auto& s : sols) {
            const auto player = ttt::network_player(s.theta, v);
            const auto train = ttt::play_games(player, train_seeds);
            const auto test = ttt::build_test_set(train.games, test_n, player, test_start, true);
            const auto res = ttt::play_games(player, test.seeds);
            for (std::size_t i = 0; i < res.games.size() && i < 100; ++i) logs.row(split(ttt::format_log(i + 1, res.games[i]), ','));
            std::vector<std::string> row = {vname,
                                            s.method,
                                            s.method == "mcmc" ? "" : fmt(s.nu),
                                            s.method == "mcmc" ? fmt(s.beta) : "",
                                            s.method == "mcmc" ? fmt(s.sigma_init2) : "",
                                            fmt(100.0 * s.in_score),
                                            fmt(100.0 * res.win_fraction),
                                            std::to_string(test.seeds.size())};
            for (auto& x : mcmc_cells(s)) row.push_back(x);
            table.row(row);
        }
    }
    // Random first mover against the random opponent.
    const auto base = ttt::play_games(ttt::random_player(), ttt::seed_range(test_start, baseline_games), false);
    std::vector<std::string> row = {"random", "baseline", "", "", "", "", fmt(100.0 * base.win_fraction),
                                    std::to_string(baseline_games)};
    for (std::size_t i = 0; i < mcmc_headers().size(); ++i) row.push_back("");
    table.row(row);
    table.save(c.out / "table.csv");
    logs.save(c.out / "test_games_sample.csv");
}

// ---------------------------------------------------------------- blackjack

struct BjSetup {
    BjProblem prob;
    std::uint64_t train_seed;
    std::uint64_t test_base;
    long test_nights;
    long log_nights;
};

std::uint64_t test_seed(const BjSetup& b, std::size_t n) { return b.test_base + 1000 * n; }

struct NightStats {
    std::vector<double> roi, hit;
};

NightStats run_nights(const BjSetup& b, int threads, const std::function<bj::NightResult(std::uint64_t)>& night) {
    const auto res = parallel_map<bj::NightResult>(static_cast<std::size_t>(b.test_nights), threads,
                                                   [&](std::size_t n) { return night(test_seed(b, n)); });
    NightStats s;
    for (const auto& r : res) {
        s.roi.push_back(100.0 * r.roi);
        s.hit.push_back(r.hit_rate);
    }
    return s;
}

void save_nights(const Common& c, const BjSetup& b, const std::string& tag, const NightStats& s) {
    CsvWriter w({"night", "seed", "roi", "hit_rate"});
    for (std::size_t n = 0; n < s.roi.size(); ++n)
        w.row({std::to_string(n + 1), std::to_string(test_seed(b, n)), fmt(s.roi[n]), fmt(s.hit[n])});
    w.save(c.out / (tag + "_nights.csv"));
}

void save_stakes(const Common& c, const BjSetup& b, const std::string& tag,
                 const std::function<bj::NightResult(std::uint64_t)>& night) {
    CsvWriter w({"night", "hand", "stake"});
    for (long n = 0; n < b.log_nights; ++n) {
        const auto r = night(test_seed(b, static_cast<std::size_t>(n)));
        for (std::size_t k = 0; k < r.stakes.size(); ++k)
            w.row({std::to_string(n + 1), std::to_string(k + 1), fmt(r.stakes[k])});
    }
    w.save(c.out / (tag + "_stakes.csv"));
}

bj::BetPolicy random_bet(std::uint64_t seed) {
    auto rng = std::make_shared<Rng>(Rng(seed).substream(7));
    return [rng](const bj::History&, int) { return rng->uniform(); };
}

void run_bj(const Common& c, const std::string& kind) {
    const Config& f = *c.cfg;
    BjSetup b;
    b.prob.problem = kind == "bj1" ? 1 : kind == "bj2" ? 2 : 3;
    b.prob.bet_variant = static_cast<int>(f.integer("bj.bet_variant", 2));
    if (b.prob.bet_variant != 1 && b.prob.bet_variant != 2) throw ConfigError("key 'bj.bet_variant': expected 1 or 2");
    b.prob.hands = static_cast<int>(f.integer("bj.hands", 1000));
    b.prob.rules.decks = static_cast<int>(f.integer("bj.decks", 8));
    b.train_seed = static_cast<std::uint64_t>(f.integer("bj.train_seed", 2024));
    b.test_base = static_cast<std::uint64_t>(f.integer("bj.test_seed_base", 1000000));
    b.test_nights = c.scale.apply(f.integer("bj.test_nights", 10000));
    b.log_nights = std::min(b.test_nights, f.integer("bj.stake_log_nights", 100));
    if (b.train_seed >= b.test_base && b.train_seed < b.test_base + 1000 * static_cast<std::uint64_t>(b.test_nights))
        throw ConfigError("key 'bj.train_seed': must lie outside the test seed range");
    const bool baselines = f.flag("bj.baselines", true);
    const auto methods = f.strs("run.methods", {"ga"});

    CsvWriter table({"problem", "policy", "method", "nu", "beta", "in_hit_rate", "in_roi", "out_hit_rate", "mu_roi",
                     "sigma_roi", "max_log_cond_post", "ess", "invgamma_shape", "invgamma_rate", "trend_tau"});
    const std::string pname = kind == "bj1" ? "I" : kind == "bj2" ? "II" : "III";
    const std::vector<std::string> blank(mcmc_headers().size(), "");

    auto add_row = [&](const std::string& policy, const std::string& method, const std::string& nu,
                       const std::string& beta, const bj::NightResult& in, const NightStats& s,
                       const std::vector<std::string>& extra) {
        std::vector<std::string> row = {pname,         policy,           method,           nu,
                                        beta,          fmt(in.hit_rate), fmt(100 * in.roi), fmt(mean_of(s.hit)),
                                        fmt(mean_of(s.roi)), fmt(sd_of(s.roi))};
        for (const auto& x : extra) row.push_back(x);
        table.row(row);
    };

    if (baselines) {
        const auto basic = bj::BasicStrategy::load(bj::default_chart_path());
        std::vector<std::pair<std::string, std::function<bj::NightResult(std::uint64_t)>>> base;
        const auto& rules = b.prob.rules;
        const int K = b.prob.hands;
        if (b.prob.problem == 1 || b.prob.problem == 3) {
            base.push_back({"Purely Random", [=](std::uint64_t s) {
                                return bj::play_night(bj::purely_random_policy(), bj::unit_bet(), K, s, rules);
                            }});
            base.push_back({"Random Stay/Hit", [=](std::uint64_t s) {
                                return bj::play_night(bj::random_stay_hit_policy(), bj::unit_bet(), K, s, rules);
                            }});
            base.push_back({"S17", [=](std::uint64_t s) {
                                return bj::play_night(bj::stand_threshold_policy(false), bj::unit_bet(), K, s, rules);
                            }});
            base.push_back({"H17", [=](std::uint64_t s) {
                                return bj::play_night(bj::stand_threshold_policy(true), bj::unit_bet(), K, s, rules);
                            }});
            base.push_back({"Basic Strategy", [=](std::uint64_t s) {
                                return bj::play_night(basic.policy(), bj::unit_bet(), K, s, rules);
                            }});
        } else {
            base.push_back({"Unit Bet", [=](std::uint64_t s) {
                                return bj::play_night(basic.policy(), bj::unit_bet(), K, s, rules, true);
                            }});
            base.push_back({"Random Bet", [=](std::uint64_t s) {
                                return bj::play_night(basic.policy(), random_bet(s), K, s, rules, true);
                            }});
            for (int x = 0; x <= 3; ++x)
                base.push_back({"TC > " + std::to_string(x), [=](std::uint64_t s) {
                                    return bj::play_night(basic.policy(), bj::threshold_bet(x), K, s, rules, true);
                                }});
        }
        for (const auto& [name, night] : base) {
            const auto in = night(b.train_seed);
            const auto s = run_nights(b, c.threads, night);
            std::string tag = "baseline_" + name;
            std::replace_if(tag.begin(), tag.end(), [](char ch) { return !std::isalnum(static_cast<unsigned char>(ch)); }, '_');
            save_nights(c, b, tag, s);
            if (b.prob.problem != 1) save_stakes(c, b, tag, night);
            add_row(name, "baseline", "", "", in, s, blank);
        }
    }

    Problem p;
    p.model = "bj" + pname + (b.prob.problem == 1 ? "" : "_bet" + std::to_string(b.prob.bet_variant));
    p.dim = bj_dim(b.prob);
    const auto prob = b.prob;
    const auto train_seed = b.train_seed;
    p.score = [prob, train_seed](const ParamVector& t) { return bj_night(prob, t, train_seed).roi; };
    const auto sols = train_all(c, p, methods, {"exponential"}, 20000, 20000);
    for (const auto& s : sols) {
        auto night = [&](std::uint64_t seed) { return bj_night(prob, s.theta, seed, true); };
        const auto in = bj_night(prob, s.theta, b.train_seed);
        const auto st = run_nights(b, c.threads, night);
        save_nights(c, b, s.tag, st);
        if (b.prob.problem != 1) save_stakes(c, b, s.tag, night);
        add_row("network", s.method, s.method == "ga" || s.method == "rs" ? fmt(s.nu) : "",
                s.method == "ga" || s.method == "rs" ? "" : fmt(s.beta), in, st, mcmc_cells(s));
    }
    table.save(c.out / "table.csv");
}

// ---------------------------------------------------------------- classification

void run_classify(const Common& c, const std::string& kind) {
    const Config& f = *c.cfg;
    const auto data_seed = static_cast<std::uint64_t>(f.integer("data.seed", 7));
    const std::string path = f.str("data.path", "");
    const double radius = f.num("data.radius", 2.0);
    const double sigma = f.num("data.sigma", 1.2);
    const ParticleDataset ds = path.empty() ? generate_particle_data(data_seed, radius, sigma) : read_particle_csv(path);
    write_particle_csv((c.out / "particles.csv").string(), ds);

    std::vector<std::string> methods;
    if (kind == "classify") methods = {"mcmc", "gd", "ga"};
    else methods = {kind.substr(std::string("classify-").size())};

    Rng rng(c.seed);
    const auto shape = classifier_shape();
    const double init_sd = f.num("classify.init_sd", 0.5);
    ParamVector theta0(shape.num_params());
    {
        Rng r0 = rng.substream(0);
        for (auto& t : theta0) t = init_sd * r0.normal();
    }
    write_theta(c.out / "theta_init.json", "classifier", theta0);

    ChainConfig m = read_chain(c, 20000);
    GdHybridConfig gd;
    gd.steps = static_cast<int>(c.scale.apply(f.integer("gd.steps", 20000)));
    gd.step_size = f.num("gd.step_size", 1e-3);
    gd.a = m.a;
    gd.b = m.b;
    HybridConfig h;
    h.ga = read_ga(c);
    h.a = m.a;
    h.b = m.b;

    CsvWriter table({"method", "in_sample_acc", "out_of_sample_acc"});
    for (std::size_t i = 0; i < methods.size(); ++i) {
        Rng r = rng.substream(i + 1);
        ClassifyResult res;
        if (methods[i] == "mcmc") res = classify_mcmc(ds, theta0, m, r);
        else if (methods[i] == "gd") res = classify_gd(ds, theta0, gd, r);
        else if (methods[i] == "ga") res = classify_ga(ds, theta0, h, r);
        else throw ConfigError("experiment.kind: unknown classification method '" + methods[i] + "'");
        table.row({res.method, fmt(100 * res.in_acc), fmt(100 * res.out_acc)});
        const std::string tag = "classify_" + methods[i];
        write_theta(c.out / (tag + "_theta.json"), "classifier", res.theta);
        CsvWriter tr({"index", "theta_norm2", "sigma2"});
        for (std::size_t k = 0; k < res.theta_norm2.size() && k < res.sigma2.size(); ++k)
            tr.row({std::to_string(k + 1), fmt(res.theta_norm2[k]), fmt(res.sigma2[k])});
        tr.save(c.out / (tag + "_trace.csv"));
    }
    table.save(c.out / "table.csv");
}

const std::set<std::string> kKnownKeys = {
    "experiment.kind", "experiment.name", "experiment.out_root", "experiment.threads", "experiment.seed",
    "ga.population", "ga.generations", "ga.blend_alpha", "ga.mutation_rate", "ga.mutation_sigma2", "ga.lo", "ga.hi",
    "rs.iterations", "grid.nu", "run.methods",
    "mcmc.iterations", "mcmc.burn_in", "mcmc.sigma_init2", "mcmc.sigma_init2_grid", "mcmc.stride", "mcmc.window",
    "mcmc.kappa", "mcmc.s2_init", "mcmc.a", "mcmc.b", "mcmc.jitter", "mcmc.thin",
    "likelihood.beta", "likelihood.families",
    "nav.r_inner", "nav.r_outer", "nav.r_crash", "nav.steps", "nav.obstacles", "nav.drones", "nav.delta",
    "nav.p_lower", "nav.p_upper", "nav.sf", "nav.train_seed", "nav.test_seeds", "nav.dump_trajectory",
    "nav.variants",
    "ttt.train_games", "ttt.train_seed_start", "ttt.test_games", "ttt.test_seed_start", "ttt.baseline_games",
    "ttt.variants",
    "bj.bet_variant", "bj.hands", "bj.decks", "bj.train_seed", "bj.test_seed_base", "bj.test_nights",
    "bj.stake_log_nights", "bj.baselines",
    "data.seed", "data.path", "data.radius", "data.sigma", "classify.init_sd", "gd.steps", "gd.step_size",
};

}  // namespace

// ---------------------------------------------------------------- entry points

std::string run_experiment(const std::string& config_path, const RunOptions& opt) {
    return run_experiment(Config::load(config_path), opt);
}

std::string run_experiment(Config cfg, const RunOptions& opt) {
    for (const auto& k : cfg.keys())
        if (!kKnownKeys.count(k)) throw ConfigError("unknown key '" + k + "'");
    const std::string kind = cfg.str("experiment.kind", "");
    static const std::vector<std::string> kinds = {"nav-ga",   "nav-rs", "nav-mcmc", "ttt-ga",        "ttt-rs",
                                                   "ttt-mcmc", "bj1",    "bj2",      "bj3",           "classify",
                                                   "classify-mcmc", "classify-gd", "classify-ga"};
    if (std::find(kinds.begin(), kinds.end(), kind) == kinds.end())
        throw ConfigError("key 'experiment.kind': unknown experiment '" + kind + "'");

    std::string root = cfg.str("experiment.out_root", "results");
    if (!opt.out_root.empty()) root = opt.out_root;
    if (const char* env = std::getenv("SOPT_OUT_ROOT"); env && *env) root = env;
    const std::string name = cfg.str("experiment.name", kind);

    Common c;
    c.cfg = &cfg;
    c.scale.factor = opt.scale;
    c.out = fs::path(root) / name;
    const long hw = static_cast<long>(std::max(1u, std::thread::hardware_concurrency()));
    c.threads = static_cast<int>(cfg.integer("experiment.threads", hw));
    if (c.threads < 1) throw ConfigError("key 'experiment.threads': must be at least 1");
    c.seed = static_cast<std::uint64_t>(cfg.integer("experiment.seed", 2024));
    fs::create_directories(c.out);

    if (kind.rfind("nav-", 0) == 0) run_nav(c, kind);
    else if (kind.rfind("ttt-", 0) == 0) run_ttt(c, kind);
    else if (kind.rfind("bj", 0) == 0) run_bj(c, kind);
    else run_classify(c, kind);

    std::ostringstream eff;
    eff << "# scale = " << fmt(opt.scale) << "\n" << cfg.effective();
    write_text(c.out / "effective_config.ini", eff.str());
    return c.out.string();
}

// ---------------------------------------------------------------- plot data

Histogram histogram(const std::vector<double>& values, std::size_t bins) {
    Histogram h;
    if (values.empty()) return h;
    const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
    const double lo = *mn, hi = *mx;
    if (lo == hi || bins <= 1) {
        h.lo = {lo};
        h.hi = {hi};
        h.count = {values.size()};
        return h;
    }
    const double w = (hi - lo) / static_cast<double>(bins);
    h.count.assign(bins, 0);
    for (std::size_t i = 0; i < bins; ++i) {
        h.lo.push_back(lo + w * static_cast<double>(i));
        h.hi.push_back(i + 1 == bins ? hi : lo + w * static_cast<double>(i + 1));
    }
    for (double v : values) {
        auto i = static_cast<std::size_t>((v - lo) / w);
        if (i >= bins) i = bins - 1;
        ++h.count[i];
    }
    return h;
}

void emit_plot_data(const std::string& kind, const std::string& in, const std::string& out) {
    if (kind == "roi-hist" || kind == "bet-hist" || kind == "sigma2-hist") {
        const std::string col = kind == "roi-hist" ? "roi" : kind == "bet-hist" ? "stake" : "sigma2";
        const auto v = read_csv(in).column(col);
        const auto h = histogram(v, 50);
        CsvWriter w({"bin_lo", "bin_hi", "count", "fraction"});
        for (std::size_t i = 0; i < h.count.size(); ++i)
            w.row({fmt(h.lo[i]), fmt(h.hi[i]), std::to_string(h.count[i]),
                   fmt(static_cast<double>(h.count[i]) / static_cast<double>(v.size()))});
        w.save(out);
        return;
    }
    if (kind == "response-curve") {
        std::ifstream f(in);
        if (!f) throw std::runtime_error("cannot read " + in);
        const auto j = nlohmann::json::parse(f);
        const std::string model = j.at("model").get<std::string>();
        const ParamVector theta = j.at("theta").get<ParamVector>();
        if (model == "classifier") {
            CsvWriter w({"x1", "y2", "p1", "p2", "p3", "class"});
            for (int a = 0; a <= 100; ++a)
                for (int b = 0; b <= 100; ++b) {
                    const double x = -5.0 + 0.1 * a, y = -5.0 + 0.1 * b;
                    const auto p = forward(classifier_shape(), theta, {x, y});
                    const auto cls = std::max_element(p.begin(), p.end()) - p.begin();
                    w.row({fmt(x), fmt(y), fmt(p[0]), fmt(p[1]), fmt(p[2]), std::to_string(cls + 1)});
                }
            w.save(out);
            return;
        }
        NetworkShape shape;
        double lo = 0.0, hi = 0.0;
        const double* params = theta.data();
        if (model.rfind("nav", 0) == 0) {
            shape = nav::controller_shape();
            if (theta.size() != nav::param_count()) throw ShapeError("navigation theta has wrong length");
            ++params;
            lo = 0.0;
            hi = 100.0;
        } else if (model.rfind("bjII_bet1", 0) == 0 || model == "bet1") {
            shape = bj_bet_shape(1);
            lo = -3.0;
            hi = 3.0;
        } else {
            throw std::invalid_argument("response curves need a navigation, classifier or single-input bet model");
        }
        if (model.rfind("nav", 0) != 0 && theta.size() != shape.num_params())
            throw ShapeError("theta length does not match the model");
        std::vector<std::string> header = {"a0"};
        for (std::size_t o = 0; o < shape.num_outputs(); ++o) header.push_back("out" + std::to_string(o + 1));
        CsvWriter w(header);
        for (int i = 0; i <= 400; ++i) {
            const double a0 = lo + (hi - lo) * i / 400.0;
            const auto y = forward(shape, params, {a0});
            std::vector<std::string> row = {fmt(a0)};
            for (double v : y) row.push_back(fmt(v));
            w.row(row);
        }
        w.save(out);
        return;
    }
    throw std::invalid_argument("unknown plot kind '" + kind + "'");
}

}  // namespace sopt::harness
