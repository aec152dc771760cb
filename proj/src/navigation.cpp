#include "sopt/navigation.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "sopt/rng.hpp"

namespace sopt::nav {

void NavParams::validate() const {
    if (!(0.0 < r_inner && r_inner < r_outer)) throw std::invalid_argument("need 0 < r_inner < r_outer");
    if (!(r_crash > 0.0)) throw std::invalid_argument("r_crash must be positive");
    if (steps < 0 || obstacles < 1 || drones < 1) throw std::invalid_argument("bad navigation sizes");
    if (delta < 0.0) throw std::invalid_argument("step length must be nonnegative");
    if (!(p_lower > 0.0 && p_lower <= p_upper)) throw std::invalid_argument("need 0 < p_lower <= p_upper");
}

NavState init_env(std::uint64_t seed, const NavParams& p) {
    p.validate();
    Rng rng(seed);
    NavState s;
    constexpr double two_pi = 2.0 * std::numbers::pi;
    for (int j = 0; j < p.obstacles; ++j) {
        Obstacle o;
        o.omega = two_pi * rng.uniform(1.0 / p.p_upper, 1.0 / p.p_lower);
        o.phi = two_pi * rng.uniform();
        o.r = rng.uniform(p.r_inner + p.r_crash, p.r_outer);
        s.obstacles.push_back(o);
    }
    for (int t = 0; t < p.drones; ++t) {
        const double r = rng.uniform(0.0, p.r_inner);
        const double a = two_pi * rng.uniform();
        s.drones.push_back({r * std::cos(a), r * std::sin(a)});
    }
    s.status.assign(static_cast<std::size_t>(p.drones), Active);
    return s;
}

Point obstacle_pos(const Obstacle& o, int k) {
    const double a = o.omega * k + o.phi;
    return {o.r * std::cos(a), o.r * std::sin(a)};
}

int game_status(const Point& x, const std::vector<Point>& obstacles, const NavParams& p) {
    for (const auto& o : obstacles)
        if (std::hypot(x.x - o.x, x.y - o.y) <= p.r_crash) return Crashed;
    if (std::hypot(x.x, x.y) >= p.r_outer) return Escaped;
    return Active;
}

double phi_logistic(double theta1, double sf) { return sf / (1.0 + std::exp(-theta1)); }

double input_feature(const Point& x, const std::vector<Point>& obstacles, double r_detection, Variant v,
                     const NavParams& p) {
    double sum = 0.0;
    bool any = false;
    double dmin = std::numeric_limits<double>::infinity();
    for (const auto& o : obstacles) {
        const double d = std::hypot(x.x - o.x, x.y - o.y);
        dmin = std::min(dmin, d);
        if (d <= r_detection) {
            any = true;
            sum += 1.0 / (d - p.r_crash);
        }
    }
    if (any) return sum;
    return v == Variant::I ? 1.0 / (dmin - p.r_crash) : 0.0;
}

NetworkShape controller_shape() { return NetworkShape{{1, 3, 3, 2}, Activation::Tanh, Activation::Tanh}; }

std::size_t param_count() { return 1 + controller_shape().num_params(); }

EpisodeResult run_episode(const std::vector<double>& theta, std::uint64_t seed, const NavParams& p, Variant v,
                          bool record) {
    const auto shape = controller_shape();
    if (theta.size() != 1 + shape.num_params()) throw ShapeError("navigation theta has wrong length");
    NavState s = init_env(seed, p);
    const double r_det = phi_logistic(theta[0], p.sf);
    const double* w = theta.data() + 1;
    const auto T = static_cast<std::size_t>(p.drones);
    std::vector<Point> obs(s.obstacles.size());
    EpisodeResult res;

    auto dump = [&](int k) {
        if (!record) return;
        for (std::size_t t = 0; t < T; ++t)
            res.trajectory.push_back({k, static_cast<int>(t), s.drones[t].x, s.drones[t].y, s.status[t]});
    };
    for (std::size_t j = 0; j < obs.size(); ++j) obs[j] = obstacle_pos(s.obstacles[j], 0);
    dump(0);

    for (int k = 1; k <= p.steps; ++k) {
        for (std::size_t j = 0; j < obs.size(); ++j) obs[j] = obstacle_pos(s.obstacles[j], k);
        for (std::size_t t = 0; t < T; ++t)
            if (s.status[t] == Active) s.status[t] = game_status(s.drones[t], obs, p);
        for (std::size_t t = 0; t < T; ++t) {
            if (s.status[t] != Active) continue;
            const double f = input_feature(s.drones[t], obs, r_det, v, p);
            const auto out = forward(shape, w, {f});
            s.drones[t].x += out[0] * p.delta;
            s.drones[t].y += out[1] * p.delta;
            s.status[t] = game_status(s.drones[t], obs, p);
        }
        s.k = k;
        dump(k);
    }
    for (auto& st : s.status)
        if (st == Active) st = Crashed;
    for (int st : s.status) res.successes += st == Escaped;
    res.status = s.status;
    return res;
}

void write_trajectory_csv(const std::string& path, const std::vector<TrajectoryRow>& rows) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path);
    f.precision(10);
    f << "k,drone,x,y,status\n";
    for (const auto& r : rows) f << r.k << ',' << r.drone << ',' << r.x << ',' << r.y << ',' << r.status << '\n';
}

}  // namespace sopt::nav
