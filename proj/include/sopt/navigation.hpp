#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sopt/network.hpp"

namespace sopt::nav {

struct NavParams {
    double r_inner = 0.25;
    double r_outer = 1.0;
    double r_crash = 0.05;
    int steps = 250;      // K
    int obstacles = 50;   // J
    int drones = 100;     // T
    double delta = 0.01;
    double p_lower = 500; // 2K
    double p_upper = 750; // 3K
    double sf = 1.0;
    void validate() const;
};

struct Point {
    double x, y;
};

struct Obstacle {
    double omega, phi, r;
};

enum Status : int { Escaped = 1, Crashed = -1, Active = 0 };

struct NavState {
    std::vector<Obstacle> obstacles;
    std::vector<Point> drones;
    std::vector<int> status;
    int k = 0;
};

enum class Variant { I, II };

/// Obstacles are drawn first (omega, phi, r for each), then drones (radius, angle).
NavState init_env(std::uint64_t seed, const NavParams& p);

Point obstacle_pos(const Obstacle& o, int k);

/// +1 beyond the outer radius, -1 within r_crash of an obstacle (checked first), else 0.
int game_status(const Point& x, const std::vector<Point>& obstacles, const NavParams& p);

double phi_logistic(double theta1, double sf);

double input_feature(const Point& x, const std::vector<Point>& obstacles, double r_detection, Variant v,
                     const NavParams& p);

/// 1 -> 3 -> 3 -> 2 with tanh throughout.
NetworkShape controller_shape();
/// theta1 plus the controller weights.
std::size_t param_count();

struct TrajectoryRow {
    int k, drone;
    double x, y;
    int status;
};

struct EpisodeResult {
    int successes = 0;
    std::vector<int> status;
    std::vector<TrajectoryRow> trajectory;
};

/// K steps: obstacles move, check, drones move, check. Drones still active at the end time out.
EpisodeResult run_episode(const std::vector<double>& theta, std::uint64_t seed, const NavParams& p, Variant v,
                          bool record = false);

void write_trajectory_csv(const std::string& path, const std::vector<TrajectoryRow>& rows);

}  // namespace sopt::nav
