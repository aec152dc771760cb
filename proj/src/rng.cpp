#include "sopt/rng.hpp"

#include <cmath>

namespace sopt {

namespace {

inline std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

Rng::Rng(std::uint64_t seed) : seed_(seed) {
    std::uint64_t sm = seed;
    for (auto& w : s_) w = splitmix64(sm);
}

Rng Rng::substream(std::uint64_t index) const {
    std::uint64_t h = seed_ ^ 0x5851f42d4c957f2dULL;
    std::uint64_t a = splitmix64(h);
    std::uint64_t k = index + 0x2545f4914f6cdd1dULL;
    std::uint64_t b = splitmix64(k);
    return Rng(a ^ rotl(b, 17));
}

std::uint64_t Rng::next_u64() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double Rng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Rng::uniform_open() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

std::uint64_t Rng::below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("Rng::below: n must be positive");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
        x = next_u64();
    } while (x >= limit);
    return x % n;
}

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u, v, s;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    has_spare_ = true;
    return u * m;
}

double sample_gamma(double shape, Rng& rng) {
    if (!(shape > 0.0)) throw std::invalid_argument("sample_gamma: shape must be positive");
    if (shape < 1.0) {
        const double g = sample_gamma(shape + 1.0, rng);
        return g * std::pow(rng.uniform_open(), 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = rng.normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.uniform_open();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

double sample_inv_gamma(const InvGammaParams& p, Rng& rng) {
    if (!(p.shape > 0.0) || !(p.rate > 0.0))
        throw std::invalid_argument("sample_inv_gamma: shape and rate must be positive");
    return p.rate / sample_gamma(p.shape, rng);
}

InvGammaParams inv_gamma_posterior(double a, double b, std::size_t S, double theta_norm2) {
    return {a + 0.5 * static_cast<double>(S), b + 0.5 * theta_norm2};
}

MvnSampler::MvnSampler(const Eigen::MatrixXd& cov) {
    if (cov.rows() != cov.cols()) throw std::invalid_argument("MvnSampler: covariance must be square");
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() == Eigen::Success) {
        L_ = llt.matrixL();
        return;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    if (es.info() != Eigen::Success) throw DegenerateCovariance("eigendecomposition failed");
    Eigen::VectorXd lam = es.eigenvalues();
    const double scale = std::max(1.0, lam.cwiseAbs().maxCoeff());
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
        if (lam(i) < -1e-9 * scale) throw DegenerateCovariance("covariance is not positive semi-definite");
        lam(i) = std::sqrt(std::max(lam(i), 0.0));
    }
    L_ = es.eigenvectors() * lam.asDiagonal();
}

Eigen::VectorXd MvnSampler::draw(const Eigen::VectorXd& mean, Rng& rng) const {
    Eigen::VectorXd z(L_.cols());
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.normal();
    return mean + L_ * z;
}

Eigen::VectorXd sample_mvn(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov, Rng& rng) {
    if (mean.size() != cov.rows()) throw std::invalid_argument("sample_mvn: dimension mismatch");
    return MvnSampler(cov).draw(mean, rng);
}

}  // namespace sopt
