#include "sopt/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sopt {

Activation parse_activation(const std::string& name) {
    if (name == "tanh") return Activation::Tanh;
    if (name == "sigmoid") return Activation::Sigmoid;
    if (name == "softmax") return Activation::Softmax;
    if (name == "identity") return Activation::Identity;
    throw std::invalid_argument("unknown activation: " + name);
}

std::string to_string(Activation a) {
    switch (a) {
        case Activation::Tanh: return "tanh";
        case Activation::Sigmoid: return "sigmoid";
        case Activation::Softmax: return "softmax";
        case Activation::Identity: return "identity";
    }
    return "?";
}

std::size_t NetworkShape::num_params() const {
    std::size_t s = 0;
    for (std::size_t l = 1; l < sizes.size(); ++l) s += sizes[l - 1] * sizes[l] + sizes[l];
    return s;
}

void NetworkShape::validate() const {
    if (sizes.size() < 2) throw ShapeError("network needs at least one layer");
    for (auto d : sizes)
        if (d == 0) throw ShapeError("layer sizes must be positive");
    if (hidden == Activation::Softmax) throw ShapeError("softmax is only valid on the output layer");
}

NetworkShape NetworkShape::standard(std::size_t d_in, std::size_t d_out, Activation out) {
    return NetworkShape{{d_in, 3, 3, d_out}, Activation::Tanh, out};
}

namespace {

void activate(Activation a, std::vector<double>& z) {
    switch (a) {
        case Activation::Tanh:
            for (auto& v : z) v = std::tanh(v);
            break;
        case Activation::Sigmoid:
            for (auto& v : z) v = 1.0 / (1.0 + std::exp(-v));
            break;
        case Activation::Softmax: {
            const double m = *std::max_element(z.begin(), z.end());
            double sum = 0.0;
            for (auto& v : z) sum += (v = std::exp(v - m));
            for (auto& v : z) v /= sum;
            break;
        }
        case Activation::Identity: break;
    }
}

// Forward pass keeping every layer's activations (a[0] is the input).
std::vector<std::vector<double>> forward_all(const NetworkShape& shape, const double* p,
                                             const std::vector<double>& input) {
    std::vector<std::vector<double>> a;
    a.reserve(shape.sizes.size());
    a.push_back(input);
    const std::size_t L = shape.num_layers();
    for (std::size_t l = 1; l <= L; ++l) {
        const std::size_t din = shape.sizes[l - 1], dout = shape.sizes[l];
        const double* w = p;
        const double* b = p + din * dout;
        std::vector<double> z(b, b + dout);
        const auto& prev = a.back();
        for (std::size_t k = 0; k < din; ++k) {
            const double ak = prev[k];
            const double* row = w + k * dout;
            for (std::size_t j = 0; j < dout; ++j) z[j] += ak * row[j];
        }
        activate(l == L ? shape.output : shape.hidden, z);
        a.push_back(std::move(z));
        p += din * dout + dout;
    }
    return a;
}

}  // namespace

std::vector<double> forward(const NetworkShape& shape, const double* params, const std::vector<double>& input) {
    if (input.size() != shape.num_inputs()) throw ShapeError("input length does not match d_0");
    const std::size_t L = shape.num_layers();
    std::vector<double> cur = input, next;
    for (std::size_t l = 1; l <= L; ++l) {
        const std::size_t din = shape.sizes[l - 1], dout = shape.sizes[l];
        const double* w = params;
        const double* b = params + din * dout;
        next.assign(b, b + dout);
        for (std::size_t k = 0; k < din; ++k) {
            const double ak = cur[k];
            const double* row = w + k * dout;
            for (std::size_t j = 0; j < dout; ++j) next[j] += ak * row[j];
        }
        activate(l == L ? shape.output : shape.hidden, next);
        cur.swap(next);
        params += din * dout + dout;
    }
    return cur;
}

std::vector<double> forward(const NetworkShape& shape, const std::vector<double>& params,
                            const std::vector<double>& input) {
    if (params.size() != shape.num_params()) throw ShapeError("parameter vector length does not match S");
    return forward(shape, params.data(), input);
}

SoftmaxResult softmax_over_valid(const std::vector<double>& logits, const std::vector<bool>& valid) {
    if (logits.size() != valid.size()) throw ShapeError("logits and mask differ in length");
    const std::size_t best = argmax_valid(logits, valid);
    SoftmaxResult r{std::vector<double>(logits.size(), 0.0), best};
    const double m = logits[best];
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i)
        if (valid[i]) sum += (r.probs[i] = std::exp(logits[i] - m));
    for (auto& p : r.probs) p /= sum;
    return r;
}

std::size_t argmax_valid(const std::vector<double>& logits, const std::vector<bool>& valid) {
    std::size_t best = logits.size();
    for (std::size_t i = 0; i < logits.size(); ++i)
        if (valid[i] && (best == logits.size() || logits[i] > logits[best])) best = i;
    if (best == logits.size()) throw NoValidAction("no valid action available");
    return best;
}

double cross_entropy(const NetworkShape& shape, const std::vector<double>& params, const LabeledSet& data) {
    double loss = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto out = forward(shape, params, data.x[i]);
        loss -= std::log(std::max(out[data.label[i]], kLogProbFloor));
    }
    return loss;
}

std::vector<double> grad_cross_entropy_l2(const NetworkShape& shape, const std::vector<double>& params,
                                          const LabeledSet& data, double sigma2) {
    if (shape.output != Activation::Softmax) throw ShapeError("cross-entropy gradient needs a softmax head");
    if (params.size() != shape.num_params()) throw ShapeError("parameter vector length does not match S");
    const std::size_t L = shape.num_layers();
    std::vector<double> g(params.size(), 0.0);

    std::vector<std::size_t> offset(L + 1, 0);
    for (std::size_t l = 1; l <= L; ++l)
        offset[l] = offset[l - 1] + shape.sizes[l - 1] * shape.sizes[l] + shape.sizes[l];

    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto a = forward_all(shape, params.data(), data.x[i]);
        const auto& out = a[L];
        const std::size_t y = data.label[i];
        // d(-log a_y)/dz for softmax. When a_y sits on the floor the loss is
        // flat in z, so the gradient is zero.
        std::vector<double> delta(out.size());
        if (out[y] < kLogProbFloor) {
            std::fill(delta.begin(), delta.end(), 0.0);
        } else {
            for (std::size_t j = 0; j < out.size(); ++j) delta[j] = out[j] - (j == y ? 1.0 : 0.0);
        }
        for (std::size_t l = L; l >= 1; --l) {
            const std::size_t din = shape.sizes[l - 1], dout = shape.sizes[l];
            double* gw = g.data() + offset[l - 1];
            double* gb = gw + din * dout;
            const auto& prev = a[l - 1];
            for (std::size_t k = 0; k < din; ++k)
                for (std::size_t j = 0; j < dout; ++j) gw[k * dout + j] += prev[k] * delta[j];
            for (std::size_t j = 0; j < dout; ++j) gb[j] += delta[j];
            if (l == 1) break;
            const double* w = params.data() + offset[l - 1];
            std::vector<double> back(din, 0.0);
            for (std::size_t k = 0; k < din; ++k) {
                double s = 0.0;
                for (std::size_t j = 0; j < dout; ++j) s += w[k * dout + j] * delta[j];
                const double h = prev[k];
                switch (shape.hidden) {
                    case Activation::Tanh: s *= 1.0 - h * h; break;
                    case Activation::Sigmoid: s *= h * (1.0 - h); break;
                    default: break;
                }
                back[k] = s;
            }
            delta.swap(back);
        }
    }
    for (std::size_t r = 0; r < g.size(); ++r) g[r] += params[r] / sigma2;
    return g;
}

double accuracy(const NetworkShape& shape, const std::vector<double>& params, const LabeledSet& data) {
    if (data.size() == 0) return 0.0;
    std::size_t hit = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto out = forward(shape, params, data.x[i]);
        const auto best = static_cast<std::size_t>(std::max_element(out.begin(), out.end()) - out.begin());
        hit += best == data.label[i];
    }
    return static_cast<double>(hit) / static_cast<double>(data.size());
}

}  // namespace sopt
