#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace sopt {

enum class Activation { Tanh, Sigmoid, Softmax, Identity };

Activation parse_activation(const std::string& name);
std::string to_string(Activation a);

/// Layer sizes d_0..d_L with one activation for hidden layers and one for the output.
///
/// Parameters are packed layer by layer. Each layer stores its d_{l-1} x d_l
/// weight block row-major in (k, j), followed by its d_l biases.
struct NetworkShape {
    std::vector<std::size_t> sizes;
    Activation hidden = Activation::Tanh;
    Activation output = Activation::Identity;

    std::size_t num_layers() const { return sizes.size() - 1; }
    std::size_t num_inputs() const { return sizes.front(); }
    std::size_t num_outputs() const { return sizes.back(); }
    std::size_t num_params() const;
    void validate() const;

    /// d_in -> 3 -> 3 -> d_out with tanh hidden layers.
    static NetworkShape standard(std::size_t d_in, std::size_t d_out, Activation out);
};

struct ShapeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Evaluate the network. `params` points at S packed values.
std::vector<double> forward(const NetworkShape& shape, const double* params, const std::vector<double>& input);
std::vector<double> forward(const NetworkShape& shape, const std::vector<double>& params,
                            const std::vector<double>& input);

struct SoftmaxResult {
    std::vector<double> probs;
    std::size_t argmax;
};

struct NoValidAction : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Softmax over entries with valid[i] set; the rest get probability 0.
/// Ties in the argmax go to the lowest index.
SoftmaxResult softmax_over_valid(const std::vector<double>& logits, const std::vector<bool>& valid);

/// Index of the largest valid logit, lowest index on ties. Same choice as
/// softmax_over_valid(...).argmax without computing the probabilities.
std::size_t argmax_valid(const std::vector<double>& logits, const std::vector<bool>& valid);

struct LabeledSet {
    std::vector<std::vector<double>> x;
    std::vector<std::size_t> label;
    std::size_t size() const { return x.size(); }
};

/// Floor applied to predicted probabilities before taking logs.
inline constexpr double kLogProbFloor = 1e-300;

/// -sum_i log a_{y_i}(i), with a softmax output head.
double cross_entropy(const NetworkShape& shape, const std::vector<double>& params, const LabeledSet& data);

/// Gradient of cross_entropy + ||theta||^2 / (2 sigma2) by backpropagation.
std::vector<double> grad_cross_entropy_l2(const NetworkShape& shape, const std::vector<double>& params,
                                          const LabeledSet& data, double sigma2);

/// Fraction of rows whose argmax output matches the label.
double accuracy(const NetworkShape& shape, const std::vector<double>& params, const LabeledSet& data);

}  // namespace sopt
