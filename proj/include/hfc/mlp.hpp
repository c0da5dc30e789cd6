#pragma once

#include "hfc/common.hpp"

#include <cstdint>

namespace hfc {

enum class Activation { linear, sigmoid };

struct MlpParams {
    int hidden = 11;
    Activation activation = Activation::linear;
    double learning_rate = 0.5;
    double decay = 0.0;       // step size at epoch e is learning_rate / (1 + decay * e)
    int epochs = 1000;
    double init_scale = 0.5;  // weights ~ U(-s, s) with s = init_scale / sqrt(fan_in)
};

/// One hidden layer, linear output layer: yhat = act(x W1 + b1) W2 + b2.
struct MlpModel {
    MlpParams params;
    Matrix w1;  // d x hidden
    Vector b1;  // hidden
    Matrix w2;  // hidden x c
    Vector b2;  // c

    Matrix predict(const Matrix& x) const;
};

struct MlpGradient {
    Matrix w1;
    Vector b1;
    Matrix w2;
    Vector b2;
    double loss = 0.0;
};

/// Mean squared error over all rows and outputs.
double mlp_loss(const MlpModel& model, const Matrix& x, const Matrix& y);
/// Back-propagated gradient of mlp_loss.
MlpGradient mlp_gradient(const MlpModel& model, const Matrix& x, const Matrix& y);

MlpModel init_mlp(Eigen::Index inputs, Eigen::Index outputs, const MlpParams& params, std::uint64_t seed);

/**
 * Full-batch gradient descent with learning-rate decay. A non-finite loss
 * halves the learning rate and restarts from a fresh initialization, at most
 * five times before throwing ConvergenceError.
 */
MlpModel train_mlp(const Matrix& x, const Matrix& y, const MlpParams& params, std::uint64_t seed);

}  // namespace hfc
