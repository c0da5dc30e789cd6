#include "hfc/mlp.hpp"

#include <cmath>
#include <random>

namespace hfc {

namespace {

struct Forward {
    Matrix pre;     // x W1 + b1
    Matrix hidden;  // act(pre)
    Matrix out;
};

Forward forward(const MlpModel& m, const Matrix& x) {
    Forward f;
    f.pre = (x * m.w1).rowwise() + m.b1.transpose();
    if (m.params.activation == Activation::sigmoid) {
        f.hidden = (1.0 / (1.0 + (-f.pre.array()).exp())).matrix();
    } else {
        f.hidden = f.pre;
    }
    f.out = (f.hidden * m.w2).rowwise() + m.b2.transpose();
    return f;
}

}  // namespace

Matrix MlpModel::predict(const Matrix& x) const {
    if (x.cols() != w1.rows()) throw InvalidInput("mlp: expected " + std::to_string(w1.rows()) + " features");
    return forward(*this, x).out;
}

double mlp_loss(const MlpModel& model, const Matrix& x, const Matrix& y) {
    return (model.predict(x) - y).squaredNorm() / static_cast<double>(y.size());
}

MlpGradient mlp_gradient(const MlpModel& model, const Matrix& x, const Matrix& y) {
    const Forward f = forward(model, x);
    const Matrix diff = f.out - y;
    const double scale = 2.0 / static_cast<double>(y.size());
    const Matrix d_out = scale * diff;

    MlpGradient g;
    g.loss = diff.squaredNorm() / static_cast<double>(y.size());
    g.w2 = f.hidden.transpose() * d_out;
    g.b2 = d_out.colwise().sum().transpose();
    Matrix d_hidden = d_out * model.w2.transpose();
    if (model.params.activation == Activation::sigmoid) {
        d_hidden.array() *= f.hidden.array() * (1.0 - f.hidden.array());
    }
    g.w1 = x.transpose() * d_hidden;
    g.b1 = d_hidden.colwise().sum().transpose();
    return g;
}

MlpModel init_mlp(Eigen::Index inputs, Eigen::Index outputs, const MlpParams& params, std::uint64_t seed) {
    if (params.hidden < 1) throw InvalidInput("mlp: hidden size must be >= 1");
    std::mt19937_64 rng(seed);
    auto fill = [&](Eigen::Index rows, Eigen::Index cols, Eigen::Index fan_in) {
        const double s = params.init_scale / std::sqrt(static_cast<double>(std::max<Eigen::Index>(1, fan_in)));
        Matrix m(rows, cols);
        if (s == 0.0) return Matrix(Matrix::Zero(rows, cols));
        std::uniform_real_distribution<double> u(-s, s);
        for (Eigen::Index j = 0; j < cols; ++j) {
            for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = u(rng);
        }
        return m;
    };
    MlpModel m;
    m.params = params;
    m.w1 = fill(inputs, params.hidden, inputs);
    m.b1 = fill(params.hidden, 1, inputs).col(0);
    m.w2 = fill(params.hidden, outputs, params.hidden);
    m.b2 = fill(outputs, 1, params.hidden).col(0);
    return m;
}

MlpModel train_mlp(const Matrix& x, const Matrix& y, const MlpParams& params, std::uint64_t seed) {
    if (x.rows() != y.rows() || x.rows() == 0) throw InvalidInput("mlp: feature and target rows differ or are empty");
    if (params.epochs < 0 || params.learning_rate < 0.0 || params.decay < 0.0) {
        throw InvalidInput("mlp: epochs, learning rate and decay must be non-negative");
    }
    double rate = params.learning_rate;
    for (int attempt = 0; attempt <= 5; ++attempt) {
        MlpModel m = init_mlp(x.cols(), y.cols(), params, seed);
        bool diverged = false;
        for (int epoch = 0; epoch < params.epochs; ++epoch) {
            MlpGradient g = mlp_gradient(m, x, y);
            if (!std::isfinite(g.loss)) {
                diverged = true;
                break;
            }
            const double step = rate / (1.0 + params.decay * epoch);
            m.w1 -= step * g.w1;
            m.b1 -= step * g.b1;
            m.w2 -= step * g.w2;
            m.b2 -= step * g.b2;
        }
        if (!diverged && std::isfinite(mlp_loss(m, x, y))) {
            m.params.learning_rate = rate;
            return m;
        }
        rate /= 2.0;
    }
    throw ConvergenceError("mlp: loss diverged after 5 learning-rate halvings");
}

}  // namespace hfc
