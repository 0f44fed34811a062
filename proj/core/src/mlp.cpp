#include "ipmc/mlp.hpp"

#include <cmath>
#include <random>
#include <string>

#include "ipmc/error.hpp"

namespace ipmc {

std::string_view to_string(Activation a) noexcept {
    switch (a) {
    case Activation::Tanh:
        return "tanh";
    case Activation::Logistic:
        return "logistic";
    case Activation::Linear:
        return "linear";
    }
    return "unknown";
}

Activation activation_from_string(std::string_view name) {
    if (name == "tanh") return Activation::Tanh;
    if (name == "logistic") return Activation::Logistic;
    if (name == "linear") return Activation::Linear;
    throw_domain("unknown activation '" + std::string(name) + "'");
}

AffineNormalizer AffineNormalizer::identity(Eigen::Index features) {
    return {Eigen::VectorXd::Zero(features), Eigen::VectorXd::Ones(features)};
}

AffineNormalizer AffineNormalizer::fit(const Eigen::MatrixXd& rows) {
    if (rows.rows() == 0) throw_data("cannot fit a normalizer on zero rows");
    AffineNormalizer n = identity(rows.cols());
    for (Eigen::Index j = 0; j < rows.cols(); ++j) {
        const double lo = rows.col(j).minCoeff();
        const double hi = rows.col(j).maxCoeff();
        n.offset(j) = 0.5 * (lo + hi);
        n.scale(j) = hi > lo ? 2.0 / (hi - lo) : 1.0;
    }
    return n;
}

std::vector<std::size_t> MlpModel::layer_sizes() const {
    std::vector<std::size_t> sizes;
    if (layers.empty()) return sizes;
    sizes.push_back(static_cast<std::size_t>(layers.front().weights.cols()));
    for (const auto& l : layers) sizes.push_back(static_cast<std::size_t>(l.weights.rows()));
    return sizes;
}

std::size_t MlpModel::input_size() const {
    return layers.empty() ? 0 : static_cast<std::size_t>(layers.front().weights.cols());
}

std::size_t MlpModel::parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += static_cast<std::size_t>(l.weights.size() + l.biases.size());
    return n;
}

Eigen::VectorXd MlpModel::parameters() const {
    Eigen::VectorXd theta(static_cast<Eigen::Index>(parameter_count()));
    Eigen::Index at = 0;
    for (const auto& l : layers) {
        for (Eigen::Index o = 0; o < l.weights.rows(); ++o) {
            for (Eigen::Index i = 0; i < l.weights.cols(); ++i) theta(at++) = l.weights(o, i);
        }
        for (Eigen::Index o = 0; o < l.biases.size(); ++o) theta(at++) = l.biases(o);
    }
    return theta;
}

void MlpModel::set_parameters(const Eigen::VectorXd& theta) {
    if (theta.size() != static_cast<Eigen::Index>(parameter_count())) {
        throw_domain("parameter vector has the wrong length");
    }
    Eigen::Index at = 0;
    for (auto& l : layers) {
        for (Eigen::Index o = 0; o < l.weights.rows(); ++o) {
            for (Eigen::Index i = 0; i < l.weights.cols(); ++i) l.weights(o, i) = theta(at++);
        }
        for (Eigen::Index o = 0; o < l.biases.size(); ++o) l.biases(o) = theta(at++);
    }
}

void MlpModel::validate() const {
    if (layers.empty()) throw_domain("model has no layers");
    for (std::size_t k = 0; k < layers.size(); ++k) {
        const auto& l = layers[k];
        if (l.weights.rows() != l.biases.size()) throw_domain("layer bias length does not match its weights");
        if (k > 0 && l.weights.cols() != layers[k - 1].weights.rows()) {
            throw_domain("layer " + std::to_string(k) + " input width does not match the previous layer");
        }
        if (!l.weights.allFinite() || !l.biases.allFinite()) throw_domain("model has non-finite parameters");
    }
    if (layers.back().weights.rows() != 1) throw_domain("model must have a single output");
    if (input_norm.features() != layers.front().weights.cols()) {
        throw_domain("input normalizer width does not match the input layer");
    }
    if (output_norm.features() != 1) throw_domain("output normalizer must have one feature");
}

std::vector<std::size_t> default_layer_sizes(std::size_t tau) {
    std::vector<std::size_t> sizes{tau};
    sizes.insert(sizes.end(), 11, 10);
    sizes.push_back(1);
    return sizes;
}

MlpModel init_model(const std::vector<std::size_t>& layer_sizes, Activation hidden, std::uint64_t seed) {
    if (layer_sizes.size() < 2) throw_domain("a model needs at least an input and an output size");
    for (auto s : layer_sizes) {
        if (s == 0) throw_domain("layer sizes must be positive");
    }
    if (layer_sizes.back() != 1) throw_domain("the output layer must have exactly one unit");

    std::mt19937_64 rng(seed);
    MlpModel m;
    m.hidden_activation = hidden;
    for (std::size_t k = 0; k + 1 < layer_sizes.size(); ++k) {
        const auto fan_in = static_cast<Eigen::Index>(layer_sizes[k]);
        const auto fan_out = static_cast<Eigen::Index>(layer_sizes[k + 1]);
        const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        std::uniform_real_distribution<double> dist(-limit, limit);
        DenseLayer l{Eigen::MatrixXd(fan_out, fan_in), Eigen::VectorXd::Zero(fan_out)};
        for (Eigen::Index o = 0; o < fan_out; ++o) {
            for (Eigen::Index i = 0; i < fan_in; ++i) l.weights(o, i) = dist(rng);
        }
        m.layers.push_back(std::move(l));
    }
    m.input_norm = AffineNormalizer::identity(static_cast<Eigen::Index>(layer_sizes.front()));
    m.output_norm = AffineNormalizer::identity(1);
    return m;
}

void fit_normalization(MlpModel& model, const WindowedDataset& d) {
    const auto train = d.subset(d.rows_in(Split::Train));
    if (train.rows() == 0) throw_domain("cannot fit normalization without training rows");
    model.input_norm = AffineNormalizer::fit(train.inputs);
    model.output_norm = AffineNormalizer::fit(train.targets);
}

namespace {

void apply_activation(Activation a, Eigen::MatrixXd& z) {
    switch (a) {
    case Activation::Tanh:
        z = z.array().tanh().matrix();
        break;
    case Activation::Logistic:
        z = (1.0 / (1.0 + (-z.array()).exp())).matrix();
        break;
    case Activation::Linear:
        break;
    }
}

// Derivative of the activation expressed through its output value.
Eigen::ArrayXXd activation_slope(Activation a, const Eigen::MatrixXd& out) {
    switch (a) {
    case Activation::Tanh:
        return 1.0 - out.array().square();
    case Activation::Logistic:
        return out.array() * (1.0 - out.array());
    case Activation::Linear:
        break;
    }
    return Eigen::ArrayXXd::Ones(out.rows(), out.cols());
}

// Normalized inputs laid out one sample per column.
Eigen::MatrixXd normalized_columns(const MlpModel& m, const Eigen::MatrixXd& rows) {
    if (static_cast<std::size_t>(rows.cols()) != m.input_size()) {
        throw_data("window width " + std::to_string(rows.cols()) + " does not match model input " +
                   std::to_string(m.input_size()));
    }
    if (!rows.allFinite()) throw_data("model input contains non-finite values");
    Eigen::MatrixXd a = rows.transpose();
    a.colwise() -= m.input_norm.offset;
    a.array().colwise() *= m.input_norm.scale.array();
    return a;
}

// Activations of every layer, input first.
std::vector<Eigen::MatrixXd> forward_trace(const MlpModel& m, const Eigen::MatrixXd& rows) {
    std::vector<Eigen::MatrixXd> acts;
    acts.reserve(m.layers.size() + 1);
    acts.push_back(normalized_columns(m, rows));
    for (std::size_t k = 0; k < m.layers.size(); ++k) {
        const auto& l = m.layers[k];
        Eigen::MatrixXd z = l.weights * acts.back();
        z.colwise() += l.biases;
        if (k + 1 < m.layers.size()) apply_activation(m.hidden_activation, z);
        acts.push_back(std::move(z));
    }
    return acts;
}

} // namespace

Eigen::VectorXd forward_normalized(const MlpModel& model, const Eigen::MatrixXd& rows) {
    return forward_trace(model, rows).back().row(0).transpose();
}

Eigen::VectorXd forward_batch(const MlpModel& model, const Eigen::MatrixXd& rows) {
    Eigen::VectorXd z = forward_normalized(model, rows);
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = model.output_norm.denormalize(z(i));
    return z;
}

double forward(const MlpModel& model, std::span<const double> window) {
    const Eigen::Map<const Eigen::RowVectorXd> row(window.data(), static_cast<Eigen::Index>(window.size()));
    return forward_batch(model, Eigen::MatrixXd(row))(0);
}

Eigen::MatrixXd jacobian(const MlpModel& model, const Eigen::MatrixXd& rows) {
    const auto acts = forward_trace(model, rows);
    const Eigen::Index n = rows.rows();
    Eigen::MatrixXd J(n, static_cast<Eigen::Index>(model.parameter_count()));

    std::vector<Eigen::Index> offsets;
    Eigen::Index at = 0;
    for (const auto& l : model.layers) {
        offsets.push_back(at);
        at += l.weights.size() + l.biases.size();
    }

    // Sensitivity of each residual to the pre-activation of layer k (units x n).
    Eigen::MatrixXd delta = Eigen::MatrixXd::Constant(1, n, -1.0);
    for (std::size_t k = model.layers.size(); k-- > 0;) {
        const auto& l = model.layers[k];
        const Eigen::MatrixXd& prev = acts[k];
        const Eigen::Index n_out = l.weights.rows();
        const Eigen::Index n_in = l.weights.cols();
        const Eigen::Index base = offsets[k];
        for (Eigen::Index j = 0; j < n; ++j) {
            for (Eigen::Index o = 0; o < n_out; ++o) {
                const double d = delta(o, j);
                for (Eigen::Index i = 0; i < n_in; ++i) J(j, base + o * n_in + i) = d * prev(i, j);
            }
            for (Eigen::Index o = 0; o < n_out; ++o) J(j, base + n_out * n_in + o) = delta(o, j);
        }
        if (k > 0) {
            Eigen::MatrixXd back = l.weights.transpose() * delta;
            back.array() *= activation_slope(model.hidden_activation, prev);
            delta = std::move(back);
        }
    }
    return J;
}

Signal predict_series(const MlpModel& model, const Signal& input, const WindowConfig& cfg) {
    const WindowedDataset d = frame_inputs(input, cfg);
    const Eigen::VectorXd y = forward_batch(model, d.inputs);
    std::vector<double> out(y.data(), y.data() + y.size());
    const double start = input.time(cfg.tau - 1);
    return Signal(std::move(out), input.sample_rate() / static_cast<double>(cfg.stride), "prediction", start);
}

} // namespace ipmc
