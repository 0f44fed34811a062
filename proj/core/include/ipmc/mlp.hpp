#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "ipmc/dataset.hpp"
#include "ipmc/signal.hpp"

namespace ipmc {

enum class Activation { Tanh, Logistic, Linear };

[[nodiscard]] std::string_view to_string(Activation a) noexcept;
[[nodiscard]] Activation activation_from_string(std::string_view name);

/// Per-feature affine map z = (x - offset) * scale.
struct AffineNormalizer {
    Eigen::VectorXd offset;
    Eigen::VectorXd scale;

    static AffineNormalizer identity(Eigen::Index features);

    /// Min-max fit mapping each column's [min, max] onto [-1, 1]. Constant
    /// columns get a unit scale so they map to zero.
    static AffineNormalizer fit(const Eigen::MatrixXd& rows);

    [[nodiscard]] Eigen::Index features() const noexcept { return offset.size(); }
    [[nodiscard]] double normalize(double x, Eigen::Index feature = 0) const {
        return (x - offset(feature)) * scale(feature);
    }
    [[nodiscard]] double denormalize(double z, Eigen::Index feature = 0) const {
        return z / scale(feature) + offset(feature);
    }
};

struct DenseLayer {
    Eigen::MatrixXd weights; // out x in
    Eigen::VectorXd biases;  // out
};

/// Fully connected regression network with a linear output unit.
///
/// Parameters are ordered layer by layer; within a layer the weight matrix
/// comes first in row-major order, followed by the biases. `parameters()`,
/// `set_parameters()`, `jacobian()` and the JSON form all use this order.
struct MlpModel {
    std::vector<DenseLayer> layers;
    Activation hidden_activation = Activation::Tanh;
    AffineNormalizer input_norm;
    AffineNormalizer output_norm; // one feature

    [[nodiscard]] std::vector<std::size_t> layer_sizes() const;
    [[nodiscard]] std::size_t input_size() const;
    [[nodiscard]] std::size_t parameter_count() const;
    [[nodiscard]] Eigen::VectorXd parameters() const;
    void set_parameters(const Eigen::VectorXd& theta);

    /// Throws if shapes are inconsistent or any value is non-finite.
    void validate() const;
};

/// The default architecture: tau inputs, 11 hidden layers of 10, one output.
[[nodiscard]] std::vector<std::size_t> default_layer_sizes(std::size_t tau);

/// Glorot-uniform weights, zero biases, identity normalization.
[[nodiscard]] MlpModel init_model(const std::vector<std::size_t>& layer_sizes, Activation hidden, std::uint64_t seed);

/// Fits input and output normalizers on the training rows of `d`.
void fit_normalization(MlpModel& model, const WindowedDataset& d);

[[nodiscard]] double forward(const MlpModel& model, std::span<const double> window);

/// Denormalized predictions for each row of `rows` (n x input_size).
[[nodiscard]] Eigen::VectorXd forward_batch(const MlpModel& model, const Eigen::MatrixXd& rows);

/// Network output before output denormalization.
[[nodiscard]] Eigen::VectorXd forward_normalized(const MlpModel& model, const Eigen::MatrixXd& rows);

/// d(residual_i)/d(param_p) with residual_i = normalize(target_i) - forward_normalized(row_i),
/// by reverse-mode differentiation per sample. Shape n_rows x parameter_count.
[[nodiscard]] Eigen::MatrixXd jacobian(const MlpModel& model, const Eigen::MatrixXd& rows);

/// Predictions for every full window of `input`; the result starts at the
/// first window's end and is tau - 1 samples shorter (stride 1).
[[nodiscard]] Signal predict_series(const MlpModel& model, const Signal& input, const WindowConfig& cfg);

} // namespace ipmc
