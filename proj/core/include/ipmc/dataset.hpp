#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "ipmc/signal.hpp"

namespace ipmc {

struct WindowConfig {
    std::size_t tau = 60;
    std::size_t stride = 1;

    void validate() const;
};

enum class Split : std::uint8_t { Train, Validation, Test };

[[nodiscard]] std::string_view to_string(Split split) noexcept;
[[nodiscard]] Split split_from_string(std::string_view name);

/// Fractions in the order the split is usually quoted: train, test, validation.
struct SplitRatios {
    double train = 0.3;
    double test = 0.5;
    double validation = 0.2;

    void validate() const;
};

/// Lag windows of an input signal paired with the target sample at each
/// window's last index.
///
/// Row i covers input indices [first_index(i), end_index(i)], and its target
/// is the target signal at end_index(i). Every row starts out tagged Train
/// until `split_dataset` assigns tags.
struct WindowedDataset {
    Eigen::MatrixXd inputs;             // n_windows x tau
    Eigen::VectorXd targets;            // n_windows
    std::vector<Split> split;           // n_windows
    std::vector<std::size_t> end_index; // sample index of each target
    double sample_rate = 1.0;
    double start_time = 0.0;
    std::string input_label;
    std::string target_label;

    [[nodiscard]] std::size_t rows() const noexcept { return static_cast<std::size_t>(targets.size()); }
    [[nodiscard]] std::size_t tau() const noexcept { return static_cast<std::size_t>(inputs.cols()); }
    [[nodiscard]] std::size_t count(Split which) const;
    [[nodiscard]] std::vector<std::size_t> rows_in(Split which) const;
    [[nodiscard]] double target_time(std::size_t row) const {
        return start_time + static_cast<double>(end_index[row]) / sample_rate;
    }

    /// Copy holding only the given rows, in the given order.
    [[nodiscard]] WindowedDataset subset(const std::vector<std::size_t>& rows) const;
};

/// Frames x into sliding windows; windows that would run past the end are
/// dropped and nothing is padded.
[[nodiscard]] WindowedDataset frame_windows(const Signal& x, const Signal& y, const WindowConfig& cfg);

/// Frames x alone (prediction time, no targets). Targets are left at zero.
[[nodiscard]] WindowedDataset frame_inputs(const Signal& x, const WindowConfig& cfg);

/// Random split with counts round(n * ratio) for test and validation and the
/// remainder in train. Reproducible for a given seed.
[[nodiscard]] WindowedDataset split_dataset(WindowedDataset d, const SplitRatios& ratios, std::uint64_t seed);

/// Copies split tags from one dataset onto another with the same row count.
[[nodiscard]] WindowedDataset with_split_of(WindowedDataset d, const WindowedDataset& tagged);

/// Concatenates datasets with matching tau (row order preserved).
[[nodiscard]] WindowedDataset concatenate(const std::vector<WindowedDataset>& parts);

struct AuditResult {
    bool passed = true;
    std::string message;
};

/// Non-autoregressive provenance check: every input row must be a verbatim
/// slice of `input` ending at the row's target index, targets must come from
/// `target`, and the input signal must not be the target signal.
[[nodiscard]] AuditResult audit_non_autoregressive(const WindowedDataset& d, const Signal& input, const Signal& target);

} // namespace ipmc
