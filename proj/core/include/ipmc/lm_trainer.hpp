#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "ipmc/dataset.hpp"
#include "ipmc/mlp.hpp"

namespace ipmc {

struct LmConfig {
    double mu0 = 1e-3;
    double mu_increase = 10.0;
    double mu_decrease = 0.1;
    double mu_max = 1e10;
    std::size_t max_epochs = 300;
    double min_gradient = 1e-7;
    std::size_t patience = 6;
    std::uint64_t seed = 0;

    void validate() const;
};

enum class StopReason { MaxEpochs, MuMax, MinGradient, ValidationStop };

[[nodiscard]] std::string to_string(StopReason r);

struct EpochRecord {
    std::size_t epoch = 0;
    double train_sse = 0.0;
    double validation_sse = 0.0;
    double mu = 0.0;
    double gradient_norm = 0.0; // infinity norm of J^T r at the start of the epoch
    std::size_t rejected_trials = 0;
};

struct TrainingReport {
    std::vector<EpochRecord> epochs; // epochs[0] is the initial state
    StopReason stop_reason = StopReason::MaxEpochs;
    std::size_t accepted_steps = 0;
    std::size_t best_epoch = 0;
    double best_validation_sse = 0.0;
    std::size_t train_rows = 0;
    std::size_t validation_rows = 0;
};

struct TrainResult {
    MlpModel model;
    TrainingReport report;
};

/// Full-batch Levenberg-Marquardt on the training rows of `d`.
///
/// Each epoch solves (J^T J + mu I) delta = J^T r by Cholesky and moves the
/// parameters to theta - delta if that lowers the training SSE; otherwise mu
/// grows and the epoch retries. Errors are measured in the model's
/// normalized output space, and the model's normalizers are left untouched
/// (see `fit_normalization`). The parameters with the lowest validation
/// SSE are returned.
///
/// Training rows are put into lexicographic order before any sums are
/// formed, so the result does not depend on row order.
[[nodiscard]] TrainResult train_lm(const MlpModel& initial, const WindowedDataset& d, const LmConfig& cfg);

} // namespace ipmc
