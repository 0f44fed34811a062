#pragma once

#include <cstddef>
#include <span>

#include "ipmc/signal.hpp"

namespace ipmc {

/// Both series are divided by max|w| (the target's peak magnitude) before
/// comparison, so amplitude errors in the prediction stay visible.
struct EvalReport {
    double nmse = 0.0;
    double fitting_percent = 0.0;
    std::size_t n_samples = 0;
    double normalizer = 1.0;
};

/// Mean squared error of the max|w|-normalized series.
[[nodiscard]] double nmse(std::span<const double> w, std::span<const double> w_hat);
[[nodiscard]] inline double nmse(const Signal& w, const Signal& w_hat) { return nmse(w.samples(), w_hat.samples()); }

/// 100 (1 - |w_n - w_hat_n| / |w_n - mean(w_n)|). 100 is a perfect fit,
/// 0 matches the mean predictor, and worse-than-mean fits go negative.
[[nodiscard]] double fitting(std::span<const double> w, std::span<const double> w_hat);
[[nodiscard]] inline double fitting(const Signal& w, const Signal& w_hat) {
    return fitting(w.samples(), w_hat.samples());
}

[[nodiscard]] EvalReport evaluate(std::span<const double> w, std::span<const double> w_hat);

} // namespace ipmc
