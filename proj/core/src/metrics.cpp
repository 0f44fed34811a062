#include "ipmc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ipmc/error.hpp"

namespace ipmc {

namespace {

double peak_magnitude(std::span<const double> w, std::span<const double> w_hat) {
    if (w.size() != w_hat.size()) {
        throw_data("target and prediction lengths differ (" + std::to_string(w.size()) + " vs " +
                   std::to_string(w_hat.size()) + ")");
    }
    if (w.empty()) throw_data("metrics need at least one sample");
    double peak = 0.0;
    for (double v : w) peak = std::max(peak, std::abs(v));
    if (peak == 0.0) throw_data("degenerate target: every sample is zero");
    return peak;
}

} // namespace

double nmse(std::span<const double> w, std::span<const double> w_hat) {
    const double peak = peak_magnitude(w, w_hat);
    double sum = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double d = w[i] / peak - w_hat[i] / peak;
        sum += d * d;
    }
    return sum / static_cast<double>(w.size());
}

double fitting(std::span<const double> w, std::span<const double> w_hat) {
    const double peak = peak_magnitude(w, w_hat);
    double mean = 0.0;
    for (double v : w) mean += v / peak;
    mean /= static_cast<double>(w.size());

    double residual = 0.0;
    double spread = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double wn = w[i] / peak;
        const double d = wn - w_hat[i] / peak;
        residual += d * d;
        spread += (wn - mean) * (wn - mean);
    }
    if (spread == 0.0) throw_data("degenerate target: constant series has no spread");
    return 100.0 * (1.0 - std::sqrt(residual) / std::sqrt(spread));
}

EvalReport evaluate(std::span<const double> w, std::span<const double> w_hat) {
    EvalReport r;
    r.nmse = nmse(w, w_hat);
    r.fitting_percent = fitting(w, w_hat);
    r.n_samples = w.size();
    r.normalizer = peak_magnitude(w, w_hat);
    return r;
}

} // namespace ipmc
