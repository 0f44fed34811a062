#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace ipmc {

/// Uniformly sampled, real-valued time series.
///
/// Sample i sits at time `start_time() + i / sample_rate()`. Construction
/// rejects a non-positive rate and non-finite samples, so every Signal in
/// circulation is valid.
class Signal {
public:
    Signal(std::vector<double> samples, double sample_rate, std::string label = {}, double start_time = 0.0);

    [[nodiscard]] std::span<const double> samples() const noexcept { return samples_; }
    [[nodiscard]] const std::vector<double>& values() const noexcept { return samples_; }
    [[nodiscard]] double sample_rate() const noexcept { return sample_rate_; }
    [[nodiscard]] double start_time() const noexcept { return start_time_; }
    [[nodiscard]] const std::string& label() const noexcept { return label_; }
    [[nodiscard]] std::size_t size() const noexcept { return samples_.size(); }
    [[nodiscard]] bool empty() const noexcept { return samples_.empty(); }
    [[nodiscard]] double operator[](std::size_t i) const { return samples_[i]; }
    [[nodiscard]] double time(std::size_t i) const noexcept {
        return start_time_ + static_cast<double>(i) / sample_rate_;
    }

    [[nodiscard]] Signal with_label(std::string label) const;

private:
    std::vector<double> samples_;
    double sample_rate_;
    std::string label_;
    double start_time_;
};

} // namespace ipmc
