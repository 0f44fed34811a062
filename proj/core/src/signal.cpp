#include "ipmc/signal.hpp"

#include <cmath>

#include "ipmc/error.hpp"

namespace ipmc {

Signal::Signal(std::vector<double> samples, double sample_rate, std::string label, double start_time)
    : samples_(std::move(samples)), sample_rate_(sample_rate), label_(std::move(label)), start_time_(start_time) {
    if (!(sample_rate_ > 0.0) || !std::isfinite(sample_rate_)) {
        throw_domain("signal sample_rate must be positive and finite");
    }
    if (!std::isfinite(start_time_)) {
        throw_domain("signal start_time must be finite");
    }
    for (std::size_t i = 0; i < samples_.size(); ++i) {
        if (!std::isfinite(samples_[i])) {
            throw_data("signal '" + label_ + "' has a non-finite sample at index " + std::to_string(i));
        }
    }
}

Signal Signal::with_label(std::string label) const {
    Signal copy = *this;
    copy.label_ = std::move(label);
    return copy;
}

} // namespace ipmc
