#include "ipmc/stimulus.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <numbers>

#include "ipmc/error.hpp"

namespace ipmc {

std::string_view to_string(StimulusKind kind) noexcept {
    switch (kind) {
    case StimulusKind::Prbs:
        return "prbs";
    case StimulusKind::Sine:
        return "sine";
    case StimulusKind::Chirp:
        return "chirp";
    case StimulusKind::Pulse:
        return "pulse";
    }
    return "unknown";
}

StimulusKind stimulus_kind_from_string(std::string_view name) {
    if (name == "prbs") return StimulusKind::Prbs;
    if (name == "sine") return StimulusKind::Sine;
    if (name == "chirp") return StimulusKind::Chirp;
    if (name == "pulse") return StimulusKind::Pulse;
    throw_domain("unknown stimulus kind '" + std::string(name) + "'");
}

std::string StimulusSpec::display_name() const { return name.empty() ? std::string(to_string(kind)) : name; }

void StimulusSpec::validate() const {
    const auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
    if (!positive(duration)) throw_domain("stimulus duration must be positive");
    if (!positive(sample_rate)) throw_domain("stimulus sample_rate must be positive");
    if (!positive(amplitude)) throw_domain("stimulus amplitude must be positive");
    switch (kind) {
    case StimulusKind::Sine:
        if (!(frequency >= 0.0) || !std::isfinite(frequency)) throw_domain("sine frequency must be non-negative");
        break;
    case StimulusKind::Chirp:
        if (!(f0 >= 0.0 && f1 >= 0.0) || !std::isfinite(f0) || !std::isfinite(f1)) {
            throw_domain("chirp frequencies must be non-negative");
        }
        break;
    case StimulusKind::Pulse:
        if (!positive(period)) throw_domain("pulse period must be positive");
        if (!(duty > 0.0 && duty < 1.0)) throw_domain("pulse duty must lie in (0, 1)");
        break;
    case StimulusKind::Prbs:
        if (!positive(bit_duration)) throw_domain("prbs bit_duration must be positive");
        if (lfsr_order < Lfsr::kMinOrder || lfsr_order > Lfsr::kMaxOrder) {
            throw_domain("prbs lfsr_order must lie in [2, 32]");
        }
        if (seed == 0) throw_domain("prbs seed must be nonzero");
        break;
    }
}

StimulusSpec StimulusSpec::defaults(StimulusKind kind) {
    StimulusSpec s;
    s.kind = kind;
    return s;
}

const std::vector<int>& Lfsr::taps(int order) {
    // Maximal-length feedback taps (XAPP052 table).
    static const std::array<std::vector<int>, kMaxOrder + 1> table = {{
        {}, {}, {2, 1}, {3, 2}, {4, 3}, {5, 3}, {6, 5}, {7, 6}, {8, 6, 5, 4}, {9, 5}, {10, 7}, {11, 9},
        {12, 6, 4, 1}, {13, 4, 3, 1}, {14, 5, 3, 1}, {15, 14}, {16, 15, 13, 4}, {17, 14}, {18, 11},
        {19, 6, 2, 1}, {20, 17}, {21, 19}, {22, 21}, {23, 18}, {24, 23, 22, 17}, {25, 22}, {26, 6, 2, 1},
        {27, 5, 2, 1}, {28, 25}, {29, 27}, {30, 6, 4, 1}, {31, 28}, {32, 22, 2, 1},
    }};
    if (order < kMinOrder || order > kMaxOrder) {
        throw_domain("LFSR order must lie in [2, 32]");
    }
    return table[static_cast<std::size_t>(order)];
}

Lfsr::Lfsr(int order, std::uint64_t seed) : order_(order), state_(0), mask_(0), tap_mask_(0) {
    const auto& t = taps(order);
    mask_ = (std::uint64_t{1} << order) - 1;
    state_ = seed & mask_;
    if (state_ == 0) {
        throw_domain("LFSR seed must have a nonzero low " + std::to_string(order) + " bits");
    }
    for (int tap : t) {
        tap_mask_ |= std::uint64_t{1} << (order - tap);
    }
}

bool Lfsr::next() {
    const bool out = (state_ & 1U) != 0;
    const auto feedback = static_cast<std::uint64_t>(std::popcount(state_ & tap_mask_) & 1);
    state_ = (state_ >> 1) | (feedback << (order_ - 1));
    return out;
}

Signal generate_stimulus(const StimulusSpec& spec) {
    spec.validate();
    const auto n = static_cast<std::size_t>(std::floor(spec.duration * spec.sample_rate));
    std::vector<double> x(n);
    const double two_pi = 2.0 * std::numbers::pi;
    const double A = spec.amplitude;

    switch (spec.kind) {
    case StimulusKind::Sine:
        for (std::size_t i = 0; i < n; ++i) {
            const double t = static_cast<double>(i) / spec.sample_rate;
            x[i] = A * std::sin(two_pi * spec.frequency * t);
        }
        break;
    case StimulusKind::Chirp: {
        const double sweep = (spec.f1 - spec.f0) / (2.0 * spec.duration);
        for (std::size_t i = 0; i < n; ++i) {
            const double t = static_cast<double>(i) / spec.sample_rate;
            x[i] = A * std::sin(two_pi * (spec.f0 * t + sweep * t * t));
        }
        break;
    }
    case StimulusKind::Pulse:
        for (std::size_t i = 0; i < n; ++i) {
            const double t = static_cast<double>(i) / spec.sample_rate;
            const double phase = std::fmod(t, spec.period) / spec.period;
            x[i] = phase < spec.duty ? A : 0.0;
        }
        break;
    case StimulusKind::Prbs: {
        Lfsr lfsr(spec.lfsr_order, spec.seed);
        bool bit = lfsr.next();
        std::size_t bit_index = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double t = static_cast<double>(i) / spec.sample_rate;
            const auto wanted = static_cast<std::size_t>(std::floor(t / spec.bit_duration));
            while (bit_index < wanted) {
                bit = lfsr.next();
                ++bit_index;
            }
            x[i] = bit ? A : -A;
        }
        break;
    }
    }
    return Signal(std::move(x), spec.sample_rate, spec.display_name());
}

} // namespace ipmc
