#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ipmc/signal.hpp"

namespace ipmc {

enum class StimulusKind { Prbs, Sine, Chirp, Pulse };

[[nodiscard]] std::string_view to_string(StimulusKind kind) noexcept;
[[nodiscard]] StimulusKind stimulus_kind_from_string(std::string_view name);

/// Excitation description. Only the fields for `kind` are read.
struct StimulusSpec {
    StimulusKind kind = StimulusKind::Sine;
    std::string name;           // defaults to the kind name when empty
    double amplitude = 2.0;     // V
    double duration = 120.0;    // s
    double sample_rate = 30.0;  // Hz

    double frequency = 0.25;    // sine (Hz)
    double f0 = 0.05;           // chirp start (Hz)
    double f1 = 1.0;            // chirp end (Hz)
    double period = 8.0;        // pulse (s)
    double duty = 0.5;          // pulse on-fraction
    double bit_duration = 1.0;  // prbs (s)
    int lfsr_order = 9;         // prbs register length
    std::uint64_t seed = 1;     // prbs initial register state, nonzero

    [[nodiscard]] std::string display_name() const;
    void validate() const;

    /// Paper-protocol defaults for one of the four stimulus classes.
    static StimulusSpec defaults(StimulusKind kind);
};

/// Fibonacci linear-feedback shift register over a primitive polynomial, so
/// every nonzero seed cycles through all 2^order - 1 states.
class Lfsr {
public:
    static constexpr int kMinOrder = 2;
    static constexpr int kMaxOrder = 32;

    Lfsr(int order, std::uint64_t seed);

    /// Emits the low bit of the register, then shifts in the feedback bit.
    bool next();

    [[nodiscard]] std::uint64_t state() const noexcept { return state_; }
    [[nodiscard]] int order() const noexcept { return order_; }
    [[nodiscard]] std::uint64_t period() const noexcept { return (std::uint64_t{1} << order_) - 1; }

    /// Tap positions (1-based, highest first) of the feedback polynomial.
    [[nodiscard]] static const std::vector<int>& taps(int order);

private:
    int order_;
    std::uint64_t state_;
    std::uint64_t mask_;
    std::uint64_t tap_mask_;
};

[[nodiscard]] Signal generate_stimulus(const StimulusSpec& spec);

} // namespace ipmc
