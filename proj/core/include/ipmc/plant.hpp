#pragma once

#include <cstdint>
#include <filesystem>

#include "ipmc/circuit.hpp"
#include "ipmc/signal.hpp"

namespace ipmc {

/// Synthetic actuator used as ground truth: the reference cascade, then a
/// static cubic, then a first-order low-pass, then Gaussian output noise.
struct PlantSpec {
    /// The "true" circuit. Its clamp capacitance is slower than the circuit
    /// default so that the stimulus-to-displacement lag outlasts a 2 s window.
    PhysicalParams reference = slow_reference();
    std::size_t stages = 45;
    double a1 = 1.0;            // mm / V
    double a3 = -0.15;          // mm / V^3
    double filter_pole = 3.0;   // rad/s
    double noise_std = 0.005;   // fraction of the clean output range
    std::uint64_t seed = 1;
    int oversample = kDefaultOversample;

    void validate() const;

    static PhysicalParams slow_reference() {
        PhysicalParams p;
        p.C_clamp = 0.2;
        return p;
    }
};

/// Displacement for stimulus `v_i`. Deterministic for a fixed seed.
[[nodiscard]] Signal plant_response(const PlantSpec& spec, const Signal& v_i);

struct Recording {
    Signal v_in;
    Signal displacement;
};

/// Reads a `time_s,v_in,displacement` file. A `sample_rate_hz=<rate>` token
/// in a '#' comment line fixes the rate; otherwise it is inferred.
[[nodiscard]] Recording ingest_recording(const std::filesystem::path& path);

/// Writes the format `ingest_recording` reads, including the units comment.
void write_recording(const std::filesystem::path& path, const Signal& v_in, const Signal& displacement);

} // namespace ipmc
