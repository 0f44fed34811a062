#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ipmc/signal.hpp"

namespace ipmc {

/// Geometry and material constants of the actuator strip (SI units).
///
/// `sigma_M` is the membrane conductivity; its reciprocal is used as the
/// membrane resistivity. The interface ratios and attenuation coefficients
/// are not measurable directly and normally come from `estimate_params`.
struct PhysicalParams {
    double L = 22e-3;        // length (m)
    double W = 5.5e-3;       // width (m)
    double h_E = 1e-6;       // electrode thickness (m)
    double rho_E = 1.06e-7;  // electrode resistivity (ohm m)
    double h_M = 183e-6;     // membrane thickness (m)
    double sigma_M = 10.26;  // membrane conductivity
    double xi_rho = 100.0;   // interface/metal resistivity ratio
    double xi_h = 10.0;      // interface/metal thickness ratio
    double C_clamp = 5e-3;   // interface capacitance at the clamp (F)
    double alpha_E = 0.5;    // electrode attenuation, (0, 1]
    double alpha_I = 0.5;    // interface attenuation, (0, 1]
    double alpha_C = 0.5;    // capacitance attenuation, (0, 1]

    /// Throws a domain error naming the first field that violates its range.
    void validate() const;

    friend bool operator==(const PhysicalParams&, const PhysicalParams&) = default;
};

/// Electrical values at the clamped end of the strip.
struct ClampValues {
    double RE_clamp = 0.0;
    double RI_clamp = 0.0;
    double RM = 0.0;
    double C_clamp = 0.0;
};

/// Element values of one compartment.
struct CompartmentValues {
    double RE = 0.0;
    double RI = 0.0;
    double C = 0.0;
    double RM = 0.0;
};

/// One compartment's transfer function G (s + Z) / (s + P).
struct StageTF {
    double G = 1.0; // dimensionless gain, (0, 1]
    double Z = 1.0; // zero (rad/s)
    double P = 1.0; // pole (rad/s)

    [[nodiscard]] double dc_gain() const noexcept { return G * Z / P; }
    friend bool operator==(const StageTF&, const StageTF&) = default;
};

/// Stages ordered clamp to tip (compartment k = 1..N at index k - 1).
struct CascadeModel {
    std::vector<StageTF> stages;

    [[nodiscard]] std::size_t size() const noexcept { return stages.size(); }
    friend bool operator==(const CascadeModel&, const CascadeModel&) = default;
};

/// Partial-fraction form of a stage: h(t) = direct_gain * delta(t) + exp_coefficient * exp(-exp_rate * t).
struct StageImpulseResponse {
    double direct_gain = 0.0;
    double exp_coefficient = 0.0;
    double exp_rate = 0.0;

    /// Value of the smooth part at t >= 0 (the delta term is excluded).
    [[nodiscard]] double smooth_part(double t) const;
};

/// First-order section d + r / (s + p) with p > 0. Every stage is one of
/// these; so is a plain low-pass p / (s + p) with d = 0.
struct FirstOrderSection {
    double direct = 0.0;
    double residue = 0.0;
    double pole = 1.0;

    static FirstOrderSection from_stage(const StageTF& stage);
    static FirstOrderSection low_pass(double pole);
};

[[nodiscard]] ClampValues derive_clamp_values(const PhysicalParams& p);

/// Values of compartment k (1-based) of N, interpolated linearly from the
/// clamp values to the tip values X_clamp / alpha.
[[nodiscard]] CompartmentValues compartment_params(const ClampValues& clamp, double alpha_E, double alpha_I,
                                                   double alpha_C, std::size_t k, std::size_t N);

[[nodiscard]] StageTF stage_tf(double RE, double RI, double C, double RM);
[[nodiscard]] inline StageTF stage_tf(const CompartmentValues& v) { return stage_tf(v.RE, v.RI, v.C, v.RM); }

[[nodiscard]] CascadeModel build_cascade(const PhysicalParams& p, std::size_t N);

[[nodiscard]] StageImpulseResponse stage_impulse_response(const StageTF& stage);

/// Product of the per-stage DC gains G Z / P.
[[nodiscard]] double dc_gain(const CascadeModel& model);

inline constexpr int kDefaultOversample = 16;

/// Time-domain response of a chain of first-order sections to a
/// zero-order-held input, starting at rest.
///
/// Each section is integrated with the trapezoidal rule (the bilinear
/// transform of its transfer function) on a grid `oversample` times finer
/// than the input. Section inputs enter the update as their exact mean over
/// each internal step, and output sample i is the right-hand limit y(t_i+).
/// The result is second-order accurate across the input's hold steps and
/// has the exact DC gain.
[[nodiscard]] Signal simulate_sections(std::span<const FirstOrderSection> sections, const Signal& input,
                                       int oversample = kDefaultOversample);

/// V_o for stimulus `v_in` through the cascade. Same length and rate as `v_in`.
[[nodiscard]] Signal simulate_cascade(const CascadeModel& model, const Signal& v_in,
                                      int oversample = kDefaultOversample);

} // namespace ipmc
