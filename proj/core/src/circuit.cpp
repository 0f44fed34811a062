#include "ipmc/circuit.hpp"

#include <cmath>
#include <string>

#include "ipmc/error.hpp"

namespace ipmc {

namespace {

void require_positive(double value, const char* field) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw_domain(std::string("physical parameter '") + field + "' must be positive and finite, got " +
                     std::to_string(value));
    }
}

void require_attenuation(double alpha, const char* field) {
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw_domain(std::string("attenuation coefficient '") + field + "' must lie in (0, 1], got " +
                     std::to_string(alpha));
    }
}

} // namespace

void PhysicalParams::validate() const {
    require_positive(L, "L");
    require_positive(W, "W");
    require_positive(h_E, "h_E");
    require_positive(rho_E, "rho_E");
    require_positive(h_M, "h_M");
    require_positive(sigma_M, "sigma_M");
    require_positive(xi_rho, "xi_rho");
    require_positive(xi_h, "xi_h");
    require_positive(C_clamp, "C_clamp");
    require_attenuation(alpha_E, "alpha_E");
    require_attenuation(alpha_I, "alpha_I");
    require_attenuation(alpha_C, "alpha_C");
}

double StageImpulseResponse::smooth_part(double t) const { return exp_coefficient * std::exp(-exp_rate * t); }

FirstOrderSection FirstOrderSection::from_stage(const StageTF& stage) {
    return {stage.G, stage.G * (stage.Z - stage.P), stage.P};
}

FirstOrderSection FirstOrderSection::low_pass(double pole) {
    if (!(pole > 0.0) || !std::isfinite(pole)) {
        throw_domain("low-pass pole must be positive and finite");
    }
    return {0.0, pole, pole};
}

ClampValues derive_clamp_values(const PhysicalParams& p) {
    p.validate();
    const double electrode_area = p.W * p.h_E;
    const double membrane_area = p.W * p.h_M;
    const double interface_area = p.W * (p.xi_h * p.h_E);

    ClampValues c;
    c.RE_clamp = p.rho_E * p.L / electrode_area;
    c.RM = (1.0 / p.sigma_M) * p.L / membrane_area;
    c.RI_clamp = (p.xi_rho * p.rho_E) * p.L / interface_area;
    c.C_clamp = p.C_clamp;
    return c;
}

CompartmentValues compartment_params(const ClampValues& clamp, double alpha_E, double alpha_I, double alpha_C,
                                     std::size_t k, std::size_t N) {
    if (N == 0 || k < 1 || k > N) {
        throw Error(ErrorKind::Index, "compartment index " + std::to_string(k) + " outside 1.." + std::to_string(N));
    }
    require_attenuation(alpha_E, "alpha_E");
    require_attenuation(alpha_I, "alpha_I");
    require_attenuation(alpha_C, "alpha_C");

    const double fraction = static_cast<double>(k) / static_cast<double>(N);
    const auto interpolate = [fraction](double at_clamp, double alpha) {
        const double at_tip = at_clamp / alpha;
        return (at_tip - at_clamp) * fraction + at_clamp;
    };

    CompartmentValues v;
    v.RE = interpolate(clamp.RE_clamp, alpha_E);
    v.RI = interpolate(clamp.RI_clamp, alpha_I);
    v.C = interpolate(clamp.C_clamp, alpha_C);
    v.RM = clamp.RM;
    return v;
}

StageTF stage_tf(double RE, double RI, double C, double RM) {
    if (!(RE >= 0.0) || !std::isfinite(RE)) {
        throw_domain("stage RE must be non-negative and finite");
    }
    require_positive(RI, "RI");
    require_positive(C, "C");
    require_positive(RM, "RM");

    StageTF s;
    s.G = 1.0 / (1.0 + RE / RM + RE / RI);
    s.Z = 1.0 / (RI * C);
    if (RE == 0.0) {
        s.P = s.Z;
    } else {
        s.P = (1.0 / C) / (RI + RE * RM / (RE + RM));
    }
    return s;
}

CascadeModel build_cascade(const PhysicalParams& p, std::size_t N) {
    if (N == 0) {
        throw_domain("cascade needs at least one stage");
    }
    const ClampValues clamp = derive_clamp_values(p);
    CascadeModel model;
    model.stages.reserve(N);
    for (std::size_t k = 1; k <= N; ++k) {
        model.stages.push_back(stage_tf(compartment_params(clamp, p.alpha_E, p.alpha_I, p.alpha_C, k, N)));
    }
    return model;
}

StageImpulseResponse stage_impulse_response(const StageTF& stage) {
    return {stage.G, stage.G * (stage.Z - stage.P), stage.P};
}

double dc_gain(const CascadeModel& model) {
    double gain = 1.0;
    for (const auto& s : model.stages) {
        gain *= s.dc_gain();
    }
    return gain;
}

Signal simulate_sections(std::span<const FirstOrderSection> sections, const Signal& input, int oversample) {
    if (oversample < 1) {
        throw_domain("oversample must be a positive integer");
    }
    for (const auto& s : sections) {
        if (!(s.pole > 0.0) || !std::isfinite(s.pole) || !std::isfinite(s.direct) || !std::isfinite(s.residue)) {
            throw_domain("first-order section needs a positive finite pole and finite coefficients");
        }
    }

    const std::size_t n = input.size();
    std::vector<double> out(n, 0.0);
    if (n == 0) {
        return Signal(std::move(out), input.sample_rate(), input.label(), input.start_time());
    }

    const double h = 1.0 / (input.sample_rate() * oversample);
    struct Coefficients {
        double decay;
        double gain;
        double direct;
        double residue;
    };
    std::vector<Coefficients> coeff;
    coeff.reserve(sections.size());
    for (const auto& s : sections) {
        const double a = 0.5 * s.pole * h;
        coeff.push_back({(1.0 - a) / (1.0 + a), h / (1.0 + a), s.direct, s.residue});
    }
    std::vector<double> state(sections.size(), 0.0);

    const auto samples = input.samples();
    for (std::size_t i = 0; i < n; ++i) {
        const double held = samples[i];

        double u = held;
        for (std::size_t k = 0; k < coeff.size(); ++k) {
            u = coeff[k].direct * u + coeff[k].residue * state[k];
        }
        out[i] = u;

        if (i + 1 == n) {
            break;
        }
        for (int m = 0; m < oversample; ++m) {
            double mean_in = held;
            for (std::size_t k = 0; k < coeff.size(); ++k) {
                const Coefficients& c = coeff[k];
                const double next = c.decay * state[k] + c.gain * mean_in;
                mean_in = c.direct * mean_in + c.residue * 0.5 * (state[k] + next);
                state[k] = next;
            }
        }
    }

    for (double v : out) {
        if (!std::isfinite(v)) {
            throw_numeric("cascade simulation produced a non-finite value");
        }
    }
    return Signal(std::move(out), input.sample_rate(), input.label(), input.start_time());
}

Signal simulate_cascade(const CascadeModel& model, const Signal& v_in, int oversample) {
    std::vector<FirstOrderSection> sections;
    sections.reserve(model.size());
    for (const auto& s : model.stages) {
        sections.push_back(FirstOrderSection::from_stage(s));
    }
    return simulate_sections(sections, v_in, oversample);
}

} // namespace ipmc
