#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ipmc/circuit.hpp"
#include "ipmc/signal.hpp"

namespace ipmc {

/// Circuit parameters without a measured value, in search-vector order.
enum class FreeParam : std::size_t { XiRho, XiH, CClamp, AlphaE, AlphaI, AlphaC };

inline constexpr std::size_t kFreeParamCount = 6;
using FreeVector = std::array<double, kFreeParamCount>;

[[nodiscard]] std::string_view to_string(FreeParam p) noexcept;
[[nodiscard]] FreeVector free_values(const PhysicalParams& p);
[[nodiscard]] PhysicalParams with_free_values(PhysicalParams p, const FreeVector& values);

struct ParamBounds {
    double lower = 0.0;
    double upper = 0.0;
};

[[nodiscard]] std::array<ParamBounds, kFreeParamCount> default_bounds();

struct EstimationProblem {
    EstimationProblem(Signal v_i, Signal w) : v_i(std::move(v_i)), w(std::move(w)) {}

    Signal v_i;
    Signal w;
    std::size_t stages = 45;
    PhysicalParams fixed;   // measured constants; the free fields are overwritten
    std::array<ParamBounds, kFreeParamCount> bounds = default_bounds();
    int oversample = kDefaultOversample;
    std::optional<FreeVector> initial_guess; // used as the first restart's start when set
    std::string objective = "affine_nmse";

    void validate() const;
};

struct AffineFit {
    double slope = 0.0;
    double intercept = 0.0;
};

/// Least-squares y ~ slope * x + intercept. A constant x yields slope 0.
[[nodiscard]] AffineFit fit_affine(std::span<const double> x, std::span<const double> y);

/// NMSE between w and the best affine map of the simulated V_o. Measures how
/// well the mediatory signal matches the displacement up to calibration.
[[nodiscard]] double objective_affine_nmse(const PhysicalParams& params, const EstimationProblem& problem);

struct RestartTrace {
    FreeVector start{};
    double start_objective = 0.0;
    std::vector<double> best_objective; // after each iteration
    std::size_t evaluations = 0;
    double final_objective = 0.0;
    FreeVector final_values{};
    bool converged = false;
    bool failed = false;
};

struct EstimationResult {
    PhysicalParams params;
    double objective = 0.0;
    std::size_t best_restart = 0;
    std::vector<RestartTrace> restarts;
    /// xi_rho / xi_h: the only combination the electrical response sees.
    double interface_ratio = 0.0;
    std::string identifiability_note;
};

/// Multi-start Nelder-Mead in log-parameter space. Starts are Latin-hypercube
/// samples of the bounds; each restart stops when the simplex diameter drops
/// below 1e-6 (log scale) or after 500 iterations. Restarts may run on
/// `threads` workers; the reduction is ordered by restart index.
[[nodiscard]] EstimationResult estimate_params(const EstimationProblem& problem, std::size_t restarts,
                                               std::uint64_t seed, std::size_t threads = 1);

} // namespace ipmc
