#include "ipmc/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <thread>

#include "ipmc/error.hpp"
#include "ipmc/metrics.hpp"

namespace ipmc {

namespace {

constexpr std::size_t kDim = kFreeParamCount;
constexpr std::size_t kMaxIterations = 500;
constexpr double kDiameterTolerance = 1e-6;
constexpr double kInitialStepFraction = 0.1;

constexpr FreeParam kAllParams[] = {FreeParam::XiRho,  FreeParam::XiH,    FreeParam::CClamp,
                                    FreeParam::AlphaE, FreeParam::AlphaI, FreeParam::AlphaC};

using LogPoint = std::array<double, kDim>;

} // namespace

std::string_view to_string(FreeParam p) noexcept {
    switch (p) {
    case FreeParam::XiRho:
        return "xi_rho";
    case FreeParam::XiH:
        return "xi_h";
    case FreeParam::CClamp:
        return "C_clamp";
    case FreeParam::AlphaE:
        return "alpha_E";
    case FreeParam::AlphaI:
        return "alpha_I";
    case FreeParam::AlphaC:
        return "alpha_C";
    }
    return "unknown";
}

FreeVector free_values(const PhysicalParams& p) {
    return {p.xi_rho, p.xi_h, p.C_clamp, p.alpha_E, p.alpha_I, p.alpha_C};
}

PhysicalParams with_free_values(PhysicalParams p, const FreeVector& v) {
    p.xi_rho = v[0];
    p.xi_h = v[1];
    p.C_clamp = v[2];
    p.alpha_E = v[3];
    p.alpha_I = v[4];
    p.alpha_C = v[5];
    return p;
}

std::array<ParamBounds, kFreeParamCount> default_bounds() {
    return {{{1.0, 1e4}, {1.0, 1e3}, {1e-4, 10.0}, {0.05, 1.0}, {0.05, 1.0}, {0.05, 1.0}}};
}

void EstimationProblem::validate() const {
    if (v_i.size() != w.size()) throw_data("estimation stimulus and displacement lengths differ");
    if (v_i.sample_rate() != w.sample_rate()) throw_data("estimation signals have different sample rates");
    if (v_i.size() < 2) throw_data("estimation needs at least two samples");
    if (stages < 1) throw_domain("estimation needs at least one stage");
    if (oversample < 1) throw_domain("estimation oversample must be positive");
    if (objective != "affine_nmse") throw_domain("unknown estimation objective '" + objective + "'");
    for (std::size_t i = 0; i < kDim; ++i) {
        const auto& b = bounds[i];
        const std::string name(to_string(kAllParams[i]));
        if (!(b.lower > 0.0) || !std::isfinite(b.upper) || !(b.lower < b.upper)) {
            throw_domain("bounds for " + name + " must satisfy 0 < lower < upper < inf");
        }
        const auto param = kAllParams[i];
        const bool is_alpha =
            param == FreeParam::AlphaE || param == FreeParam::AlphaI || param == FreeParam::AlphaC;
        if (is_alpha && b.upper > 1.0) throw_domain("bounds for " + name + " must stay within (0, 1]");
    }
    if (initial_guess) {
        for (std::size_t i = 0; i < kDim; ++i) {
            const double v = (*initial_guess)[i];
            if (!(v >= bounds[i].lower && v <= bounds[i].upper)) {
                throw_domain("initial guess for " + std::string(to_string(kAllParams[i])) + " is outside its bounds");
            }
        }
    }
}

AffineFit fit_affine(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.empty()) throw_data("affine fit needs equal, non-empty series");
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    AffineFit f;
    f.slope = sxx > 0.0 ? sxy / sxx : 0.0;
    f.intercept = my - f.slope * mx;
    return f;
}

double objective_affine_nmse(const PhysicalParams& params, const EstimationProblem& problem) {
    const Signal v_o = simulate_cascade(build_cascade(params, problem.stages), problem.v_i, problem.oversample);
    const AffineFit fit = fit_affine(v_o.samples(), problem.w.samples());
    std::vector<double> calibrated(v_o.size());
    for (std::size_t i = 0; i < v_o.size(); ++i) calibrated[i] = fit.slope * v_o[i] + fit.intercept;
    return nmse(problem.w.samples(), calibrated);
}

namespace {

class LogSpaceObjective {
public:
    explicit LogSpaceObjective(const EstimationProblem& problem) : problem_(problem) {
        for (std::size_t i = 0; i < kDim; ++i) {
            lo_[i] = std::log(problem.bounds[i].lower);
            hi_[i] = std::log(problem.bounds[i].upper);
        }
    }

    [[nodiscard]] LogPoint project(LogPoint x) const {
        for (std::size_t i = 0; i < kDim; ++i) x[i] = std::clamp(x[i], lo_[i], hi_[i]);
        return x;
    }

    [[nodiscard]] FreeVector to_physical(const LogPoint& x) const {
        FreeVector v{};
        for (std::size_t i = 0; i < kDim; ++i) {
            // exp(log(b)) can land an ulp outside the box; clamp to keep bounds exact.
            v[i] = std::clamp(std::exp(x[i]), problem_.bounds[i].lower, problem_.bounds[i].upper);
        }
        return v;
    }

    double operator()(const LogPoint& x) {
        ++evaluations;
        try {
            const double f = objective_affine_nmse(with_free_values(problem_.fixed, to_physical(x)), problem_);
            return std::isfinite(f) ? f : std::numeric_limits<double>::infinity();
        } catch (const Error&) {
            return std::numeric_limits<double>::infinity();
        }
    }

    [[nodiscard]] const LogPoint& lower() const noexcept { return lo_; }
    [[nodiscard]] const LogPoint& upper() const noexcept { return hi_; }

    std::size_t evaluations = 0;

private:
    const EstimationProblem& problem_;
    LogPoint lo_{};
    LogPoint hi_{};
};

RestartTrace nelder_mead(const EstimationProblem& problem, const LogPoint& start) {
    LogSpaceObjective f(problem);
    constexpr std::size_t n = kDim;

    std::array<LogPoint, n + 1> simplex{};
    std::array<double, n + 1> value{};
    simplex[0] = f.project(start);
    for (std::size_t i = 0; i < n; ++i) {
        LogPoint v = simplex[0];
        const double step = kInitialStepFraction * (f.upper()[i] - f.lower()[i]);
        v[i] = v[i] + step <= f.upper()[i] ? v[i] + step : v[i] - step;
        simplex[i + 1] = f.project(v);
    }
    for (std::size_t i = 0; i <= n; ++i) value[i] = f(simplex[i]);

    RestartTrace trace;
    trace.start = f.to_physical(simplex[0]);
    trace.start_objective = value[0];

    std::array<std::size_t, n + 1> order{};
    const auto sort_simplex = [&] {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return value[a] < value[b]; });
        auto s = simplex;
        auto v = value;
        for (std::size_t i = 0; i <= n; ++i) {
            simplex[i] = s[order[i]];
            value[i] = v[order[i]];
        }
    };
    const auto along = [&](const LogPoint& from, const LogPoint& to, double t) {
        LogPoint p{};
        for (std::size_t i = 0; i < n; ++i) p[i] = from[i] + t * (to[i] - from[i]);
        return f.project(p);
    };

    sort_simplex();
    for (std::size_t iter = 0; iter < kMaxIterations; ++iter) {
        double diameter = 0.0;
        for (std::size_t v = 1; v <= n; ++v) {
            for (std::size_t i = 0; i < n; ++i) diameter = std::max(diameter, std::abs(simplex[v][i] - simplex[0][i]));
        }
        if (diameter < kDiameterTolerance) {
            trace.converged = true;
            break;
        }

        LogPoint centroid{};
        for (std::size_t v = 0; v < n; ++v) {
            for (std::size_t i = 0; i < n; ++i) centroid[i] += simplex[v][i] / static_cast<double>(n);
        }
        const LogPoint& worst = simplex[n];

        const LogPoint reflected = along(centroid, worst, -1.0);
        const double fr = f(reflected);
        if (fr < value[0]) {
            const LogPoint expanded = along(centroid, worst, -2.0);
            const double fe = f(expanded);
            if (fe < fr) {
                simplex[n] = expanded;
                value[n] = fe;
            } else {
                simplex[n] = reflected;
                value[n] = fr;
            }
        } else if (fr < value[n - 1]) {
            simplex[n] = reflected;
            value[n] = fr;
        } else {
            const bool outside = fr < value[n];
            const LogPoint contracted = outside ? along(centroid, reflected, 0.5) : along(centroid, worst, 0.5);
            const double fc = f(contracted);
            if (fc < (outside ? fr : value[n])) {
                simplex[n] = contracted;
                value[n] = fc;
            } else {
                for (std::size_t v = 1; v <= n; ++v) {
                    simplex[v] = along(simplex[0], simplex[v], 0.5);
                    value[v] = f(simplex[v]);
                }
            }
        }
        sort_simplex();
        trace.best_objective.push_back(value[0]);
    }

    trace.evaluations = f.evaluations;
    trace.final_objective = value[0];
    trace.final_values = f.to_physical(simplex[0]);
    trace.failed = !std::isfinite(value[0]);
    return trace;
}

std::vector<LogPoint> latin_hypercube_starts(const EstimationProblem& problem, std::size_t count,
                                             std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<LogPoint> starts(count);
    for (std::size_t d = 0; d < kDim; ++d) {
        std::vector<std::size_t> strata(count);
        std::iota(strata.begin(), strata.end(), std::size_t{0});
        std::shuffle(strata.begin(), strata.end(), rng);
        const double lo = std::log(problem.bounds[d].lower);
        const double hi = std::log(problem.bounds[d].upper);
        for (std::size_t r = 0; r < count; ++r) {
            const double u = (static_cast<double>(strata[r]) + unit(rng)) / static_cast<double>(count);
            starts[r][d] = lo + u * (hi - lo);
        }
    }
    return starts;
}

} // namespace

EstimationResult estimate_params(const EstimationProblem& problem, std::size_t restarts, std::uint64_t seed,
                                 std::size_t threads) {
    problem.validate();
    if (restarts < 1) throw_domain("estimation needs at least one restart");

    std::vector<LogPoint> starts = latin_hypercube_starts(problem, restarts, seed);
    if (problem.initial_guess) {
        for (std::size_t i = 0; i < kDim; ++i) starts[0][i] = std::log((*problem.initial_guess)[i]);
    }

    std::vector<RestartTrace> traces(restarts);
    const std::size_t workers = std::clamp<std::size_t>(threads, 1, restarts);
    if (workers == 1) {
        for (std::size_t r = 0; r < restarts; ++r) traces[r] = nelder_mead(problem, starts[r]);
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < workers; ++t) {
            pool.emplace_back([&, t] {
                for (std::size_t r = t; r < restarts; r += workers) traces[r] = nelder_mead(problem, starts[r]);
            });
        }
        for (auto& th : pool) th.join();
    }

    EstimationResult result;
    bool found = false;
    for (std::size_t r = 0; r < restarts; ++r) {
        if (traces[r].failed) continue;
        if (!found || traces[r].final_objective < result.objective) {
            found = true;
            result.objective = traces[r].final_objective;
            result.best_restart = r;
        }
    }
    if (!found) throw Error(ErrorKind::Estimation, "every estimation restart failed to evaluate");

    result.params = with_free_values(problem.fixed, traces[result.best_restart].final_values);
    result.interface_ratio = result.params.xi_rho / result.params.xi_h;
    result.identifiability_note =
        "xi_rho and xi_h enter the circuit only through their ratio (reported as interface_ratio); "
        "the pair is not separately identifiable from electrical behaviour alone";
    result.restarts = std::move(traces);
    return result;
}

} // namespace ipmc
