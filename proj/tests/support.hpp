#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "ipmc/circuit.hpp"
#include "ipmc/signal.hpp"

namespace ipmc::test {

inline std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("ipmc_tests_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline Signal random_signal(std::size_t n, double fs, std::uint64_t seed, double amplitude = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-amplitude, amplitude);
    std::vector<double> v(n);
    for (auto& x : v) x = u(rng);
    return Signal(std::move(v), fs);
}

/// Zero-order-held input through a chain of first-order sections, integrated
/// with classical RK4 on a very fine grid. Output i is read just after the
/// input switches to sample i.
inline std::vector<double> rk4_sections(const std::vector<FirstOrderSection>& sections, const std::vector<double>& u,
                                        double fs, int substeps) {
    const std::size_t m = sections.size();
    std::vector<double> x(m, 0.0);
    std::vector<double> out(u.size());
    const double h = 1.0 / (fs * substeps);

    auto deriv = [&](const std::vector<double>& s, double input) {
        std::vector<double> dx(m);
        double v = input;
        for (std::size_t k = 0; k < m; ++k) {
            dx[k] = -sections[k].pole * s[k] + v;
            v = sections[k].direct * v + sections[k].residue * s[k];
        }
        return dx;
    };

    for (std::size_t i = 0; i < u.size(); ++i) {
        double v = u[i];
        for (std::size_t k = 0; k < m; ++k) v = sections[k].direct * v + sections[k].residue * x[k];
        out[i] = v;
        for (int s = 0; s < substeps; ++s) {
            const auto k1 = deriv(x, u[i]);
            std::vector<double> t(m);
            for (std::size_t k = 0; k < m; ++k) t[k] = x[k] + 0.5 * h * k1[k];
            const auto k2 = deriv(t, u[i]);
            for (std::size_t k = 0; k < m; ++k) t[k] = x[k] + 0.5 * h * k2[k];
            const auto k3 = deriv(t, u[i]);
            for (std::size_t k = 0; k < m; ++k) t[k] = x[k] + h * k3[k];
            const auto k4 = deriv(t, u[i]);
            for (std::size_t k = 0; k < m; ++k) x[k] += h / 6.0 * (k1[k] + 2 * k2[k] + 2 * k3[k] + k4[k]);
        }
    }
    return out;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
}

} // namespace ipmc::test
