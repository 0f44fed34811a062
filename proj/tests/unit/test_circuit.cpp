#include <doctest.h>

#include <cmath>
#include <random>

#include "ipmc/circuit.hpp"
#include "ipmc/error.hpp"
#include "support.hpp"

using namespace ipmc;

namespace {

Signal step(std::size_t n, double fs, double level = 1.0) { return Signal(std::vector<double>(n, level), fs); }

ErrorKind kind_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an ipmc::Error");
    return ErrorKind::Numeric;
}

} // namespace

TEST_CASE("clamp values from the material table") {
    const ClampValues c = derive_clamp_values(PhysicalParams{});
    // hand evaluation of rho L / (W h)
    CHECK(c.RE_clamp == doctest::Approx(1.06e-7 * 0.022 / (5.5e-3 * 1e-6)).epsilon(1e-14));
    CHECK(c.RE_clamp == doctest::Approx(0.424).epsilon(1e-12));
    CHECK(c.RM == doctest::Approx(2130.4).epsilon(1e-4));
    CHECK(c.RM == doctest::Approx((1.0 / 10.26) * 0.022 / (5.5e-3 * 183e-6)).epsilon(1e-14));
    CHECK(c.RI_clamp == doctest::Approx(10.0 * c.RE_clamp).epsilon(1e-14));
    CHECK(c.C_clamp == 5e-3);

    PhysicalParams same;
    same.xi_rho = same.xi_h = 7.0;
    const ClampValues s = derive_clamp_values(same);
    CHECK(s.RI_clamp == doctest::Approx(s.RE_clamp).epsilon(1e-15));
}

TEST_CASE("invalid physical parameters name the field") {
    PhysicalParams p;
    p.h_E = -1.0;
    try {
        (void)derive_clamp_values(p);
        FAIL("no error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Domain);
        CHECK(std::string(e.what()).find("h_E") != std::string::npos);
    }
    p = {};
    p.alpha_I = 0.0;
    CHECK(kind_of([&] { p.validate(); }) == ErrorKind::Domain);
    p.alpha_I = 1.5;
    CHECK(kind_of([&] { p.validate(); }) == ErrorKind::Domain);
    p.alpha_I = 1.0;
    CHECK_NOTHROW(p.validate());
}

TEST_CASE("compartment interpolation") {
    const ClampValues clamp = derive_clamp_values(PhysicalParams{});
    const auto tip = compartment_params(clamp, 0.5, 0.5, 0.5, 45, 45);
    CHECK(tip.RE == doctest::Approx(0.848).epsilon(1e-12));
    CHECK(tip.RM == clamp.RM);

    ClampValues unit{1.0, 1.0, 1.0, 1.0};
    // tip = 1 / (1/3) = 3, so k = 2 of 4 is the midpoint
    const auto mid = compartment_params(unit, 1.0 / 3.0, 1.0, 1.0, 2, 4);
    CHECK(mid.RE == doctest::Approx(2.0).epsilon(1e-14));

    for (std::size_t k = 1; k <= 6; ++k) {
        const auto v = compartment_params(clamp, 1.0, 1.0, 1.0, k, 6);
        CHECK(v.RE == clamp.RE_clamp);
        CHECK(v.RI == clamp.RI_clamp);
        CHECK(v.C == clamp.C_clamp);
    }

    CHECK(kind_of([&] { (void)compartment_params(clamp, 0.5, 0.5, 0.5, 0, 4); }) == ErrorKind::Index);
    CHECK(kind_of([&] { (void)compartment_params(clamp, 0.5, 0.5, 0.5, 5, 4); }) == ErrorKind::Index);
    CHECK(kind_of([&] { (void)compartment_params(clamp, 0.0, 0.5, 0.5, 1, 4); }) == ErrorKind::Domain);
}

TEST_CASE("stage transfer function values") {
    const StageTF a = stage_tf(1.0, 2.0, 1.0, 2.0);
    CHECK(a.G == doctest::Approx(0.5).epsilon(1e-15));

    const StageTF z = stage_tf(0.3, 1.0, 1.0, 5.0);
    CHECK(z.Z == doctest::Approx(1.0).epsilon(1e-15));

    const StageTF id = stage_tf(0.0, 3.0, 0.2, 10.0);
    CHECK(id.G == 1.0);
    CHECK(id.P == id.Z);

    CHECK(kind_of([] { (void)stage_tf(1.0, 0.0, 1.0, 1.0); }) == ErrorKind::Domain);
    CHECK(kind_of([] { (void)stage_tf(1.0, 1.0, -1.0, 1.0); }) == ErrorKind::Domain);
    CHECK(kind_of([] { (void)stage_tf(1.0, 1.0, 1.0, 0.0); }) == ErrorKind::Domain);
}

TEST_CASE("dc gain identity over random stages") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> re(0.0, 10.0);
    std::uniform_real_distribution<double> logr(std::log(0.1), std::log(1e4));
    std::uniform_real_distribution<double> logc(std::log(1e-6), std::log(1e-1));
    for (int i = 0; i < 2000; ++i) {
        const double RE = re(rng);
        const double RI = std::exp(logr(rng));
        const double RM = std::exp(logr(rng));
        const double C = std::exp(logc(rng));
        const StageTF s = stage_tf(RE, RI, C, RM);
        CHECK(s.G > 0.0);
        CHECK(s.G <= 1.0);
        const double expected = RM / (RE + RM);
        CHECK(std::abs(s.dc_gain() - expected) / expected < 1e-12);
    }
}

TEST_CASE("cascade construction") {
    PhysicalParams uniform;
    uniform.alpha_E = uniform.alpha_I = uniform.alpha_C = 1.0;
    const CascadeModel one = build_cascade(uniform, 1);
    REQUIRE(one.size() == 1);
    const ClampValues c = derive_clamp_values(uniform);
    CHECK(one.stages[0] == stage_tf(c.RE_clamp, c.RI_clamp, c.C_clamp, c.RM));

    const CascadeModel same = build_cascade(uniform, 7);
    for (const auto& s : same.stages) CHECK(s == same.stages.front());

    const CascadeModel m = build_cascade(PhysicalParams{}, 45);
    REQUIRE(m.size() == 45);
    double previous_re = 0.0;
    double previous_gain = 1.0;
    for (std::size_t k = 1; k <= 45; ++k) {
        const auto v = compartment_params(derive_clamp_values(PhysicalParams{}), 0.5, 0.5, 0.5, k, 45);
        CHECK(v.RE >= previous_re);
        previous_re = v.RE;
        CHECK(m.stages[k - 1].dc_gain() <= previous_gain);
        previous_gain = m.stages[k - 1].dc_gain();
    }

    double last = 1.0;
    for (std::size_t n = 1; n <= 60; n += 7) {
        const double g = dc_gain(build_cascade(PhysicalParams{}, n));
        CHECK(g <= last);
        last = g;
    }
    CHECK_THROWS_AS((void)build_cascade(PhysicalParams{}, 0), Error);
}

TEST_CASE("dc gain of simple cascades") {
    CHECK(dc_gain(CascadeModel{{StageTF{1.0, 2.0, 2.0}, StageTF{1.0, 5.0, 5.0}}}) == 1.0);
    CHECK(stage_tf(4.0, 1.0, 1.0, 4.0).dc_gain() == doctest::Approx(0.5).epsilon(1e-15));
    const StageTF s = stage_tf(0.7, 2.0, 0.1, 9.0);
    const CascadeModel five{std::vector<StageTF>(5, s)};
    CHECK(dc_gain(five) == doctest::Approx(std::pow(s.dc_gain(), 5)).epsilon(1e-14));
}

TEST_CASE("impulse response partial fractions") {
    const auto id = stage_impulse_response(StageTF{1.0, 3.0, 3.0});
    CHECK(id.direct_gain == 1.0);
    CHECK(id.exp_coefficient == 0.0);

    const auto h = stage_impulse_response(StageTF{0.5, 2.0, 1.0});
    CHECK(h.direct_gain == 0.5);
    CHECK(h.exp_coefficient == doctest::Approx(0.5));
    CHECK(h.exp_rate == 1.0);
    CHECK(h.smooth_part(1.3) == doctest::Approx(0.5 * std::exp(-1.3)).epsilon(1e-15));

    // integral of h equals G Z / P: direct + coefficient / rate
    const StageTF s = stage_tf(0.9, 3.0, 0.02, 40.0);
    const auto r = stage_impulse_response(s);
    CHECK(r.direct_gain + r.exp_coefficient / r.exp_rate == doctest::Approx(s.dc_gain()).epsilon(1e-13));
}

TEST_CASE("single stage step response against the closed form") {
    const CascadeModel m{{StageTF{0.5, 2.0, 1.0}}};
    const double fs = 30.0;
    const Signal u = step(600, fs);
    auto error_at = [&](int oversample) {
        const Signal y = simulate_cascade(m, u, oversample);
        double worst = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) {
            const double t = static_cast<double>(i) / fs;
            worst = std::max(worst, std::abs(y[i] - 0.5 * (2.0 - std::exp(-t))));
        }
        return worst;
    };
    const double e16 = error_at(16);
    CHECK(e16 < 1e-3);
    double previous = error_at(1);
    for (int os : {2, 4, 8, 16, 32}) {
        const double e = error_at(os);
        CHECK(e < previous);
        CHECK(previous / e > 3.0); // second order
        previous = e;
    }
    const Signal long_step = simulate_cascade(m, step(3000, fs));
    CHECK(long_step[2999] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("cascade matches a fine-grid integration of the same ODE") {
    const CascadeModel m = build_cascade(PhysicalParams{}, 4);
    std::vector<FirstOrderSection> sections;
    for (const auto& s : m.stages) sections.push_back(FirstOrderSection::from_stage(s));
    const Signal u = test::random_signal(90, 30.0, 3);
    const auto oracle = test::rk4_sections(sections, u.values(), 30.0, 400);
    const Signal y = simulate_cascade(m, u, 64);
    CHECK(test::max_abs_diff(y.values(), oracle) < 1e-4);
}

TEST_CASE("identity cascade is the identity map") {
    const CascadeModel id{{stage_tf(0.0, 1.0, 1.0, 1.0), stage_tf(0.0, 4.0, 0.01, 2.0), stage_tf(0.0, 0.5, 3.0, 9.0)}};
    const Signal u = test::random_signal(500, 30.0, 5, 3.0);
    const Signal y = simulate_cascade(id, u);
    CHECK(test::max_abs_diff(y.values(), u.values()) <= 1e-12);
}

TEST_CASE("cascade step settles at the product of RM / (RE + RM)") {
    PhysicalParams p;
    p.C_clamp = 1e-3;
    const std::size_t N = 5;
    const CascadeModel m = build_cascade(p, N);
    double expected = 1.0;
    const ClampValues c = derive_clamp_values(p);
    for (std::size_t k = 1; k <= N; ++k) {
        const auto v = compartment_params(c, p.alpha_E, p.alpha_I, p.alpha_C, k, N);
        expected *= v.RM / (v.RE + v.RM);
    }
    const Signal y = simulate_cascade(m, step(900, 30.0));
    CHECK(y[899] == doctest::Approx(expected).epsilon(1e-10));
    CHECK(dc_gain(m) == doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("simulation is linear") {
    const CascadeModel m = build_cascade(PhysicalParams{}, 10);
    const Signal x = test::random_signal(300, 30.0, 1);
    const Signal z = test::random_signal(300, 30.0, 2);
    const double a = 1.7;
    const double b = -0.4;
    std::vector<double> mix(300);
    for (std::size_t i = 0; i < 300; ++i) mix[i] = a * x[i] + b * z[i];
    const Signal ym = simulate_cascade(m, Signal(mix, 30.0));
    const Signal yx = simulate_cascade(m, x);
    const Signal yz = simulate_cascade(m, z);
    double worst = 0.0;
    for (std::size_t i = 0; i < 300; ++i) worst = std::max(worst, std::abs(ym[i] - (a * yx[i] + b * yz[i])));
    CHECK(worst < 1e-10);
}

TEST_CASE("simulation is causal") {
    const CascadeModel m = build_cascade(PhysicalParams{}, 6);
    const Signal x = test::random_signal(200, 30.0, 9);
    for (std::size_t j : {0UL, 1UL, 57UL, 199UL}) {
        auto changed = x.values();
        changed[j] += 5.0;
        const Signal a = simulate_cascade(m, x);
        const Signal b = simulate_cascade(m, Signal(changed, 30.0));
        for (std::size_t i = 0; i < j; ++i) CHECK(a[i] == b[i]);
        CHECK(a[j] != b[j]);
    }
}

TEST_CASE("simulation edge cases") {
    const CascadeModel m = build_cascade(PhysicalParams{}, 3);
    const Signal empty(std::vector<double>{}, 30.0);
    CHECK(simulate_cascade(m, empty).empty());
    CHECK(simulate_cascade(m, step(10, 30.0)).size() == 10);
    CHECK(simulate_cascade(m, step(10, 30.0)).sample_rate() == 30.0);
    CHECK_THROWS_AS((void)simulate_cascade(m, step(10, 30.0), 0), Error);
    CHECK(kind_of([] { Signal bad({1.0, std::nan("")}, 30.0); }) == ErrorKind::Data);
    CHECK(kind_of([] { Signal bad({1.0}, 0.0); }) == ErrorKind::Domain);

    const Signal a = simulate_cascade(m, test::random_signal(100, 30.0, 4));
    const Signal b = simulate_cascade(m, test::random_signal(100, 30.0, 4));
    CHECK(a.values() == b.values());
}

TEST_CASE("low-pass section") {
    const FirstOrderSection lp = FirstOrderSection::low_pass(3.0);
    const std::vector<FirstOrderSection> chain{lp};
    const Signal y = simulate_sections(chain, step(600, 30.0));
    for (std::size_t i = 0; i < 600; i += 37) {
        const double t = static_cast<double>(i) / 30.0;
        CHECK(y[i] == doctest::Approx(1.0 - std::exp(-3.0 * t)).epsilon(1e-3));
    }
    CHECK_THROWS_AS((void)FirstOrderSection::low_pass(0.0), Error);
}
