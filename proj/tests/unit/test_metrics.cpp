#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "ipmc/error.hpp"
#include "ipmc/metrics.hpp"

using namespace ipmc;

using Vec = std::vector<double>;

TEST_CASE("hand-computed metric values") {
    CHECK(std::abs(nmse(Vec{0, 2}, Vec{0, 1}) - 0.125) <= 1e-12);
    CHECK(std::abs(fitting(Vec{0, 2}, Vec{2, 0}) - (-100.0)) <= 1e-12);
    CHECK(std::abs(fitting(Vec{0, 2}, Vec{1, 1}) - 0.0) <= 1e-12);

    // negative peak: normalizer is max |w|
    const EvalReport r = evaluate(Vec{-4, 1, 2}, Vec{-4, 1, 0});
    CHECK(r.normalizer == 4.0);
    CHECK(r.n_samples == 3);
    CHECK(std::abs(r.nmse - (0.25 / 3.0)) <= 1e-12);
}

TEST_CASE("perfect predictions over random series") {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g(0.0, 3.0);
    std::uniform_int_distribution<std::size_t> len(2, 300);
    for (int k = 0; k < 100; ++k) {
        Vec w(len(rng));
        for (auto& x : w) x = g(rng);
        CHECK(nmse(w, w) == 0.0);
        CHECK(fitting(w, w) == 100.0);
    }
}

TEST_CASE("metric invariants") {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int k = 0; k < 50; ++k) {
        Vec w(64);
        Vec p(64);
        for (std::size_t i = 0; i < 64; ++i) {
            w[i] = g(rng);
            p[i] = w[i] + 0.5 * g(rng);
        }
        const double base_nmse = nmse(w, p);
        const double base_fit = fitting(w, p);
        CHECK(base_nmse >= 0.0);
        CHECK(base_fit <= 100.0);

        const double c = 0.01 + 20.0 * std::abs(g(rng));
        Vec cw = w;
        Vec cp = p;
        for (std::size_t i = 0; i < 64; ++i) {
            cw[i] *= c;
            cp[i] *= c;
        }
        CHECK(nmse(cw, cp) == doctest::Approx(base_nmse).epsilon(1e-12));
        CHECK(fitting(cw, cp) == doctest::Approx(base_fit).epsilon(1e-12));

        std::vector<std::size_t> perm(64);
        for (std::size_t i = 0; i < 64; ++i) perm[i] = i;
        std::shuffle(perm.begin(), perm.end(), rng);
        Vec pw(64);
        Vec pp(64);
        for (std::size_t i = 0; i < 64; ++i) {
            pw[i] = w[perm[i]];
            pp[i] = p[perm[i]];
        }
        CHECK(nmse(pw, pp) == doctest::Approx(base_nmse).epsilon(1e-12));
        CHECK(fitting(pw, pp) == doctest::Approx(base_fit).epsilon(1e-12));
    }
}

TEST_CASE("amplitude errors stay visible") {
    const Vec w{0.0, 1.0, -1.0, 0.5};
    Vec big = w;
    for (auto& x : big) x *= 10.0;
    CHECK(nmse(w, big) > 1.0);
    CHECK(fitting(w, big) < 0.0);
}

TEST_CASE("metric errors") {
    auto kind = [](auto&& fn) {
        try {
            fn();
        } catch (const Error& e) {
            return e.kind();
        }
        return ErrorKind::Numeric;
    };
    CHECK(kind([] { (void)nmse(Vec{1, 2}, Vec{1}); }) == ErrorKind::Data);
    CHECK(kind([] { (void)nmse(Vec{}, Vec{}); }) == ErrorKind::Data);
    CHECK(kind([] { (void)nmse(Vec{0, 0}, Vec{1, 0}); }) == ErrorKind::Data);
    CHECK(kind([] { (void)fitting(Vec{3, 3, 3}, Vec{1, 2, 3}); }) == ErrorKind::Data);
}
