#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "ipmc/error.hpp"
#include "ipmc/stimulus.hpp"

using namespace ipmc;

namespace {

// Independent cycle-length oracle: step until the initial state comes back.
std::uint64_t measured_period(int order, std::uint64_t seed) {
    Lfsr r(order, seed);
    const std::uint64_t start = r.state();
    std::uint64_t steps = 0;
    do {
        (void)r.next();
        ++steps;
    } while (r.state() != start && steps <= (std::uint64_t{1} << order));
    return steps;
}

} // namespace

TEST_CASE("lfsr is maximal length for every tabulated order up to 20") {
    for (int order = 2; order <= 20; ++order) {
        CAPTURE(order);
        CHECK(measured_period(order, 1) == (std::uint64_t{1} << order) - 1);
    }
}

TEST_CASE("lfsr visits every nonzero state once per period") {
    Lfsr r(9, 77);
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 511; ++i) {
        seen.insert(r.state());
        (void)r.next();
    }
    CHECK(seen.size() == 511);
    CHECK(seen.count(0) == 0);
}

TEST_CASE("lfsr balance over one period") {
    for (int order : {5, 9, 13}) {
        Lfsr r(order, 3);
        long ones = 0;
        const auto period = static_cast<long>(r.period());
        for (long i = 0; i < period; ++i) ones += r.next() ? 1 : 0;
        CHECK(ones - (period - ones) == 1);
    }
}

TEST_CASE("lfsr rejects bad arguments") {
    CHECK_THROWS_AS(Lfsr(1, 1), Error);
    CHECK_THROWS_AS(Lfsr(33, 1), Error);
    CHECK_THROWS_AS(Lfsr(9, 0), Error);
    CHECK(Lfsr::taps(32).front() == 32);
}

TEST_CASE("sine stimulus") {
    StimulusSpec s = StimulusSpec::defaults(StimulusKind::Sine);
    s.amplitude = 1.0;
    s.frequency = 1.0;
    const Signal v = generate_stimulus(s);
    CHECK(v.size() == 3600);
    CHECK(v.sample_rate() == 30.0);
    CHECK(std::abs(v[15]) < 1e-12);
    CHECK(v[0] == 0.0);
    CHECK(v[7] == doctest::Approx(std::sin(2 * std::numbers::pi * 7.0 / 30.0)));
}

TEST_CASE("pulse stimulus") {
    StimulusSpec s = StimulusSpec::defaults(StimulusKind::Pulse);
    s.period = 2.0;
    s.duty = 0.5;
    s.amplitude = 1.5;
    const Signal v = generate_stimulus(s);
    CHECK(v[15] == 1.5); // t = 0.5
    CHECK(v[45] == 0.0); // t = 1.5
}

TEST_CASE("chirp stimulus phase") {
    StimulusSpec s = StimulusSpec::defaults(StimulusKind::Chirp);
    const Signal v = generate_stimulus(s);
    for (std::size_t i : {0UL, 100UL, 1799UL, 3599UL}) {
        const double t = static_cast<double>(i) / s.sample_rate;
        const double phase = 2 * std::numbers::pi * (s.f0 * t + (s.f1 - s.f0) * t * t / (2 * s.duration));
        CHECK(v[i] == doctest::Approx(s.amplitude * std::sin(phase)).epsilon(1e-12));
    }
}

TEST_CASE("prbs stimulus holds each bit and uses both levels") {
    StimulusSpec s = StimulusSpec::defaults(StimulusKind::Prbs);
    s.duration = 30.0;
    const Signal v = generate_stimulus(s);
    CHECK(v.size() == 900);
    Lfsr r(s.lfsr_order, s.seed);
    for (std::size_t bit = 0; bit < 30; ++bit) {
        const double level = r.next() ? s.amplitude : -s.amplitude;
        for (std::size_t i = bit * 30; i < (bit + 1) * 30; ++i) CHECK(v[i] == level);
    }
}

TEST_CASE("stimulus length is floor(duration * rate)") {
    StimulusSpec s = StimulusSpec::defaults(StimulusKind::Sine);
    s.duration = 1.05;
    s.sample_rate = 10.0;
    CHECK(generate_stimulus(s).size() == 10);
}

TEST_CASE("stimulus generation is deterministic") {
    for (auto kind : {StimulusKind::Prbs, StimulusKind::Sine, StimulusKind::Chirp, StimulusKind::Pulse}) {
        const StimulusSpec s = StimulusSpec::defaults(kind);
        CHECK(generate_stimulus(s).values() == generate_stimulus(s).values());
    }
}

TEST_CASE("stimulus validation") {
    StimulusSpec s = StimulusSpec::defaults(StimulusKind::Pulse);
    s.duty = 1.0;
    CHECK_THROWS_AS(s.validate(), Error);
    s = StimulusSpec::defaults(StimulusKind::Sine);
    s.amplitude = 0.0;
    CHECK_THROWS_AS((void)generate_stimulus(s), Error);
    s = StimulusSpec::defaults(StimulusKind::Chirp);
    s.f0 = -1.0;
    CHECK_THROWS_AS(s.validate(), Error);
    s = StimulusSpec::defaults(StimulusKind::Prbs);
    s.seed = 0;
    CHECK_THROWS_AS(s.validate(), Error);
    CHECK(stimulus_kind_from_string("chirp") == StimulusKind::Chirp);
    CHECK_THROWS_AS((void)stimulus_kind_from_string("square"), Error);
}
