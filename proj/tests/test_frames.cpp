#include <catch_amalgamated.hpp>

#include "ltft/frames.hpp"

using namespace ltft;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Trapezoid-rule Fourier transform of an atom over its support.
template <typename Frame>
cplx numeric_ft(const Frame& frame, const PhasePoint& p, double z, int n = 20000) {
    const Interval sup = frame.support(p);
    const double h = sup.length() / n;
    cplx acc{};
    for (int i = 0; i <= n; ++i) {
        const double t = sup.lo + h * i;
        const double w = (i == 0 || i == n) ? 0.5 : 1.0;
        acc += w * frame.eval(p, t) * std::polar(1.0, -2.0 * std::numbers::pi * z * t);
    }
    return acc * h;
}

template <typename Frame>
double numeric_energy(const Frame& frame, const PhasePoint& p, int n = 20000) {
    const Interval sup = frame.support(p);
    const double h = sup.length() / n;
    double acc = 0.0;
    for (int i = 0; i <= n; ++i) acc += std::norm(frame.eval(p, sup.lo + h * i));
    return acc * h;
}

}  // namespace

TEST_CASE("band classification puts the seams in the middle band") {
    const LTFTParams params = LTFTParams::constant(3.0, 8.0, 8.0, 64.0);
    CHECK(atom_band(7.999, 4.0, params) == Band::Low);
    CHECK(atom_band(8.0, 4.0, params) == Band::Mid);
    CHECK(atom_band(-64.0, 4.0, params) == Band::Mid);
    CHECK(atom_band(64.001, 4.0, params) == Band::High);
    CHECK(atom_band(-100.0, 4.0, params) == Band::High);
    CHECK(band_scale(3.0, 4.0, params) == 8.0);
    CHECK(band_scale(-20.0, 4.0, params) == 20.0);
    CHECK(band_scale(90.0, 4.0, params) == 64.0);
}

TEST_CASE("support-pinned transition scales with tau") {
    LTFTParams params;
    params.tau_min = 2.0;
    params.tau_max = 6.0;
    params.transition = SupportPinnedTransition{0.5, 0.125};
    params.validate();
    CHECK(params.a(3.0) == 12.0);
    CHECK(params.b(3.0) == 48.0);
    const LtftFrame frame(params);
    // low and high atoms keep fixed lengths j1/2 and j2/2 for every tau
    CHECK_THAT(frame.support({0.0, 1.0, 3.0}).length(), WithinRel(0.25, 1e-14));
    CHECK_THAT(frame.support({0.0, 1.0, 5.0}).length(), WithinRel(0.25, 1e-14));
    CHECK_THAT(frame.support({0.0, 500.0, 5.0}).length(), WithinRel(0.0625, 1e-14));
    CHECK_THAT(frame.support({0.0, 500.0, 2.5}).length(), WithinRel(0.0625, 1e-14));
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(LTFTParams::constant(0.0, 8.0, 1.0, 2.0), Error);
    CHECK_THROWS_AS(LTFTParams::constant(4.0, 3.0, 1.0, 2.0), Error);
    CHECK_THROWS_AS(LTFTParams::constant(3.0, 8.0, 2.0, 2.0), Error);
    CHECK_THROWS_AS(LTFTParams::constant(3.0, 8.0, -1.0, 2.0), Error);
    LTFTParams p = LTFTParams::constant(3.0, 3.0, 1.0, 2.0);
    p.tau_measure = TauMeasure::Lebesgue;
    CHECK_THROWS_AS(p.validate(), Error);
}

TEST_CASE("LTFT atoms have window energy and closed-form transforms") {
    const LTFTParams params = LTFTParams::constant(3.0, 8.0, 8.0, 64.0);
    const LtftFrame frame(params);
    for (PhasePoint p : {PhasePoint{0.1, 2.0, 3.0}, PhasePoint{-0.2, 20.0, 5.5}, PhasePoint{0.0, -33.0, 8.0},
                         PhasePoint{0.3, 150.0, 4.0}}) {
        const Interval sup = frame.support(p);
        CHECK_THAT(sup.length(), WithinRel(p.tau / band_scale(p.omega, p.tau, params), 1e-14));
        CHECK(frame.eval(p, sup.hi + 1e-9) == cplx{});
        CHECK_THAT(numeric_energy(frame, p), WithinRel(0.375, 1e-6));
        for (double dz : {0.0, 0.7, -2.3}) {
            const double z = p.omega + dz * band_scale(p.omega, p.tau, params) / p.tau;
            const cplx ref = numeric_ft(frame, p, z);
            CHECK(std::abs(frame.ft(p, z) - ref) < 1e-6);
        }
    }
}

TEST_CASE("recurrence sampling matches direct evaluation") {
    const LtftFrame frame(LTFTParams::constant(3.0, 8.0, 8.0, 64.0));
    const PhasePoint p{0.0, 37.3, 6.1};
    std::vector<cplx> buf(3000);
    const double rate = 8000.0;
    const double u0 = frame.support(p).lo - 0.013;
    frame.sample_centered(p, u0, rate, buf);
    double worst = 0.0;
    for (std::size_t q = 0; q < buf.size(); ++q)
        worst = std::max(worst, std::abs(buf[q] - frame.eval(p, u0 + static_cast<double>(q) / rate)));
    CHECK(worst < 1e-12);
}

TEST_CASE("analysis coefficient of an atom with itself is its energy") {
    const LtftFrame frame(LTFTParams::constant(3.0, 8.0, 8.0, 64.0));
    const PhasePoint p{0.05, 40.0, 5.0};
    Signal s = Signal::zeros(2049, 1024.0, -1.0);
    for (std::size_t n = 0; n < s.size(); ++n) s.samples[n] = frame.eval(p, s.time(n));
    CHECK_THAT(std::abs(analysis_coeff(s, frame, p)), WithinRel(0.375, 1e-6));
}

TEST_CASE("STFT atoms are unit norm") {
    const StftFrame frame(Window::hann(), 0.25);
    const PhasePoint p{0.1, 12.0, 1.0};
    CHECK_THAT(numeric_energy(frame, p), WithinRel(1.0, 1e-6));
    CHECK(std::abs(frame.ft(p, 14.0) - numeric_ft(frame, p, 14.0)) < 1e-6);
    CHECK_THROWS_AS(StftFrame(Window::hann(), 0.0), Error);
}

TEST_CASE("mother wavelet is admissible with unit constant") {
    const MotherWavelet mw(2.0);
    CHECK(std::abs(mw.ft(0.0)) < 1e-14);
    // independent check with a midpoint rule on a log-spaced grid
    double acc = 0.0;
    const int n = 400000;
    const double lmin = std::log(1e-6), lmax = std::log(60.0);
    const double dl = (lmax - lmin) / n;
    for (int i = 0; i < n; ++i) {
        const double v = std::exp(lmin + (i + 0.5) * dl);
        acc += (std::norm(mw.ft(v)) + std::norm(mw.ft(-v))) * dl;
    }
    CHECK_THAT(acc, WithinRel(1.0, 1e-4));

    const CwtFrame frame(mw);
    const PhasePoint p{0.2, -16.0, 1.0};
    for (double z : {-32.0, -20.0, 5.0}) CHECK(std::abs(frame.ft(p, z) - numeric_ft(frame, p, z)) < 1e-6);
    CHECK_THAT(numeric_energy(frame, p), WithinRel(mw.energy(), 1e-6));
    CHECK_THROWS_AS(frame.eval({0.0, 0.0, 1.0}, 0.0), Error);
}
