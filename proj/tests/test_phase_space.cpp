#include <catch_amalgamated.hpp>

#include <boost/math/distributions/chi_squared.hpp>
#include <random>

#include "ltft/phase_space.hpp"

using namespace ltft;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("LTFT domain box arithmetic") {
    const LTFTParams params = LTFTParams::constant(3.0, 8.0, 8.0, 64.0);
    const PhaseDomain d = ltft_domain(1024, 1024, 1.0, params);
    CHECK_THAT(2.0 * d.x_half, WithinRel(3.0, 1e-15));
    CHECK_THAT(d.omega_hi - d.omega_lo, WithinRel(512.0, 1e-15));
    CHECK_THAT(d.measure(), WithinRel(1536.0, 1e-15));
    CHECK_THAT(ltft_domain(1024, 1024, 1.0, params, true).measure(), WithinRel(3072.0, 1e-15));
    CHECK_THROWS_AS(ltft_domain(1024, 1024, 0.5, params), Error);

    const double r1 = ltft_domain(4096, 4096, 1.0, params).measure() / ltft_domain(2048, 2048, 1.0, params).measure();
    CHECK_THAT(r1, WithinRel(2.0, 1e-12));  // R proportional to M keeps the x extent fixed
    const double r2 = ltft_domain(1 << 16, 256, 1.0, params).measure() / ltft_domain(1 << 15, 256, 1.0, params).measure();
    CHECK_THAT(r2, WithinRel(2.0, 0.01));

    CHECK(d.contains({0.0, 100.0, 4.0}));
    CHECK_FALSE(d.contains({0.0, 0.0, 4.0}));
    CHECK_FALSE(d.contains({0.0, 513.0, 4.0}));
    CHECK_FALSE(d.contains({1.6, 100.0, 4.0}));
    CHECK_FALSE(d.contains({0.0, 100.0, 9.0}));
}

TEST_CASE("CWT domain measure") {
    const PhaseDomain d = cwt_domain(256, 2.0, 0.5);
    const double closed = cwt_domain_measure(256, 2.0, 0.5);
    CHECK_THAT(d.measure(), WithinRel(closed, 1e-12));
    // independent: 2 ∫ 2 (1/2 + S/w) dw on a log grid
    const double lo = 1.0 / 512.0, hi = 512.0;
    const double numeric = 2.0 * composite_gauss_legendre(
        [&](double l) { const double w = std::exp(l); return 2.0 * (0.5 + 0.5 / w) * w; }, std::log(lo), std::log(hi), 64);
    CHECK_THAT(closed, WithinRel(numeric, 1e-10));
    CHECK(closed <= 3.0 * 2.0 * 256.0);
    CHECK(cwt_domain(1, 2.0, 0.5).measure() > 0.0);
    CHECK_THAT(cwt_domain_measure(256, 2.0, 1e-12), WithinRel(2.0 * (512.0 - 1.0 / 512.0), 1e-9));

    const long m0 = cwt_volume_threshold(2.0, 0.5, 4096);
    CHECK(m0 >= 1);
    for (long m = m0; m <= 4096; m += 7) CHECK(cwt_domain_measure(m, 2.0, 0.5) <= 6.0 * m);
    if (m0 > 1) CHECK(cwt_domain_measure(m0 - 1, 2.0, 0.5) > 6.0 * (m0 - 1));
}

TEST_CASE("uniform sampling is deterministic, inside the domain and uniform") {
    const LTFTParams params = LTFTParams::constant(3.0, 8.0, 8.0, 64.0);
    const PhaseDomain d = ltft_domain(256, 256, 1.0, params);
    const auto a = sample_uniform(d, 1000, 42);
    const auto b = sample_uniform(d, 1000, 42);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].x == b[i].x);
        CHECK(a[i].omega == b[i].omega);
        CHECK(a[i].tau == b[i].tau);
        CHECK(d.contains(a[i]));
    }

    const std::size_t K = 1000000;
    const auto pts = sample_uniform(d, K, 7);
    double mean_x = 0.0;
    std::vector<double> counts(512, 0.0);
    for (const auto& p : pts) {
        mean_x += p.x;
        const auto bx = std::min<std::size_t>(7, static_cast<std::size_t>((p.x + d.x_half) / (2.0 * d.x_half) * 8.0));
        const auto bw = std::min<std::size_t>(7, static_cast<std::size_t>((p.omega - d.omega_lo) / (d.omega_hi - d.omega_lo) * 8.0));
        const auto bt = std::min<std::size_t>(7, static_cast<std::size_t>((p.tau - d.tau_min) / (d.tau_max - d.tau_min) * 8.0));
        counts[bx * 64 + bw * 8 + bt] += 1.0;
    }
    mean_x /= static_cast<double>(K);
    const double sigma = 2.0 * d.x_half / std::sqrt(12.0 * static_cast<double>(K));
    CHECK(std::abs(mean_x) < 3.0 * sigma);
    const double expected = static_cast<double>(K) / 512.0;
    double chi2 = 0.0;
    for (double c : counts) chi2 += (c - expected) * (c - expected) / expected;
    const boost::math::chi_squared dist(511.0);
    CHECK(boost::math::cdf(boost::math::complement(dist, chi2)) > 0.01);
}

TEST_CASE("CWT domain sampling follows the widening time extent") {
    const PhaseDomain d = cwt_domain(16, 2.0, 0.5);
    const std::size_t K = 400000;
    const auto pts = sample_uniform(d, K, 3);
    // compare the fraction of samples with |omega| < 1 against the measure fraction
    std::size_t low = 0;
    for (const auto& p : pts) {
        CHECK(d.contains(p));
        if (std::abs(p.omega) < 1.0) ++low;
    }
    const double part = 2.0 * (2.0 * 0.5 * (1.0 - d.omega_lo) + 2.0 * 0.5 * std::log(1.0 / d.omega_lo));
    const double frac = part / d.measure();
    const double se = std::sqrt(frac * (1.0 - frac) / static_cast<double>(K));
    CHECK(std::abs(static_cast<double>(low) / static_cast<double>(K) - frac) < 4.0 * se);
}

namespace {

// Coefficient energy over omega in [w_lo, w_hi] by direct evaluation of the
// coefficients on an oversampled grid (no frame filter, no Plancherel).
double dense_energy(const Signal& s, const LTFTParams& params, double w_lo, double w_hi, int osf) {
    const Signal fine = upsample(s, osf);
    const LtftFrame frame(params);
    const QuadratureNodes taus = composite_gauss_nodes(params.tau_min, params.tau_max, 1);
    const double dw = 0.125;
    const double x_half = 0.5 * static_cast<double>(s.size()) / s.rate + max_half_support(params) + 0.1;
    const double dx = 1.0 / fine.rate;
    std::vector<cplx> scratch;
    double acc = 0.0;
    for (double w = w_lo + 0.5 * dw; w < w_hi; w += dw)
        for (std::size_t j = 0; j < taus.nodes.size(); ++j) {
            double row = 0.0;
            for (double x = -x_half; x <= x_half; x += dx)
                row += std::norm(analysis_coeff(fine, frame, {x, w, taus.nodes[j]}, scratch));
            acc += row * dx * dw * taus.weights[j] * params.tau_density();
        }
    return acc;
}

Signal tone_burst(std::size_t n, double rate, double freq) {
    Signal s = Signal::centered(std::vector<cplx>(n), rate);
    const double half = s.end_time();
    for (std::size_t k = 0; k < n; ++k) {
        const double t = s.time(k);
        s.samples[k] = hann_eval(0.5 * t / half) * std::cos(2.0 * std::numbers::pi * freq * t);
    }
    return s;
}

}  // namespace

TEST_CASE("truncation energy matches direct coefficient integration") {
    const double rate = 32.0;
    const LTFTParams params = LTFTParams::constant(3.0, 5.0, 4.0, 12.0);
    const Signal s = tone_burst(33, rate, 6.0);
    const PhaseDomain dom = ltft_domain(32, rate, 1.0, params);
    const PhaseDomain ref = ltft_domain(32, rate, 4.0, params);
    const LVDReport r = truncation_ratio(params, s, dom, ref);

    const double e_ref = dense_energy(s, params, 0.0, ref.omega_hi, 5);
    const double e_out = dense_energy(s, params, dom.omega_hi, ref.omega_hi, 5);
    CHECK_THAT(r.trunc_error, WithinRel(std::sqrt(e_out / e_ref), 0.01));
    CHECK(r.trunc_error > 0.0);
}

TEST_CASE("truncation ratio behaviour") {
    const double rate = 256.0;
    const LTFTParams params = LTFTParams::constant(3.0, 8.0, 0.05 * rate, 0.4 * rate);
    const Signal s = tone_burst(257, rate, rate / 8.0);
    const PhaseDomain ref = ltft_domain(256, rate, 16.0, params);
    CHECK(truncation_ratio(params, s, ref, ref).trunc_error == 0.0);
    double previous = 1.0;
    for (double W : {1.0, 2.0, 4.0}) {
        const LVDReport r = truncation_ratio(params, s, ltft_domain(256, rate, W, params), ltft_domain(256, rate, 4.0 * W, params));
        INFO("W = " << W);
        CHECK(r.trunc_error < previous + 1e-3);
        CHECK(r.psi_l1 > 0.0);
        previous = r.trunc_error;
        if (W == 1.0) CHECK(r.trunc_error < 0.05);
    }
    PhaseDomain narrow = ltft_domain(256, rate, 1.0, params);
    narrow.x_half = 0.1;
    CHECK_THROWS_AS(truncation_ratio(params, s, narrow, ref), Error);
}

TEST_CASE("CWT truncation shrinks as the domain widens") {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> g;
    std::vector<cplx> c(2 * 16 + 1);
    for (auto& v : c) v = {g(rng), g(rng)};
    const Signal s = enveloped_trig_poly(c, Window::hann(), 128.0);
    const MotherWavelet mw;
    const PhaseDomain dom = cwt_domain(16, 4.0, 0.5);
    const PhaseDomain ref = cwt_domain(16, 64.0, 0.5);
    const LVDReport r = cwt_truncation_ratio(mw, s, dom, ref);
    CHECK(r.trunc_error < 0.15);
    CHECK(r.trunc_error > 0.0);
    const LVDReport narrow = cwt_truncation_ratio(mw, s, cwt_domain(16, 1.0, 0.5), ref);
    CHECK(narrow.trunc_error > r.trunc_error);
    CHECK_FALSE(r.reference_too_small);
}

TEST_CASE("enveloped trigonometric polynomials and the class R_C") {
    std::vector<cplx> c(2 * 4 + 1);
    c[4] = 1.0;
    const Signal s = enveloped_trig_poly(c, Window::hann(), 64.0);
    CHECK(s.origin == -0.5);
    CHECK_THAT(s.end_time(), WithinAbs(0.5, 1e-15));
    for (std::size_t k = 0; k < s.size(); ++k) CHECK_THAT(s.samples[k].real(), WithinAbs(hann_eval(s.time(k)), 1e-15));
    CHECK(rc_membership(s, Window::hann(), 2.0));
    CHECK_FALSE(rc_membership(s, Window::hann(), 1.0));

    std::mt19937_64 rng(1);
    std::normal_distribution<double> g;
    int accepted = 0;
    for (int trial = 0; trial < 20; ++trial) {
        for (auto& v : c) v = {g(rng), g(rng)};
        accepted += rc_membership(enveloped_trig_poly(c, Window::hann(), 64.0), Window::hann(), 100.0) ? 1 : 0;
    }
    CHECK(accepted >= 19);
}
