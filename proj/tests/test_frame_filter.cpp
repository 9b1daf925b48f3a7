#include <catch_amalgamated.hpp>

#include <filesystem>
#include <random>

#include "ltft/frame_filter.hpp"

using namespace ltft;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Ŝ(z) straight from the atom transforms: Gauss-Legendre in tau, composite
// Gauss-Legendre in omega with breakpoints at the band seams.
double brute_force_filter(const LTFTParams& params, double z, double w_lo, double w_hi) {
    const LtftFrame frame(params);
    const QuadratureNodes taus = composite_gauss_nodes(params.tau_min, params.tau_max, 6);
    double acc = 0.0;
    for (std::size_t j = 0; j < taus.nodes.size(); ++j) {
        const double tau = taus.nodes[j];
        const double a = params.a(tau), b = params.b(tau);
        std::vector<double> cuts{w_lo, w_hi};
        for (double c : {-b, -a, a, b, z})
            if (c > w_lo && c < w_hi) cuts.push_back(c);
        std::sort(cuts.begin(), cuts.end());
        double inner = 0.0;
        for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
            const int panels = static_cast<int>(std::ceil((cuts[k + 1] - cuts[k]) * tau / a * 4.0)) + 4;
            inner += composite_gauss_legendre(
                [&](double w) { return std::norm(frame.ft({0.0, w, tau}, z)); }, cuts[k], cuts[k + 1], panels);
        }
        acc += taus.weights[j] * params.tau_density() * inner;
    }
    return acc;
}

Signal random_band_limited(std::size_t n, double rate, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    Spectrum sp = dft(Signal::zeros(n, rate, -0.5 * static_cast<double>(n - 1) / rate));
    for (std::size_t i = 0; i < sp.size(); ++i)
        if (std::abs(sp.frequency(i)) < 0.25 * rate) sp.bins[i] = {g(rng), g(rng)};
    return idft(sp);
}

}  // namespace

TEST_CASE("filter matches brute-force integration of atom transforms") {
    const double rate = 256.0;
    const LTFTParams params = LTFTParams::constant(3.0, 8.0, 0.05 * rate, 0.4 * rate);
    const SpectralEnergyTable table(params.window);
    const double inf = std::numeric_limits<double>::infinity();
    const double w_max = 0.4 * rate + 60.0 * 0.4 * rate / 3.0;
    const std::vector<double> zs{0.0, 3.0, 12.8, 40.0, 102.4, 127.0, -55.0};
    const auto values = integrate_filter(params, table, zs, {{-inf, inf}});
    for (std::size_t i = 0; i < zs.size(); ++i) {
        const double ref = brute_force_filter(params, zs[i], -w_max, w_max);
        INFO("z = " << zs[i]);
        CHECK_THAT(values[i].total(), WithinRel(ref, 1e-4));
    }

    // restricted frequency sets
    const std::vector<double> z2{20.0, 90.0};
    const auto pos = integrate_filter(params, table, z2, {{0.0, 64.0}});
    for (std::size_t i = 0; i < z2.size(); ++i)
        CHECK_THAT(pos[i].total(), WithinRel(brute_force_filter(params, z2[i], 0.0, 64.0), 1e-4));
}

TEST_CASE("filter is even, close to the window energy, and bands sum") {
    const LTFTParams params = LTFTParams::constant(3.0, 8.0, 25.6, 204.8);
    const FrameFilter ff = build_frame_filter(params, 256.0, 0.5);
    CHECK(ff.a_est() > 0.0);
    CHECK(ff.a_est() <= ff.b_est());
    for (double z : {0.0, 10.0, 25.6, 100.0, 204.8, 250.0}) {
        CHECK_THAT(ff(z), WithinRel(ff(-z), 1e-15));
        CHECK_THAT(ff(z), WithinRel(0.375, 0.1));
        const BandValues b = ff.bands(z);
        CHECK_THAT(b.total(), WithinRel(ff(z), 1e-12));
    }
    // deep inside (a, b) the filter is nearly flat
    CHECK_THAT(ff(100.0), WithinRel(ff(101.0), 1e-3));
}

TEST_CASE("pure STFT limit reproduces the window energy") {
    // with a tiny mid band the family is an STFT family almost everywhere
    const LTFTParams params = LTFTParams::constant(4.0, 4.0, 10.0, 10.000001);
    const FrameFilter ff = build_frame_filter(params, 64.0, 1.0);
    CHECK_THAT(ff(0.0), WithinRel(0.375, 1e-6));
    CHECK_THAT(ff(50.0), WithinRel(0.375, 1e-6));
}

TEST_CASE("frame operator round trip and inverse") {
    const double rate = 128.0;
    const Signal s = random_band_limited(129, rate, 5);
    const FrameFilter ff = build_frame_filter_for(LTFTParams::constant(3.0, 8.0, 6.4, 51.2), rate, s.size());
    CHECK(relative_error(apply_inverse_frame_op(apply_frame_op(s, ff), ff), s) < 1e-6);

    // a bin-centred tone is scaled by 1/Ŝ(z0)
    const Spectrum sp = dft(s);
    const double z0 = sp.frequency(sp.size() / 2 + 10);
    Signal tone = Signal::zeros(s.size(), rate, s.origin);
    for (std::size_t n = 0; n < tone.size(); ++n) tone.samples[n] = std::polar(1.0, 2.0 * std::numbers::pi * z0 * tone.time(n));
    const Signal out = apply_inverse_frame_op(tone, ff);
    for (std::size_t n = 0; n < tone.size(); n += 17) CHECK(std::abs(out.samples[n] - tone.samples[n] / ff(z0)) < 1e-9);

    const FrameFilter one = FrameFilter::constant(1.0, 64.0, 1.0);
    CHECK(relative_error(apply_inverse_frame_op(s, one), s) < 1e-12);
    const FrameFilter zero = FrameFilter::constant(0.0, 64.0, 1.0);
    try {
        apply_inverse_frame_op(s, zero);
        FAIL("expected an ill-conditioned filter error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::IllConditionedFilter);
    }
}

TEST_CASE("degenerate frames and quadrature failures are reported") {
    const LTFTParams params = LTFTParams::constant(3.0, 8.0, 6.4, 51.2);
    FilterQuadrature strict;
    strict.floor = 1.0;
    try {
        build_frame_filter(params, 64.0, 1.0, strict);
        FAIL("expected a frame degeneracy error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::FrameDegeneracy);
    }
    FilterQuadrature impossible;
    impossible.rel_tol = 0.0;
    impossible.max_doublings = 1;
    try {
        build_frame_filter(params, 64.0, 1.0, impossible);
        FAIL("expected a quadrature failure");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::QuadratureFailure);
    }
}

TEST_CASE("cache files round trip and are keyed") {
    const auto dir = std::filesystem::temp_directory_path() / "ltft_filter_cache_test";
    std::filesystem::remove_all(dir);
    const LTFTParams params = LTFTParams::constant(3.0, 8.0, 6.4, 51.2);
    const FrameFilter built = cached_frame_filter(dir, params, 128.0, 129);
    const FrameFilter loaded = cached_frame_filter(dir, params, 128.0, 129);
    REQUIRE(built.size() == loaded.size());
    for (std::size_t i = 0; i < built.size(); ++i) CHECK(built.values()[i].total() == loaded.values()[i].total());
    CHECK(built.key() == loaded.key());
    const auto path = dir / ("frame_filter_" + built.key() + ".txt");
    CHECK_FALSE(load_frame_filter(path, "0000000000000000").has_value());
    CHECK(frame_filter_key(params, 128.0, 129, {}) != frame_filter_key(params, 128.0, 257, {}));
    std::filesystem::remove_all(dir);
}
