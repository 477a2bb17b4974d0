#include <gtest/gtest.h>

#include <random>

#include "common.hpp"
#include "oracles.hpp"

using namespace wilsontf;

namespace {

Signal random_signal(const GridSpec& g, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> N01;
    Signal s(g, 1);
    for (auto& v : s.values) v = {N01(rng), N01(rng)};
    return s;
}

}  // namespace

TEST(Grid, GaussianSamples) {
    const GridSpec g{8, 16};
    const Signal f = sample(FunctionSpec::gaussian(1), g);
    EXPECT_DOUBLE_EQ(f[g.index_of(0)].real(), 1.0);
    EXPECT_NEAR(f[g.index_of(1)].real(), 0.0432139, 1e-7);
    EXPECT_NEAR(f[g.index_of(1)].real(), std::exp(-pi), 1e-15);
}

TEST(Grid, SechAtOrigin) {
    const GridSpec g{8, 16};
    EXPECT_DOUBLE_EQ(sample(FunctionSpec::sech(), g)[g.index_of(0)].real(), 1.0);
}

TEST(Grid, HermiteMatchesExplicitPolynomials) {
    for (int k = 0; k <= 4; ++k)
        for (double x : {-2.3, -0.7, 0.0, 0.4, 1.1, 3.0})
            EXPECT_NEAR(FunctionSpec::hermite(k)(x), oracle::hermite_function(k, x), 1e-13) << "k=" << k << " x=" << x;
}

TEST(Grid, BadInputsRejected) {
    EXPECT_THROW(parse_function_spec("airy(1)"), std::invalid_argument);
    EXPECT_THROW(sample(FunctionSpec::gaussian(1), GridSpec{8, 16}, 3), std::invalid_argument);
    EXPECT_THROW((GridSpec{7.3, 3}.validate()), std::invalid_argument);
    EXPECT_THROW(shift_modulate(sample(FunctionSpec::gaussian(1), GridSpec{8, 16}), {0.01}, {0}), std::invalid_argument);
}

TEST(Grid, InnerGaussianClosedForm) {
    const GridSpec g{8, 32};
    const Signal f = sample(FunctionSpec::gaussian(1), g);
    EXPECT_NEAR(inner(f, f).real(), std::pow(2.0, -0.5), 1e-10);
    EXPECT_NEAR(std::abs(inner(f, Signal(g, 1))), 0.0, 0.0);
}

TEST(Grid, HermiteOrthogonality) {
    for (int R : {32, 64}) {
        const GridSpec g{8, R};
        const Signal h0 = sample(FunctionSpec::hermite(0), g), h1 = sample(FunctionSpec::hermite(1), g);
        EXPECT_LT(std::abs(inner(h0, h1)), 1e-14);
        EXPECT_NEAR(inner(h1, h1).real(), 1.0, 1e-12);
    }
}

TEST(Grid, InnerAccumulatesInIndexOrder) {
    const GridSpec g{8, 8};
    const Signal a = random_signal(g, 1), b = random_signal(g, 2);
    EXPECT_EQ(inner(a, b), oracle::inner(a.values, b.values, g.R));
}

// Smooth integrands only: bspline(2) and subexp(h,1) have derivative jumps, so
// the trapezoid rule is only algebraically accurate for them.
TEST(Grid, QuadratureConsistencyUnderRefinement) {
    const std::vector<FunctionSpec> smooth{FunctionSpec::gaussian(1), FunctionSpec::gaussian(2),
                                           FunctionSpec::hermite(1),  FunctionSpec::hermite(3),
                                           FunctionSpec::sech(),      FunctionSpec::subexp(1, 0.5)};
    for (double T : {8.0, 16.0})
        for (const auto& a : smooth)
            for (const auto& b : smooth) {
                const cd coarse = inner(sample(a, {T, 32}), sample(b, {T, 32}));
                const cd fine = inner(sample(a, {T, 64}), sample(b, {T, 64}));
                EXPECT_LT(std::abs(coarse - fine), 1e-8) << a.str() << " x " << b.str() << " T=" << T;
            }
}

TEST(Grid, DftOfGaussianIsGaussian) {
    const GridSpec g{8, 32};
    const Signal fh = dft(sample(FunctionSpec::gaussian(1), g));
    const Signal ref = sample(FunctionSpec::gaussian(1), g.dual());
    EXPECT_LT(max_abs_diff(fh, ref), 1e-10);
}

TEST(Grid, DftMatchesNaiveSum) {
    const GridSpec g{8, 8};
    const Signal f = random_signal(g, 3);
    const auto ref = oracle::naive_dft(f.values, 8, 8);
    const Signal fh = dft(f);
    double worst = 0;
    for (std::size_t k = 0; k < ref.size(); ++k) worst = std::max(worst, std::abs(fh[k] - ref[k]));
    EXPECT_LT(worst, 1e-12);
}

TEST(Grid, DftRoundTripAndPlancherel) {
    for (const GridSpec& g : {GridSpec{8, 32}, GridSpec{16, 32}, GridSpec{4, 6}}) {
        const Signal f = random_signal(g, 4);
        const Signal fh = dft(f);
        const Signal back = dft(fh, Direction::inverse);
        EXPECT_TRUE(back.grid == g);
        EXPECT_LT(max_abs_diff(back, f), 1e-12);
        EXPECT_LT(std::abs(norm(fh) - norm(f)) / norm(f), 1e-12);
    }
}

TEST(Grid, BsplineSpectrumIsSincCubed) {
    const GridSpec g{8, 32};
    const Signal fh = dft(sample(FunctionSpec::bspline(2), g));
    std::vector<EnvelopePoint> pts;
    double worst = 0;
    for (std::size_t k = 0; k < fh.size(); ++k) {
        const double xi = fh.grid.x(k);
        const double sinc = xi == 0 ? 1.0 : std::sin(pi * xi) / (pi * xi);
        worst = std::max(worst, std::abs(fh[k] - sinc * sinc * sinc));
        pts.push_back({std::abs(xi), std::abs(fh[k])});
    }
    // periodization of a |xi|^-3 tail at spacing R
    EXPECT_LT(worst, 1e-4);
    std::vector<double> lx, ly;
    for (const auto& p : record_envelope(pts))
        if (p.r >= 4 && p.r <= g.R / 4.0) {
            lx.push_back(std::log(p.r));
            ly.push_back(std::log(p.value));
        }
    ASSERT_GE(lx.size(), 3u);
    const double slope = fit_line(lx, ly).slope;
    EXPECT_GE(slope, -3.5);
    EXPECT_LE(slope, -2.5);
}

TEST(Grid, ShiftModulate) {
    const GridSpec g{8, 32};
    const Signal f = sample(FunctionSpec::sech(), g);
    EXPECT_EQ(max_abs_diff(shift_modulate(f, {0}, {0}), f), 0.0);
    const Signal s = shift_modulate(f, {1.25}, {3.5});
    EXPECT_LT(std::abs(norm(s) - norm(f)), 1e-12);
    const Signal moved = shift_modulate(sample(FunctionSpec::gaussian(1), g), {1}, {0});
    EXPECT_NEAR(moved[g.index_of(1)].real(), 1.0, 1e-15);
}

TEST(Grid, SignalJsonRoundTrip) {
    const GridSpec g{4, 8};
    const Signal f = random_signal(g, 5);
    const Signal back = signal_from_json(json::parse(to_json(f).dump()));
    EXPECT_TRUE(back.grid == g);
    EXPECT_EQ(max_abs_diff(back, f), 0.0);
    EXPECT_THROW(signal_from_json(json::parse(R"({"grid":{"T":4,"R":8},"dim":1,"values":[[1,0]]})")), ParseError);
}

TEST(Grid, ParallelStftIsBitIdentical) {
    const Signal f = sample(FunctionSpec::sech(), wtest::grid()), phi = wtest::window()->psi;
    set_threads(1);
    const PhasePlaneArray a = stft(f, phi);
    set_threads(4);
    const PhasePlaneArray b = stft(f, phi);
    set_threads(0);
    EXPECT_TRUE(a.values == b.values);
}
