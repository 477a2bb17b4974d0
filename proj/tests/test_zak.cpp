#include <gtest/gtest.h>

#include <numeric>

#include "common.hpp"
#include "oracles.hpp"

using namespace wilsontf;

TEST(Zak, MatchesDirectSum) {
    const GridSpec g{8, 16};
    const Signal f = sample(FunctionSpec::sech(), g);
    const ZakArray Z = zak(f);
    double worst = 0;
    for (int j = 0; j < Z.rows(); ++j)
        for (int m = 0; m < Z.cols(); ++m) worst = std::max(worst, std::abs(Z.at(j, m) - oracle::zak(f.values, 8, 16, j, m)));
    EXPECT_LT(worst, 1e-13);
}

TEST(Zak, GaussianZeroAtHalfHalf) {
    const GridSpec& g = wtest::grid();
    const ZakArray Z = zak(sample(FunctionSpec::gaussian(1), g));
    const int jh = g.R / 2, mh = static_cast<int>(g.T);
    EXPECT_LT(std::abs(Z.at(jh, mh)), 1e-6);
    double elsewhere = 1e300;
    for (int j = 0; j < Z.rows(); ++j)
        for (int m = 0; m < Z.cols(); ++m) {
            const double dx = (j - jh) / double(g.R), dw = (m - mh) / (2 * g.T);
            if (dx * dx + dw * dw > 0.05 * 0.05) elsewhere = std::min(elsewhere, std::abs(Z.at(j, m)));
        }
    EXPECT_GT(elsewhere, 0.0);
}

TEST(Zak, QuasiPeriodicityAndZero) {
    const GridSpec& g = wtest::grid();
    EXPECT_LT(zak_quasi_periodicity_residual(sample(FunctionSpec::gaussian(1), g)), 1e-10);
    const ZakArray Z = zak(Signal(g, 1));
    for (const auto& v : Z.values) EXPECT_EQ(v, cd(0));
}

TEST(Zak, InverseRoundTrip) {
    const GridSpec& g = wtest::grid();
    for (const auto& f : {FunctionSpec::gaussian(1), FunctionSpec::hermite(3)}) {
        const Signal s = sample(f, g);
        EXPECT_LT(max_abs_diff(inverse_zak(zak(s)), s), 1e-12) << f.str();
    }
}

TEST(Zak, InverseOfOnesIsComb) {
    const GridSpec g{8, 16};
    ZakArray Z{g, std::vector<cd>(static_cast<std::size_t>(g.R) * 16, cd(1))};
    const Signal s = inverse_zak(Z);
    // (1/2T) sum_w exp(2 pi i k w) is 1 at k = 0 and 0 otherwise: one unit per offset on [0, 1)
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double x = g.x(i);
        EXPECT_NEAR(std::abs(s[i]), (x >= 0 && x < 1) ? 1.0 : 0.0, 1e-14) << x;
    }
    double parseval = 0;
    for (const auto& v : Z.values) parseval += std::norm(v);
    EXPECT_NEAR(norm(s) * norm(s), parseval / (2 * g.T) / g.R, 1e-12);
}

TEST(Zak, NonIntegerTRejected) { EXPECT_THROW(zak(sample(FunctionSpec::gaussian(1), GridSpec{7.5, 16})), std::invalid_argument); }

TEST(TightWindow, TightRealEven) {
    const TightWindow& w = *wtest::window();
    EXPECT_LT(w.tightness_residual, 1e-9);
    EXPECT_LE(w.max_imag, 1e-12);
    const std::size_t N = w.psi.size();
    double odd = 0;
    for (std::size_t j = 1; j < N; ++j) odd = std::max(odd, std::abs(w.psi[j] - w.psi[N - j]));
    EXPECT_LT(odd, 1e-9);
}

TEST(TightWindow, DecayRateOnInnerWindow) {
    const TightWindow& w = *wtest::window();
    const auto fit = fit_exponential_decay(w.psi, Domain::time, 2, 12);
    EXPECT_GE(fit.a, 0.5);
    double sup = 0;
    for (std::size_t j = 0; j < w.psi.size(); ++j) {
        const double x = std::abs(w.psi.grid.x(j));
        if (x <= 12) sup = std::max(sup, std::abs(w.psi[j]) * std::exp(0.5 * x));
    }
    EXPECT_TRUE(std::isfinite(sup));
    EXPECT_LT(sup, 10.0);
}

TEST(TightWindow, MultiplierConstant) {
    const auto m = frame_multiplier(zak(wtest::window()->psi));
    const double mean = std::accumulate(m.begin(), m.end(), 0.0) / m.size();
    double var = 0;
    for (double v : m) var += (v - mean) * (v - mean);
    EXPECT_LT(std::sqrt(var / m.size()), 1e-10);
    EXPECT_NEAR(mean, 2.0, 1e-12);
}

TEST(TightWindow, Idempotent) {
    const TightWindow& w = *wtest::window();
    EXPECT_LT(max_abs_diff(tight_window(w.psi).psi, w.psi), 1e-10);
}

TEST(TightWindow, GaborFrameBoundTwo) {
    const GridSpec g{8, 8};
    const TightWindow w = tight_window(sample(FunctionSpec::gaussian(1), g));
    std::vector<double> psi(w.psi.size());
    for (std::size_t i = 0; i < psi.size(); ++i) psi[i] = w.psi[i].real();
    for (const auto& f : {FunctionSpec::sech(), FunctionSpec::hermite(2), FunctionSpec::bspline(2)}) {
        const Signal s = sample(f, g);
        const double e = oracle::gabor_energy(s.values, psi, 8, 8);
        const double n2 = norm(s) * norm(s);
        EXPECT_LT(std::abs(e - 2 * n2) / (2 * n2), 1e-6) << f.str();
    }
}

TEST(TightWindow, DegenerateSeedRejected) {
    const GridSpec g{8, 16};
    // odd seed: Zg(x) + Zg(x + 1/2) vanish together at x = 0, w = 0
    Signal odd = sample(FunctionSpec::hermite(1), g);
    EXPECT_THROW(tight_window(odd), std::invalid_argument);
}

TEST(DecayFit, ExactExponential) {
    const Signal f = sample(FunctionSpec::subexp(2, 1), wtest::grid());
    const auto fit = fit_exponential_decay(f, Domain::time);
    EXPECT_NEAR(fit.a, 2.0, 0.05);
    EXPECT_GT(fit.r2, 0.999);
}

TEST(DecayFit, GaussianIsSuperExponential) {
    // wide enough to stay above the 1e-14 floor out to |x| = 6
    const Signal f = sample(FunctionSpec::gaussian(0.25), wtest::grid());
    const auto narrow = fit_exponential_decay(f, Domain::time, 2, 4);
    const auto wide = fit_exponential_decay(f, Domain::time, 2, 6);
    EXPECT_EQ(narrow.shape, "super-exponential");
    EXPECT_GT(wide.a, narrow.a);
}

TEST(DecayFit, BsplineFrequencyTailRejected) {
    const Signal f = sample(FunctionSpec::bspline(2), wtest::grid());
    try {
        const auto fit = fit_exponential_decay(f, Domain::frequency);
        EXPECT_TRUE(fit.r2 < 0.99 || fit.a < 0.3 || fit.shape == "sub-exponential")
            << "a=" << fit.a << " r2=" << fit.r2 << " shape=" << fit.shape;
    } catch (const std::invalid_argument&) {
        SUCCEED();
    }
}
