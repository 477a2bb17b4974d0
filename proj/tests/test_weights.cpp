#include <gtest/gtest.h>

#include "common.hpp"
#include "oracles.hpp"

using namespace wilsontf;

namespace {

Signal g1(const GridSpec& g = wtest::grid()) { return sample(FunctionSpec::gaussian(1), g); }

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST(Weights, SubexpModerateAndBeurlingDomar) {
    const auto rep = check_weight_axioms(WeightSpec::subexp(1, 2), 10000, 3);
    EXPECT_EQ(rep.pairs, 10000u);
    EXPECT_EQ(rep.violations, 0u);
    EXPECT_EQ(rep.C, 1.0);
    ASSERT_EQ(rep.beurling_domar.size(), 1u);
    EXPECT_TRUE(rep.beurling_domar[0].bounded);
    EXPECT_LT(rep.beurling_domar[0].last_term, 1e-6);
    // last partial sum against the integral comparison sum_{n > N} n^{-3/2} < 2 / sqrt(N - 1)
    const auto& p = rep.beurling_domar[0].partial;
    EXPECT_LT(p[2] - p[1], 2 / std::sqrt(999.0));
}

TEST(Weights, ProductWeightAxes) {
    const auto rep = check_weight_axioms(WeightSpec::product(0.5, 1.5), 2000, 4);
    EXPECT_EQ(rep.violations, 0u);
    ASSERT_EQ(rep.beurling_domar.size(), 2u);
    for (const auto& ax : rep.beurling_domar) EXPECT_TRUE(ax.bounded);
}

TEST(Weights, PolySandwich) {
    const auto rep = check_weight_axioms(WeightSpec::poly(2), 1000, 5);
    EXPECT_TRUE(rep.sandwich_holds);
    EXPECT_GT(rep.sandwich_r, 0);
    EXPECT_LE(rep.sandwich_r, 2 * std::log(2.0) + 1e-12);
    EXPECT_THROW(check_weight_axioms(WeightSpec::poly(2), 99, 5), std::invalid_argument);
}

TEST(Weights, WeightValues) {
    EXPECT_EQ(WeightSpec::subexp(1, 2)(0), 1.0);
    EXPECT_EQ(WeightSpec::product(1, 2)(0, 0), 1.0);
    EXPECT_NEAR(WeightSpec::subexp(1, 2)(4), std::exp(2.0), 1e-12);
    EXPECT_NEAR(WeightSpec::reciprocal(WeightSpec::product(1, 2))(4, 9), std::exp(-5.0), 1e-15);
    EXPECT_EQ(parse_weight("reciprocal(product(1,2))").str(), "reciprocal(product(1,2))");
    EXPECT_THROW(parse_weight("cubic(1)"), std::invalid_argument);
}

TEST(WeightedL2, GaussianFiniteAndStable) {
    const auto w = WeightSpec::subexp(1, 2);
    const auto a = weighted_l2_norm(g1(), w), b = weighted_l2_norm(g1({16, 64}), w);
    EXPECT_TRUE(a.finite());
    EXPECT_LT(rel(a.value, b.value), 1e-6);
    EXPECT_NEAR(weighted_l2_norm(sample(FunctionSpec::sech(), wtest::grid()), WeightSpec::one()).value,
                norm(sample(FunctionSpec::sech(), wtest::grid())), 1e-15);
}

TEST(WeightedL2, BsplineSpectrumDivergent) {
    const Signal fh = dft(sample(FunctionSpec::bspline(2), wtest::grid()));
    const auto r = weighted_l2_norm(fh, WeightSpec::subexp(1, 2));
    EXPECT_FALSE(r.finite()) << r.verdict.reason;
}

TEST(Coorbit, UnweightedIsProductOfSquaredNorms) {
    const Signal f = sample(FunctionSpec::sech(), wtest::grid()), phi = wtest::window()->psi;
    const auto r = coorbit_norm(f, phi, 0, 2);
    EXPECT_TRUE(r.squared);
    EXPECT_LT(rel(r.value, std::pow(norm(phi) * norm(f), 2)), 1e-6);
}

TEST(Coorbit, GaussianFiniteUnderRefinement) {
    const auto a = coorbit_norm(g1(), g1(), 1, 2);
    const auto b = coorbit_norm(g1({16, 64}), g1({16, 64}), 1, 2);
    EXPECT_TRUE(a.finite());
    EXPECT_LT(rel(a.value, b.value), 1e-6);
}

TEST(Coorbit, BsplineDivergentForPositiveH) {
    const Signal f = sample(FunctionSpec::bspline(2), wtest::grid());
    for (double h : {0.25, 0.5, 1.0, 2.0}) EXPECT_FALSE(coorbit_norm(f, g1(), h, 2).finite()) << h;
}

TEST(FourierCoorbit, GaussianSelfDual) {
    const auto fc = fourier_coorbit_norm(g1(), g1(), 1, 2);
    EXPECT_LT(rel(fc.report.value, coorbit_norm(g1(), g1(), 1, 2).value), 1e-6);
    const auto z = fourier_coorbit_norm(g1(), g1(), 0, 2);
    EXPECT_LT(rel(z.report.value, std::pow(norm(g1()), 4)), 1e-6);
}

TEST(FourierCoorbit, TwoRoutesOnSech) {
    const auto fc = fourier_coorbit_norm(sample(FunctionSpec::sech(), wtest::grid()), g1(), 1, 2);
    EXPECT_LT(fc.relative_gap, 1e-6);
}

TEST(Sandwich, GaussianStrict) {
    const auto s = lemma2_sandwich(g1(), g1(), 1, 2);
    EXPECT_TRUE(s.holds);
    EXPECT_LT(s.lower, s.value);
    EXPECT_LT(s.value, s.upper);
}

TEST(Sandwich, EqualityAtZero) {
    const auto s = lemma2_sandwich(g1(), g1(), 0, 2);
    const double ref = std::pow(norm(g1()), 4);
    EXPECT_LT(rel(s.lower, ref), 1e-8);
    EXPECT_LT(rel(s.value, ref), 1e-8);
    EXPECT_LT(rel(s.upper, ref), 1e-8);
}

TEST(Sandwich, SechMixedParameters) {
    EXPECT_TRUE(lemma2_sandwich(sample(FunctionSpec::sech(), wtest::grid()), g1(), 0.5, 1.5).holds);
    EXPECT_THROW(lemma2_sandwich(g1(), g1(), 1, 1), std::invalid_argument);
}

TEST(Modulation, UnweightedIsL2) {
    const Signal phi = wtest::normalized(g1());
    const Signal f = sample(FunctionSpec::hermite(4), wtest::grid());
    EXPECT_LT(rel(modulation_norm(f, phi, 2, 2, WeightSpec::product(0, 2)).value, norm(f)), 1e-6);
}

TEST(Modulation, SupNormIsGaussianPeak) {
    const auto r = modulation_norm(g1(), g1(), INFINITY, INFINITY, WeightSpec::product(0, 2));
    EXPECT_NEAR(r.value, std::pow(2.0, -0.5), 1e-6);
}

TEST(Modulation, ReciprocalWeightOnBoundedSignal) {
    Signal one(wtest::grid(), 1);
    for (auto& v : one.values) v = 1;
    const PhasePlaneArray V = stft(one, g1());
    for (double h : {0.25, 0.5, 1.0, 2.0})
        EXPECT_TRUE(modulation_norm(V, 2, 2, WeightSpec::reciprocal(WeightSpec::product(h, 2))).finite()) << h;
}

TEST(Modulation, CoorbitIsSquaredTensorModulation) {
    for (const auto& e : corpus()) {
        const PhasePlaneArray V = stft(sample(e.spec, wtest::grid()), g1());
        for (double h : {0.5, 1.0}) {
            const double m = modulation_norm(V, 2, 2, WeightSpec::tensor(WeightSpec::one(), WeightSpec::subexp(h, 2))).value;
            EXPECT_LT(rel(coorbit_norm(V, h, 2).value, m * m), 1e-8) << e.name << " h=" << h;
        }
    }
}

TEST(Modulation, WindowRobustness) {
    const Signal phi1 = g1();
    const Signal phi2 = wtest::window()->psi;  // tightened hermite(0), which is proportional to phi1
    std::vector<double> ratios;
    for (const auto& e : corpus()) {
        const Signal f = sample(e.spec, wtest::grid());
        const auto w = WeightSpec::product(0.5, 2);
        ratios.push_back(modulation_norm(f, phi1, 2, 2, w).value / modulation_norm(f, phi2, 2, 2, w).value);
    }
    const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
    EXPECT_LT(*hi / *lo, 5);
}

TEST(Sequence, UnweightedAndSingleEntry) {
    const auto c = analyze(sample(FunctionSpec::sech(), wtest::grid()), wtest::system());
    double e = 0;
    for (const auto& [idx, v] : c.entries) e += std::norm(v);
    EXPECT_NEAR(sequence_norm(c, 2, 2, 0, 2).value, std::sqrt(e), 1e-14);
    CoefficientTable one;
    one.entries[WilsonIndex(2, 4)] = 1;
    EXPECT_NEAR(sequence_norm(one, 2, 2, 1, 2).value, std::exp(2 * std::sqrt(2.0)), 1e-12);
    EXPECT_NEAR(std::exp(2 * std::sqrt(2.0)), 16.9188, 1e-4);
    const auto empty = sequence_norm(CoefficientTable{}, 2, 2, 1, 2);
    EXPECT_EQ(empty.value, 0);
    EXPECT_FALSE(empty.warning.empty());
}

TEST(Sequence, GaussianThreshold) {
    const auto c = analyze(g1(), wtest::system());
    const auto fit = fit_coefficient_decay(c, {2.0});
    EXPECT_TRUE(sequence_norm(c, 2, 2, 0.25, 2).finite());
    const auto big = sequence_norm(c, 2, 2, 1.5 * fit.k_hat, 2);
    EXPECT_FALSE(big.finite()) << "k_hat=" << fit.k_hat << " " << big.verdict.reason;
}

TEST(Sequence, AgreesWithModulationVerdicts) {
    for (const auto& e : corpus()) {
        const Signal f = sample(e.spec, wtest::grid());
        const auto c = analyze(f, wtest::system());
        const PhasePlaneArray V = stft(f, g1());
        for (double h : {0.0, 0.5, 1.0}) {
            const bool seq = sequence_norm(c, 2, 2, h, 2).finite();
            const bool mod = modulation_norm(V, 2, 2, WeightSpec::product(h, 2)).finite();
            EXPECT_EQ(seq, mod) << e.name << " h=" << h;
        }
    }
}

TEST(Norms, MonotoneInH) {
    const std::vector<double> hs{0, 0.25, 0.5, 1, 2};
    for (const auto& e : corpus()) {
        const Signal f = sample(e.spec, wtest::grid());
        const auto c = analyze(f, wtest::system());
        const PhasePlaneArray V = stft(f, g1());
        double ps = 0, pm = 0, pc = 0, pw = 0;
        for (double h : hs) {
            const double s = sequence_norm(c, 2, 2, h, 2).value;
            const double m = modulation_norm(V, 2, 2, WeightSpec::product(h, 2)).value;
            const double k = coorbit_norm(V, h, 2).value;
            const double w = weighted_l2_norm(f, WeightSpec::subexp(h, 2)).value;
            EXPECT_GE(s, ps) << e.name;
            EXPECT_GE(m, pm) << e.name;
            EXPECT_GE(k, pc) << e.name;
            EXPECT_GE(w, pw) << e.name;
            ps = s, pm = m, pc = k, pw = w;
        }
    }
}

TEST(Assess, Rules) {
    EXPECT_FALSE(assess({{1, 2, 3}, {1, 1.3, 1.7}, {1, 0.3, 0.4}, {}}, 1).finite);
    EXPECT_TRUE(assess({{1, 2, 3}, {1, 1, 1}, {1, 0, 0}, {}}, 1).finite);
    EXPECT_FALSE(assess({{1, 2, 3}, {1, 1.01, 1.02}, {1, 0.01, 0.01}, {}}, 1).finite);
    EXPECT_TRUE(assess({{1, 2, 3}, {1, 1.01, 1.015}, {1, 0.01, 0.005}, {}}, 0).finite);
    EXPECT_FALSE(assess({{1, 2, 3}, {1, 1.01, 1.03}, {1, 0.01, 0.02}, {}}, 0).finite);
    EXPECT_FALSE(assess({{1, 2, 3}, {1, INFINITY, INFINITY}, {1, INFINITY, 0}, {}}, 1).finite);
    // decaying weight: raw totals grow with the area, per-cell density decides
    EXPECT_TRUE(assess({{1, 2, 3}, {1, 2, 4}, {1, 1, 2}, {1, 4, 16}}, -1).finite);
    EXPECT_FALSE(assess({{1, 2, 3}, {1, 2, 4}, {1, 1, 2}, {1, 2, 2}}, -1).finite);
    EXPECT_FALSE(assess({{1, 2, 3}, {1, 2, 4}, {1, 1, 2}, {}}, -1).finite);
}
