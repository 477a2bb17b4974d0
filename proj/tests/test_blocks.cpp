#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "wilsontf/blocks.hpp"

using namespace wilsontf;

namespace {

std::vector<double> harmonic(std::size_t n) {
    std::vector<double> a(n);
    for (std::size_t i = 0; i < n; ++i) a[i] = 1.0 / (i + 2);
    return a;
}

void expect_bounds(const std::vector<double>& a, const BlockPartition& p, double eps) {
    const auto sums = oracle::block_sums(a, p.cuts);
    ASSERT_EQ(sums.size(), p.block_sums.size());
    for (std::size_t i = 0; i < sums.size(); ++i) {
        EXPECT_GT(sums[i], eps / 3) << "block " << i;
        EXPECT_LT(sums[i], eps) << "block " << i;
        EXPECT_NEAR(sums[i], p.block_sums[i], 1e-12);
    }
    for (std::size_t i = 1; i < p.cuts.size(); ++i) EXPECT_LT(p.cuts[i - 1], p.cuts[i]);
}

}  // namespace

TEST(Blocks, HarmonicFiveBlocks) {
    const auto a = harmonic(10000);
    const auto p = partition_series(a, 5);
    EXPECT_EQ(p.block_sums.size(), 5u);
    expect_bounds(a, p, 3);
    EXPECT_TRUE(verify_partition(a, p));
}

TEST(Blocks, GreedyMinimality) {
    const auto a = harmonic(100000);
    const auto p = partition_series(a, 8, 0.9);
    for (std::size_t i = 1; i < p.cuts.size(); ++i) {
        double s = 0;
        for (std::size_t n = p.cuts[i - 1]; n + 1 < p.cuts[i]; ++n) s += a[n];
        EXPECT_LE(s, 0.3) << "block " << i;
    }
}

TEST(Blocks, SummableSourceExhausts) {
    std::vector<double> a(200);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = 0.5 * std::pow(2.0, -static_cast<double>(i));
    try {
        partition_series(a, 5);
        FAIL() << "expected exhaustion";
    } catch (const BlockError& e) {
        EXPECT_EQ(e.kind, BlockError::Kind::exhausted);
        EXPECT_NE(std::string(e.what()).find("source exhausted"), std::string::npos);
    }
    const SeriesSource endless = [](std::size_t n) -> std::optional<double> { return std::ldexp(1.0, -static_cast<int>(std::min<std::size_t>(n, 2000))); };
    EXPECT_THROW(partition_series(endless, 5, 3, std::nullopt, 100000), BlockError);
}

TEST(Blocks, LargeTermAfterStartReported) {
    auto a = harmonic(1000);
    a[40] = 1.5;
    try {
        partition_series(a, 5);
        FAIL() << "expected a large-term error";
    } catch (const BlockError& e) {
        EXPECT_EQ(e.kind, BlockError::Kind::large_term);
        EXPECT_EQ(e.index, 40u);
    }
}

TEST(Blocks, RandomSequences) {
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> U(0.5, 1.5);
    for (double eps : {3.0, 0.9}) {
        for (int trial = 0; trial < 200; ++trial) {
            std::vector<double> a(4000);
            for (std::size_t n = 0; n < a.size(); ++n) a[n] = U(rng) / (n + 1);
            // every term from m0 on is at most 1.5/(n + 1) < eps/3
            const auto m0 = static_cast<std::size_t>(std::floor(1.5 / (eps / 3)));
            const auto p = partition_series(
                [&](std::size_t n) -> std::optional<double> {
                    if (n < a.size()) return a[n];
                    return std::nullopt;
                },
                5, eps, m0);
            expect_bounds(a, p, eps);
            EXPECT_TRUE(verify_partition(a, p));
        }
    }
}

TEST(Blocks, ZerosAreKept) {
    std::vector<double> a(3000);
    for (std::size_t n = 0; n < a.size(); ++n) a[n] = n % 3 == 1 ? 0.0 : 1.0 / (n + 2);
    const auto p = partition_series(a, 4);
    expect_bounds(a, p, 3);
}

TEST(Blocks, ScaleProperty) {
    const auto a = harmonic(20000);
    const auto ref = partition_series(a, 6, 3);
    for (double c : {0.25, 7.0}) {
        std::vector<double> b(a);
        for (auto& v : b) v *= c;
        EXPECT_EQ(partition_series(b, 6, 3 * c).cuts, ref.cuts) << c;
    }
}

TEST(VerifyPartition, TamperedAndEmpty) {
    const auto a = harmonic(10000);
    auto p = partition_series(a, 5);
    EXPECT_TRUE(verify_partition(a, BlockPartition{}));
    // pulling a cut back drops its block to <= eps/3 by minimality
    for (std::size_t i = 1; i < p.cuts.size(); ++i) {
        auto q = p;
        --q.cuts[i];
        EXPECT_FALSE(verify_partition(a, q)) << "cut " << i;
    }
    std::mt19937_64 rng(3);
    int caught = 0;
    for (int trial = 0; trial < 50; ++trial) {
        auto q = p;
        const std::size_t i = 1 + rng() % (q.cuts.size() - 1);
        q.cuts[i] += (rng() % 2) ? 1 : -1;
        caught += !verify_partition(a, q);
    }
    EXPECT_GE(caught, 25);
    p.cuts.back() = a.size() + 1;
    EXPECT_FALSE(verify_partition(a, p));
}

TEST(Blocks, InvalidInputs) {
    EXPECT_THROW(partition_series(harmonic(10), 1, 0), std::invalid_argument);
    EXPECT_THROW(partition_series(std::vector<double>{0.5, -0.1, 0.5}, 1), std::invalid_argument);
}
