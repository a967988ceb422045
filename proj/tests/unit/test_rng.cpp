#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "waynav/rng.hpp"
#include "waynav/stats.hpp"

using namespace waynav;

// Known-answer vectors published with Random123 (kat_vectors, philox4x32 10 rounds).
TEST(Philox, KnownAnswers) {
    using A4 = std::array<std::uint32_t, 4>;
    EXPECT_EQ(philox4x32_10({0, 0, 0, 0}, {0, 0}), (A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
    EXPECT_EQ(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
              (A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
    EXPECT_EQ(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
              (A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(Mix64, SplitMixReference) {
    // first output of SplitMix64 seeded with 0
    EXPECT_EQ(mix64(0), 0xE220A8397B1DCDAFULL);
}

TEST(RngStream, ReproducibleAndIndependent) {
    RngStream a(42, 1, 2, 3), b(42, 1, 2, 3), c(42, 1, 2, 4), d(43, 1, 2, 3);
    std::set<std::uint64_t> seen;
    for (int k = 0; k < 100; ++k) {
        const std::uint64_t x = a.next_u64();
        EXPECT_EQ(x, b.next_u64());
        EXPECT_NE(x, c.next_u64());
        EXPECT_NE(x, d.next_u64());
        seen.insert(x);
    }
    EXPECT_EQ(seen.size(), 100u);
    EXPECT_EQ(a.draws(), 100u);
}

TEST(RngStream, UniformInOpenInterval) {
    EXPECT_GT(RngStream::to_unit(0, 0), 0.0);
    EXPECT_LT(RngStream::to_unit(0xffffffff, 0xffffffff), 1.0);
    RngStream s(7, 0, 0, 0);
    double sum = 0;
    for (int k = 0; k < 100000; ++k) sum += s.uniform();
    EXPECT_NEAR(sum / 100000, 0.5, 0.005);
}

TEST(RngStream, NormalMoments) {
    RngStream s(9, 5, 6, 7);
    std::vector<double> xs;
    for (int k = 0; k < 200000; ++k) xs.push_back(s.normal());
    EXPECT_NEAR(stats::mean(xs), 0.0, 0.01);
    EXPECT_NEAR(stats::population_stddev(xs), 1.0, 0.01);
    for (double x : xs) EXPECT_TRUE(std::isfinite(x));
}

TEST(Stats, TwoPointAndDegenerate) {
    const std::vector<double> rel{0.0, 0.2};
    EXPECT_NEAR(stats::mean(rel), 0.1, 1e-15);
    EXPECT_NEAR(stats::population_stddev(rel), 0.1, 1e-15);
    const std::vector<double> one{3.0};
    EXPECT_FALSE(stats::pearson_r2(one, one));
    const std::vector<double> flat{1.0, 1.0, 1.0}, up{1.0, 2.0, 3.0};
    EXPECT_FALSE(stats::pearson_r2(flat, up));
    EXPECT_NEAR(*stats::pearson_r2(up, std::vector<double>{2.0, 4.0, 6.0}), 1.0, 1e-15);
    EXPECT_NEAR(*stats::pearson_r2(up, std::vector<double>{3.0, 2.0, 1.0}), 1.0, 1e-15);
    EXPECT_DOUBLE_EQ(stats::mean_difference(up, std::vector<double>{2.0, 2.0, 2.0}), 0.0);
    EXPECT_DOUBLE_EQ(stats::mean_difference(flat, up), 1.0);
}
