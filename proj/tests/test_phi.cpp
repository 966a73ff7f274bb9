#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "fixlab/phi.hpp"

using namespace fixlab;

namespace {

const char* kStep = "if(t < 1, 0, 0.9)";
const char* kHybrid = "if(t < 1, t/2, t - (t-1)*(t-1))";

std::vector<double> default_scan() { return ScanPlan{}.points(); }

}  // namespace

TEST(PhiLoad, Validation) {
    EXPECT_THROW(ComparisonFunction("x/2"), ParseError);
    EXPECT_THROW(ComparisonFunction("1/t"), LoadError);  // not finite at 0
    EXPECT_THROW(ComparisonFunction("t/2", {0.0}), LoadError);
    EXPECT_THROW(ComparisonFunction("t/2", {-1.0}), LoadError);
    EXPECT_THROW(ComparisonFunction("t/2", {1.0, 1.0}), LoadError);
    ComparisonFunction phi("t/2", {3.0, 1.0});
    EXPECT_EQ(phi.exceptional(), (std::vector<double>{1.0, 3.0}));
    EXPECT_TRUE(phi.near_exceptional(1.0 + 1e-10));
    EXPECT_FALSE(phi.near_exceptional(1.0 + 1e-8));
}

TEST(PhiScan, LogSpacedWithEndpoints) {
    auto pts = default_scan();
    ASSERT_EQ(pts.size(), 512u);
    EXPECT_EQ(pts.front(), 1e-6);
    EXPECT_EQ(pts.back(), 1e3);
    for (std::size_t i = 1; i < pts.size(); ++i) EXPECT_LT(pts[i - 1], pts[i]);
    EXPECT_NEAR(std::log(pts[1] / pts[0]), std::log(pts[2] / pts[1]), 1e-12);
    EXPECT_THROW((ScanPlan{0.0, 1.0, 4}.points()), LoadError);
}

TEST(PhiNormal, Examples) {
    EXPECT_TRUE(check_normal(ComparisonFunction("t/2"), default_scan()).holds);
    EXPECT_TRUE(check_normal(ComparisonFunction("t/(1+t)"), default_scan()).holds);
    Verdict id = check_normal(ComparisonFunction("t"), default_scan());
    EXPECT_FALSE(id.holds);
    ASSERT_TRUE(id.witness);
    EXPECT_EQ(*id.witness, 1e-6);  // the smallest bad point
    EXPECT_EQ(id.bad_points.size(), 512u);
}

TEST(PhiNormal, NonzeroAtOrigin) {
    Verdict v = check_normal(ComparisonFunction("t/2 + 0.001"), default_scan());
    EXPECT_FALSE(v.holds);
    ASSERT_TRUE(v.witness);
    EXPECT_EQ(*v.witness, 0.0);
}

TEST(PhiNormal, HybridEqualsTAtOne) {
    // phi(1) = 1 exactly, so the point 1 itself is bad when it is sampled.
    std::vector<double> pts = {0.5, 1.0, 2.0};
    Verdict v = check_normal(ComparisonFunction(kHybrid), pts);
    EXPECT_FALSE(v.holds);
    EXPECT_EQ(v.bad_points, std::vector<double>{1.0});
    EXPECT_TRUE(check_normal(ComparisonFunction(kHybrid), default_scan()).holds);  // 1 is not a scan point
}

TEST(PhiAsymptotic, Halving) {
    const std::vector<double> seeds = {1.0};
    Verdict v = check_asymptotic_normal(ComparisonFunction("t/2"), seeds, 10000, 1e-9);
    EXPECT_TRUE(v.holds);
    EXPECT_EQ(v.seed, kDefaultSeed);
    EXPECT_EQ(v.checked_count, 1 + kDefaultSuborbits);
    // r_n = 2^-n first drops below 1e-9 at n = 30.
    auto orbit = equality_orbit(ComparisonFunction("t/2"), 1.0, 30);
    EXPECT_GE(orbit[29], 1e-9);
    EXPECT_LT(orbit[30], 1e-9);
}

TEST(PhiAsymptotic, HarmonicEqualityOrbit) {
    ComparisonFunction phi("t/(1+t)");
    auto orbit = equality_orbit(phi, 1.0, 10000);
    double worst = 0;
    for (std::size_t n = 0; n < orbit.size(); ++n) worst = std::max(worst, std::fabs(orbit[n] - 1.0 / (1.0 + n)));
    EXPECT_LE(worst, 1e-12);
    // The orbit reaches 1e-3 after about 1000 steps.
    const std::vector<double> seeds = {1.0};
    EXPECT_TRUE(check_asymptotic_normal(phi, seeds, 10000, 1e-3).holds);
    EXPECT_FALSE(check_asymptotic_normal(phi, seeds, 100, 1e-3).holds);
}

TEST(PhiAsymptotic, PiecewiseOrbitFromTen) {
    ComparisonFunction phi("if(t < 1, t/2, t - 0.25)");
    const std::vector<double> seeds = {10.0};
    EXPECT_TRUE(check_asymptotic_normal(phi, seeds, 200, 1e-9).holds);
    // 36 steps of -0.25 reach 1, then halving; frozen from the reference oracle.
    auto orbit = equality_orbit(phi, 10.0, 67);
    EXPECT_GE(orbit[66], 1e-9);
    EXPECT_LT(orbit[67], 1e-9);
}

TEST(PhiAsymptotic, IdentityNeverVanishes) {
    const std::vector<double> seeds = {0.5, 2.0};
    Verdict v = check_asymptotic_normal(ComparisonFunction("t"), seeds, 100, 1e-9);
    EXPECT_FALSE(v.holds);
    EXPECT_EQ(v.bad_points, (std::vector<double>{0.5, 2.0}));
    EXPECT_EQ(*v.witness, 0.5);
}

TEST(PhiAsymptotic, SeedIsRecordedAndReproducible) {
    ComparisonFunction phi("t/(1+t)");
    const std::vector<double> seeds = {1.0, 10.0};
    Verdict a = check_asymptotic_normal(phi, seeds, 100000, 1e-4, 99);
    Verdict b = check_asymptotic_normal(phi, seeds, 100000, 1e-4, 99);
    EXPECT_EQ(a.seed, 99u);
    EXPECT_EQ(a.holds, b.holds);
    EXPECT_EQ(a.notes, b.notes);
}

TEST(PhiAsymptotic, MonotoneNote) {
    const std::vector<double> seeds = {1.0};
    Verdict v = check_asymptotic_normal(ComparisonFunction("t/2", {}, true), seeds, 1000, 1e-9);
    EXPECT_NE(v.status.find("declared monotone"), std::string::npos);
}

TEST(PhiLimsup, Examples) {
    // The finest rung [1, 1 + 1e-6) overshoots a continuous phi by about 1e-6 phi'(1).
    EXPECT_NEAR(estimate_L_plus(ComparisonFunction("t/2"), 1.0).value, 0.5, 1e-6);
    EXPECT_GE(estimate_L_plus(ComparisonFunction("t/2"), 1.0).value, 0.5);
    LimsupEstimate step_at_1 = estimate_L_plus(ComparisonFunction(kStep), 1.0);
    EXPECT_NEAR(step_at_1.value, 0.9, 1e-6);
    EXPECT_TRUE(step_at_1.converged);
    EXPECT_EQ(estimate_L_plus(ComparisonFunction(kStep), 0.5).value, 0.0);
    EXPECT_THROW(estimate_L_plus(ComparisonFunction("t/2"), 0.0), LoadError);
}

TEST(PhiLimsup, LadderShape) {
    LimsupEstimate e = estimate_L_plus(ComparisonFunction("t/2"), 2.0);
    ASSERT_EQ(e.ladder.size(), kLimsupLadder.size());
    for (std::size_t k = 0; k < e.ladder.size(); ++k) EXPECT_EQ(e.ladder[k].epsilon, kLimsupLadder[k]);
    // sup of t/2 over the 128 samples of [2, 2.1) is at 2 + 0.1 * 127/128
    EXPECT_DOUBLE_EQ(e.ladder[0].sup, (2.0 + 0.1 * 127.0 / 128.0) / 2.0);
}

TEST(PhiLimsup, LadderNeverIncreases) {
    for (const char* src : {"t/2", "t/(1+t)", kStep, kHybrid, "if(t < 1.05, 0.2, t/3)", "abs(t - 1)/4"}) {
        ComparisonFunction phi(src);
        for (double s : {0.01, 0.5, 0.97, 1.0, 1.04, 3.0}) {
            LimsupEstimate e = estimate_L_plus(phi, s);
            for (std::size_t k = 1; k < e.ladder.size(); ++k)
                EXPECT_LE(e.ladder[k].sup, e.ladder[k - 1].sup) << src << " at s=" << s;
            EXPECT_EQ(e.value, std::max(e.ladder.back().sup, phi(s)));
        }
    }
}

// phi(s) <= L+phi(s) <= s on every catalog phi; the log grid below stays
// where the estimator's sampling bias is within tolerance for each of them.
TEST(PhiLimsup, SandwichOnCatalog) {
    const auto scan = ScanPlan{1e-2, 1e2, 1000}.points();
    for (const char* src : {"t/2", "t/(1+t)", kStep, kHybrid}) {
        ComparisonFunction phi(src, {1.0});
        int checked = 0;
        for (double s : scan) {
            if (phi.near_exceptional(s)) continue;
            const double v = estimate_L_plus(phi, s).value;
            EXPECT_GE(v, phi(s) - 1e-9) << src << " at s=" << s;
            EXPECT_LE(v, s + 1e-9) << src << " at s=" << s;
            ++checked;
        }
        EXPECT_EQ(checked, 1000);
    }
}

TEST(PhiAdmissible, RightAdmissibleHalving) {
    Verdict v = check_nearly_right_admissible(ComparisonFunction("t/2"), default_scan());
    EXPECT_TRUE(v.holds);
    EXPECT_EQ(v.checked_count, 512u);
}

TEST(PhiAdmissible, HybridNeedsOneInQ) {
    // 1 must be a scan point for the exceptional set to matter.
    auto scan = default_scan();
    scan.push_back(1.0);
    Verdict with_q = check_nearly_right_admissible(ComparisonFunction(kHybrid, {1.0}), scan);
    EXPECT_TRUE(with_q.holds);
    EXPECT_EQ(with_q.checked_count, scan.size() - 1);
    Verdict without = check_nearly_right_admissible(ComparisonFunction(kHybrid), scan);
    EXPECT_FALSE(without.holds);
    EXPECT_EQ(without.bad_points, std::vector<double>{1.0});
    ASSERT_TRUE(without.witness_value);
    EXPECT_GE(*without.witness_value, 1.0);  // phi(1) = 1 enters the envelope
}

TEST(PhiAdmissible, StepIsAdmissible) {
    // L+phi(1) = 0.9 < 1, so the step needs no exceptional set at all.
    auto scan = default_scan();
    scan.push_back(1.0);
    EXPECT_TRUE(check_nearly_right_admissible(ComparisonFunction(kStep), scan).holds);
}

TEST(PhiAdmissible, JumpAboveTheDiagonalFails) {
    // Just right of 0.5 phi jumps to 0.6 > s; scan points in [0.5, 0.6) are bad.
    ComparisonFunction phi("if(t <= 0.5, t/2, if(t < 0.6, 0.6, t/2))");
    std::vector<double> scan = {0.25, 0.5, 0.55, 0.59, 0.7};
    Verdict v = check_nearly_right_admissible(phi, scan);
    EXPECT_FALSE(v.holds);
    EXPECT_EQ(v.bad_points, (std::vector<double>{0.5, 0.55, 0.59}));
}

TEST(PhiAdmissible, MonotoneFastPath) {
    Verdict v = check_nearly_right_admissible(ComparisonFunction("t/2", {}, true), default_scan());
    EXPECT_TRUE(v.holds);
    EXPECT_NE(v.status.find("monotone"), std::string::npos);
    // The fast path still checks phi(s) < s.
    Verdict big = check_nearly_right_admissible(ComparisonFunction("t/2 + 1", {}, true), default_scan());
    EXPECT_FALSE(big.holds);
    EXPECT_EQ(*big.witness, 1e-6);
    // A false monotone declaration falls back to estimation; phi(s) ~ 1/4 > s near 0.
    Verdict lie = check_nearly_right_admissible(ComparisonFunction("abs(t - 1)/4", {}, true), default_scan());
    EXPECT_FALSE(lie.notes.empty());
    EXPECT_EQ(lie.status, "limsup estimated at scan points");
    EXPECT_FALSE(lie.holds);
    EXPECT_EQ(*lie.witness, 1e-6);
    EXPECT_LT(lie.bad_points.back(), 0.2);
    // Declared on a truly monotone phi, the fast path and the estimator agree.
    for (const char* src : {"t/2", "t/(1+t)", "if(t < 1, t/2, 0.9*t)"})
        EXPECT_EQ(check_nearly_right_admissible(ComparisonFunction(src, {}, true), default_scan()).holds,
                  check_nearly_right_admissible(ComparisonFunction(src), default_scan()).holds)
            << src;
}

TEST(PhiAdmissible, AgreesWithPointwiseTestWhenContinuous) {
    const auto scan = default_scan();
    for (const char* src : {"t/2", "t/(1+t)", "t*t/(1+t)", "min(t/2, 1)"}) {
        ComparisonFunction phi(src);
        bool pointwise = true;
        for (double s : scan) pointwise = pointwise && phi(s) < s;
        EXPECT_EQ(check_nearly_right_admissible(phi, scan).holds, pointwise) << src;
    }
}
