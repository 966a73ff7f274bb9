#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <tuple>
#include <vector>

#include "fixlab/seqlab.hpp"

using namespace fixlab;

namespace {

std::vector<double> harmonic(std::size_t n) {
    std::vector<double> xs{0.0};
    double s = 0.0;
    for (std::size_t k = 1; k < n; ++k) {
        s += 1.0 / static_cast<double>(k);
        xs.push_back(s);
    }
    return xs;
}

std::vector<double> geometric(std::size_t n) {
    std::vector<double> xs;
    for (std::size_t k = 0; k < n; ++k) xs.push_back(std::ldexp(1.0, -static_cast<int>(k)));
    return xs;
}

}  // namespace

TEST(SeqPrefix, TableValidation) {
    EXPECT_THROW(SequencePrefix::table({{0, 1}, {1, 0}}), LoadError);  // too short
    EXPECT_THROW(SequencePrefix::table({{0, 1, 2}, {1, 0, 1}, {2, 1}}), LoadError);
    EXPECT_THROW(SequencePrefix::table({{0, 1, 2}, {1, 0, 1}, {2, 1.5, 0}}), LoadError);
    EXPECT_THROW(SequencePrefix::table({{0, -1, 2}, {-1, 0, 1}, {2, 1, 0}}), LoadError);
    auto t = SequencePrefix::table({{0, 1, 2}, {1, 0, 1}, {2, 1, 0}});
    EXPECT_EQ(t.size(), 3u);
    EXPECT_EQ(t(0, 2), 2.0);
}

TEST(SeqPrefix, InSpaceUsesTheSpaceDistance) {
    auto d = DistanceStructure::analytic("x + y", 0, 1);
    auto p = SequencePrefix::in_space(d, {0.5, 0.25, 0.125});
    EXPECT_EQ(p(0, 0), 1.0);
    EXPECT_EQ(p(1, 2), 0.375);
}

TEST(SeqSemiCauchy, AlternatingIsNot) {
    std::vector<double> xs;
    for (int k = 0; k < 100; ++k) xs.push_back(k % 2);
    SemiCauchyProfile p = semi_cauchy_profile(SequencePrefix::real_line(xs), 1e-3);
    EXPECT_FALSE(p.semi_cauchy);
    EXPECT_FALSE(p.onset);
    EXPECT_EQ(p.final_gap, 1.0);
}

TEST(SeqSemiCauchy, HarmonicIsSemiCauchyButNotCauchy) {
    SemiCauchyProfile p = semi_cauchy_profile(SequencePrefix::real_line(harmonic(10000)), 1e-3);
    EXPECT_TRUE(p.semi_cauchy);
    ASSERT_TRUE(p.onset);
    // Gaps are 1/k; rounding in the running sum decides whether 1/1000 itself passes.
    EXPECT_GE(*p.onset, 999u);
    EXPECT_LE(*p.onset, 1000u);
    EXPECT_TRUE(p.cauchy_violation);
    ASSERT_TRUE(p.violation);
    EXPECT_GE(p.violation_distance, 1e-2);
    EXPECT_EQ(p.violation->first, *p.onset);
}

TEST(SeqSemiCauchy, OnsetIsTheFirstIndexOfTheQuietTail) {
    std::mt19937_64 gen(23);
    std::uniform_real_distribution<double> gap(0.0, 2e-3);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> xs{0.0};
        for (int k = 0; k < 50; ++k) xs.push_back(xs.back() + (k < trial % 50 ? 1.0 : gap(gen)));
        auto x = SequencePrefix::real_line(xs);
        SemiCauchyProfile p = semi_cauchy_profile(x, 1e-3);
        const std::size_t last_big = static_cast<std::size_t>(trial % 50);  // gaps 0..last_big-1 are 1
        if (x(xs.size() - 2, xs.size() - 1) > 1e-3) {
            EXPECT_FALSE(p.semi_cauchy);
            continue;
        }
        EXPECT_TRUE(p.semi_cauchy);
        ASSERT_TRUE(p.onset);
        for (std::size_t k = *p.onset; k + 1 < xs.size(); ++k) EXPECT_LE(x(k, k + 1), 1e-3);
        if (*p.onset > 0) {
            EXPECT_GT(x(*p.onset - 1, *p.onset), 1e-3);
        }
        EXPECT_GE(*p.onset, last_big);
    }
}

TEST(SeqSemiCauchy, GeometricTailIsQuiet) {
    SemiCauchyProfile p = semi_cauchy_profile(SequencePrefix::real_line(geometric(60)), 1e-3);
    EXPECT_TRUE(p.semi_cauchy);
    EXPECT_EQ(*p.onset, 9u);  // d(x_9, x_10) = 2^-10 < 1e-3 < 2^-9
    EXPECT_FALSE(p.cauchy_violation);
    EXPECT_THROW(semi_cauchy_profile(SequencePrefix::real_line(geometric(5)), 0.0), LoadError);
}

TEST(SeqWitness, HarmonicRowsMatchTheReference) {
    WitnessReport r = lemma1_witness(SequencePrefix::real_line(harmonic(2001)), 0.5, 100);
    ASSERT_TRUE(r.j_eps);
    EXPECT_EQ(*r.j_eps, 2u);
    EXPECT_TRUE(r.complete);
    ASSERT_EQ(r.rows.size(), 101u);
    EXPECT_EQ(*r.last_rank, 100u);
    // frozen from the reference oracle
    const std::vector<std::tuple<std::size_t, std::size_t, std::size_t>> want = {
        {0, 0, 1}, {1, 1, 2}, {2, 2, 4}, {3, 3, 6}, {4, 4, 7}, {5, 5, 9}};
    for (std::size_t i = 0; i < want.size(); ++i) {
        EXPECT_EQ(r.rows[i].j, std::get<0>(want[i]));
        EXPECT_EQ(r.rows[i].m, std::get<1>(want[i]));
        EXPECT_EQ(r.rows[i].n, std::get<2>(want[i]));
    }
    EXPECT_EQ(r.rows[100].m, 100u);
    EXPECT_EQ(r.rows[100].n, 166u);
    std::size_t sum_m = 0, sum_n = 0;
    for (const auto& row : r.rows) {
        sum_m += row.m;
        sum_n += row.n;
    }
    EXPECT_EQ(sum_m, 5050u);
    EXPECT_EQ(sum_n, 8410u);
}

TEST(SeqWitness, RowShapePastTheSemiCauchyRank) {
    const double eps = 0.5;
    WitnessReport r = lemma1_witness(SequencePrefix::real_line(harmonic(2001)), eps, 100);
    for (const auto& row : r.rows) {
        EXPECT_TRUE(row.separated) << row.j;
        if (row.j < *r.j_eps) continue;
        EXPECT_TRUE(row.first_crossing) << row.j;
        // eps <= d(x_m, x_n) <= d(x_m, x_{n-1}) + d(x_{n-1}, x_n) < eps + d(x_{n-1}, x_n)
        EXPECT_LT(row.d_prev_n, eps);
        EXPECT_GE(row.d_mn, eps);
        EXPECT_LT(row.d_mn, eps + row.d_prev_n);
        ASSERT_TRUE(row.shifted[1][1]);
        EXPECT_EQ(*row.shifted[0][0], row.d_mn);
    }
    EXPECT_EQ(r.rows[0].shifted[1][0], 0.0);  // d(x_1, x_1)
}

TEST(SeqWitness, IncompleteWhenTheTailIsTooNarrow) {
    WitnessReport r = lemma1_witness(SequencePrefix::real_line(geometric(40)), 0.6, 10);
    EXPECT_FALSE(r.complete);
    ASSERT_EQ(r.rows.size(), 1u);
    EXPECT_EQ(r.rows[0].m, 0u);
    EXPECT_EQ(r.rows[0].n, 2u);
    EXPECT_EQ(*r.last_rank, 0u);
    EXPECT_FALSE(r.j_eps.has_value() && *r.j_eps > 0);
    EXPECT_THROW(lemma1_witness(SequencePrefix::real_line(geometric(5)), 0.0, 3), LoadError);
}

TEST(SeqWitness, AutoEpsilon) {
    EXPECT_EQ(auto_epsilon(SequencePrefix::real_line({0, 1, 0, 1})), 0.5);
}

// Minimality against a brute-force scan on random integer walks.
TEST(SeqWitness, RowsAreMinimal) {
    std::mt19937_64 gen(17);
    std::uniform_int_distribution<int> step(-2, 2);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<double> xs{0.0};
        for (int k = 0; k < 30; ++k) xs.push_back(xs.back() + step(gen));
        const double eps = 1.0 + trial % 3;
        const std::size_t j_max = 25;
        WitnessReport r = lemma1_witness(SequencePrefix::real_line(xs), eps, j_max);
        std::size_t rows = 0;
        for (std::size_t j = 0; j <= j_max; ++j) {
            std::optional<std::pair<std::size_t, std::size_t>> want;
            for (std::size_t m = j; m < xs.size() && !want; ++m)
                for (std::size_t n = m + 1; n < xs.size(); ++n)
                    if (std::fabs(xs[m] - xs[n]) >= eps) {
                        want = std::pair{m, n};
                        break;
                    }
            if (!want) break;
            ASSERT_LT(rows, r.rows.size());
            EXPECT_EQ(r.rows[rows].m, want->first);
            EXPECT_EQ(r.rows[rows].n, want->second);
            ++rows;
        }
        EXPECT_EQ(r.rows.size(), rows);
        EXPECT_EQ(r.complete, rows == j_max + 1);
    }
}

TEST(SeqLemma2, StepFunctionDescent) {
    ComparisonFunction step("if(t < 1, 0, 0.9)", {1.0});
    const std::vector<double> descent = {1.5, 1.25, 1.125, 1.0625, 1.0000001, 1.00000001, 1.000000001};
    Verdict v = lemma2_check(step, 1.0, descent);
    EXPECT_TRUE(v.holds);
    EXPECT_EQ(v.checked_count, 3u);
    EXPECT_EQ(*v.witness_value, 0.9);
}

TEST(SeqLemma2, ContinuousDescent) {
    ComparisonFunction phi("t/(1+t)");
    std::vector<double> descent;
    for (int k = 0; k <= 30; ++k) descent.push_back(2.0 + std::ldexp(1.0, -k));
    EXPECT_TRUE(lemma2_check(phi, 2.0, descent).holds);
}

TEST(SeqLemma2, SpikeOffTheLadderIsCaught) {
    // A single spike the limsup ladder never samples.
    ComparisonFunction spike("if(t = 1.0000001, 5, t/2)");
    Verdict v = lemma2_check(spike, 1.0, std::vector<double>{1.1, 1.0000001});
    EXPECT_FALSE(v.holds);
    EXPECT_EQ(*v.witness, 1.0000001);
}

TEST(SeqLemma2, Preconditions) {
    ComparisonFunction phi("t/2");
    EXPECT_THROW(lemma2_check(phi, 0.0, std::vector<double>{1.0}), LoadError);
    EXPECT_THROW(lemma2_check(phi, 1.0, std::vector<double>{}), LoadError);
    EXPECT_THROW(lemma2_check(phi, 1.0, std::vector<double>{1.5, 0.9999}), LoadError);
    EXPECT_THROW(lemma2_check(phi, 1.0, std::vector<double>{1.5, 1.01}), LoadError);
}
