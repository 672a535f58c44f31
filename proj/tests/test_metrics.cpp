#include "bqec/channels.hpp"
#include "bqec/fit.hpp"
#include "bqec/metrics.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <boost/math/constants/constants.hpp>

#include <cmath>

using namespace bqec;

namespace {

double infidelity(const Code& c, int L, double x) {
    return entanglement_infidelity(build_recovery(c, x, L), loss_kraus(x, c.cutoff(), c.cutoff()), c);
}

std::vector<Mat> mats(const std::vector<Operator>& ops) {
    std::vector<Mat> m;
    for (const auto& o : ops) m.push_back(o.mat);
    return m;
}

std::vector<Vec> vecs(const Code& c) {
    std::vector<Vec> v;
    for (const auto& w : c.words) v.push_back(w.amp);
    return v;
}

}  // namespace

TEST(Infidelity, VanishesWithoutLoss) {
    for (int L = 0; L <= 3; ++L) {
        auto c = L == 0 ? naive_code() : binomial_code(L, L);
        EXPECT_LT(infidelity(c, L, 0.0), 1e-10) << L;
    }
}

TEST(Infidelity, NaivePlateau) {
    EXPECT_NEAR(infidelity(naive_code(), 0, 1e-3) / 1e-3, 0.5, 0.025);
}

TEST(Infidelity, SmallestCodeSlope) {
    auto c = binomial_code(1, 1);
    EXPECT_LT(infidelity(c, 1, 1e-3) / 1e-3, 0.05);
    auto grid = logspace(1e-4, 1e-2, 5);
    std::vector<double> r;
    for (double x : grid) r.push_back(infidelity(c, 1, x) / x);
    EXPECT_NEAR(oracle::slope(grid, r), 1.0, 0.05);
}

TEST(Infidelity, MatchesDirectAndProcessOracle) {
    for (int L = 1; L <= 3; ++L) {
        auto c = binomial_code(L, L);
        for (double x : {0.05, 0.3, 1.0}) {
            auto rec = build_recovery(c, x, L);
            auto ch = loss_kraus(x, c.cutoff(), c.cutoff());
            double f = entanglement_infidelity(rec, ch, c);
            double proc = oracle::process_infidelity(mats(rec.operators()), mats(ch.operators), vecs(c));
            EXPECT_NEAR(f, proc, 1e-9) << L << " " << x;
            EXPECT_NEAR(f, entanglement_infidelity_direct(rec, ch, c), 1e-12) << L << " " << x;
        }
    }
    auto c = optimized_code(OptimizedCode::sqrt17);
    auto rec = sqrt17_recovery(0.2);
    auto ch = loss_kraus(0.2, c.cutoff(), c.cutoff());
    EXPECT_NEAR(entanglement_infidelity(rec, ch, c),
                oracle::process_infidelity(mats(rec.operators()), mats(ch.operators), vecs(c)), 1e-9);
}

TEST(Infidelity, BoundedAndMonotone) {
    auto grid = logspace(1e-5, 0.5, 30);
    for (int L = 0; L <= 3; ++L) {
        auto c = L == 0 ? naive_code() : binomial_code(L, L);
        double prev = 0.0;
        for (double x : grid) {
            double f = infidelity(c, L, x);
            EXPECT_GE(f, 0.0);
            EXPECT_LE(f, 1.0);
            EXPECT_GE(f, prev) << L << " " << x;
            prev = f;
        }
    }
}

TEST(Infidelity, LeadingErrorBound) {
    for (int L = 1; L <= 4; ++L) {
        auto c = binomial_code(L, L);
        for (double x : {1e-4, 1e-3}) {
            double bound = uncorrectable_rate(c, L, x) * (1.0 + 10.0 * x);
            EXPECT_LE(infidelity(c, L, x) / x, bound) << L << " " << x;
        }
    }
}

TEST(UncorrectableRate, MatchesKrausTrace) {
    auto c = binomial_code(2, 2);
    for (double x : {1e-3, 0.2}) {
        Mat e = loss_operator(x, 3, c.cutoff()).mat;
        double direct = (e * c.mixed_state() * e.adjoint()).trace().real();
        EXPECT_NEAR(loss_probability(c, 3, x), direct, 1e-15 + 1e-12 * direct);
    }
}

TEST(UncorrectableRate, SmallestCode) {
    auto c = binomial_code(1, 1);
    for (double x : {1e-4, 1e-3}) {
        double r = uncorrectable_rate(c, 1, x);
        EXPECT_NEAR(r / (2.0 * x), 1.0, 5.0 * x);
    }
}

TEST(UncorrectableRate, OptimizedCodePrefactors) {
    const double r17 = std::sqrt(17.0), r21 = std::sqrt(21.0);
    auto a = optimized_code(OptimizedCode::sqrt17);
    auto b = optimized_code(OptimizedCode::sqrt21);
    EXPECT_NEAR(loss_prefactor(a, 1) / ((r17 - 1) / 2), 1.0, 1e-12);
    EXPECT_NEAR(loss_prefactor(a, 2) / ((3 * r17 - 7) / 4), 1.0, 1e-12);
    EXPECT_NEAR(loss_prefactor(b, 1) / ((r21 - 1) / 2), 1.0, 1e-12);
    EXPECT_NEAR(loss_prefactor(b, 2) / ((4 * r21 - 9) / 4), 1.0, 1e-12);
    const double x = 1e-6;
    EXPECT_NEAR(uncorrectable_rate(a, 1, x) / x / ((3 * r17 - 7) / 4), 1.0, 1e-5);
}

TEST(TwoMode, RatioOfThree) {
    EXPECT_NEAR(two_mode_uncorrectable_ratio(1e-3) / 3.0, 1.0, 0.02);
    // linear extrapolation to zero strength
    double r1 = two_mode_uncorrectable_ratio(1e-3), r2 = two_mode_uncorrectable_ratio(5e-4);
    EXPECT_NEAR((2.0 * r2 - r1) / 3.0, 1.0, 0.005);
    auto c = binomial_code(1, 1);
    EXPECT_EQ(loss_probability(c, 2, 1e-3) / loss_probability(c, 2, 1e-3), 1.0);
    EXPECT_NEAR(loss_prefactor(two_mode_code(1, 1), 2) / loss_prefactor(c, 2), 3.0, 1e-12);
}

TEST(Cat, ClosedFormAgreesWithFockWords) {
    for (double b : {1.5, 2.0, 3.0}) {
        auto v = cat_violation(b);
        EXPECT_LT(std::abs(v.closed_form - v.numeric), 5.0 * std::exp(-2.0 * b * b)) << b;
    }
    const double u = 0.75 * boost::math::constants::pi<double>();
    EXPECT_LT(std::abs(cat_violation(std::sqrt(u)).closed_form), 1e-14);
    EXPECT_THROW(cat_violation(0.0), std::invalid_argument);
}

TEST(Cat, PhotonNumberAtOptimum) {
    auto o = cat_optimal_beta();
    EXPECT_NEAR(o.mean_photons, 2.3, 0.1);
    EXPECT_LT(std::abs(cat_violation(o.beta).numeric), 1e-10);
}

TEST(Unfaithful, ClosedFormAgainstSearch) {
    auto o = unfaithful_recovery_optimum(1e-4, 1, 1.0);
    EXPECT_NEAR(o.search_dt / o.dt_opt, 1.0, 0.01);
    EXPECT_NEAR(o.search_rate / o.rate_opt, 1.0, 0.01);
    EXPECT_NEAR(o.rate_opt, unfaithful_total_rate(o.dt_opt, 1e-4, 1, 1.0), 1e-15);
    for (int L = 1; L <= 4; ++L) {
        auto p = unfaithful_recovery_optimum(3e-5, L, 2.5);
        EXPECT_NEAR(p.search_rate / p.rate_opt, 1.0, 1e-6) << L;
    }
}

TEST(Unfaithful, Boundary) {
    auto o = unfaithful_recovery_optimum(0.0, 2, 1.0);
    EXPECT_EQ(o.dt_opt, 0.0);
    EXPECT_EQ(o.rate_opt, 0.0);
    EXPECT_THROW(unfaithful_recovery_optimum(1e-4, 0, 1.0), std::invalid_argument);
}

TEST(Unfaithful, RateScaling) {
    auto a = unfaithful_recovery_optimum(1e-6, 2, 1.0);
    auto b = unfaithful_recovery_optimum(1e-4, 2, 1.0);
    EXPECT_NEAR(b.rate_opt / a.rate_opt, std::pow(100.0, 2.0 / 3.0), 1e-9);
    EXPECT_NEAR(b.search_rate / a.search_rate, std::pow(100.0, 2.0 / 3.0), 1e-4);
}

TEST(Unfaithful, MeasuredPrefactor) {
    auto c = binomial_code(1, 1);
    EXPECT_NEAR(fitted_rate_prefactor(c, 1, logspace(1e-6, 1e-4, 5)), 2.0, 1e-3);
    auto c2 = binomial_code(2, 2);
    // P_3/dt -> <a^dag^3 a^3>/3! dt^2, divided by L^{L+1} = 8
    EXPECT_NEAR(fitted_rate_prefactor(c2, 2, logspace(1e-6, 1e-4, 5)), loss_prefactor(c2, 3) / 8.0, 1e-3);
}

TEST(Sweep, RowsAndColumns) {
    auto codes = scaling_codes(2);
    auto res = sweep_infidelity(codes, {0.1, 1e-3, 0.01}, 2);
    ASSERT_EQ(res.tags.size(), 3u);
    EXPECT_EQ(res.tags[0], "naive");
    ASSERT_EQ(res.rows.size(), 3u);
    EXPECT_EQ(res.rows[0].kappa_dt, 1e-3);
    EXPECT_EQ(res.rows[2].kappa_dt, 0.1);
    for (const auto& row : res.rows)
        for (double v : row.infidelity_rate) EXPECT_GE(v, 0.0);
    // threads do not change results
    auto one = sweep_infidelity(codes, {0.1, 1e-3, 0.01}, 1);
    for (std::size_t r = 0; r < 3; ++r) EXPECT_EQ(one.rows[r].infidelity_rate, res.rows[r].infidelity_rate);
    EXPECT_THROW(sweep_infidelity(codes, {0.0}), std::invalid_argument);
}

TEST(Sweep, DefaultGrid) {
    auto g = scaling_grid();
    ASSERT_EQ(g.size(), 40u);
    EXPECT_EQ(g.front(), 1e-4);
    EXPECT_EQ(g.back(), 1.0);
}

TEST(Sweep, CrossoverInterpolatesInLogLog) {
    SweepResult s;
    s.tags = {"a", "b"};
    // a = x, b = 0.1 on a grid; they cross at x = 0.1
    for (double x : {0.01, 0.05, 0.2, 1.0}) s.rows.push_back({x, {x, 0.1}});
    auto c = crossover(s, 0, 1);
    ASSERT_TRUE(c.has_value());
    EXPECT_NEAR(*c, 0.1, 1e-12);
    EXPECT_FALSE(crossover(s, 1, 0).has_value());
    EXPECT_NEAR(small_dt_slope(s, 0, 0.5), 1.0, 1e-12);
}
