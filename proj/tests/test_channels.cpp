#include "bqec/channels.hpp"
#include "bqec/codes.hpp"
#include "bqec/fit.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace bqec;

TEST(Channels, ZeroStrengthIsIdentity) {
    auto ch = loss_kraus(0.0, 4, 8);
    EXPECT_EQ(ch.size(), 5u);
    EXPECT_EQ((ch.operators[0].mat - Mat::Identity(9, 9)).cwiseAbs().maxCoeff(), 0.0);
    for (std::size_t l = 1; l < ch.size(); ++l) EXPECT_EQ(ch.operators[l].mat.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(ch.completeness_defect, 0.0);
}

TEST(Channels, CompletenessWithAllJumps) {
    for (double x : {1e-3, 0.1, 1.0, 3.0}) {
        auto ch = loss_kraus(x, 16, 16);
        EXPECT_LT(ch.completeness_defect, 1e-12) << x;
        EXPECT_EQ(ch.deficit.cwiseAbs().maxCoeff(), 0.0);
    }
}

TEST(Channels, MatchesBinomialThinningElements) {
    for (double x : {1e-4, 0.1, 0.7})
        for (int l = 0; l <= 6; ++l) {
            Mat ref = oracle::loss_element_form(x, l, 14);
            Mat got = loss_operator(x, l, 14).mat;
            double scale = std::max(1e-300, ref.cwiseAbs().maxCoeff());
            EXPECT_LT((got - ref).cwiseAbs().maxCoeff() / scale, 1e-13) << x << " " << l;
        }
}

TEST(Channels, SingleLossErrorWord) {
    auto c = binomial_code(1, 1);
    Vec v = loss_operator(0.01, 1, c.cutoff()).mat * c.words[0].amp;
    v /= v.norm();
    EXPECT_NEAR(std::abs(v(3)), 1.0, 1e-15);
}

TEST(Channels, DiscreteErrorSets) {
    const int c = 8;
    auto ops = mode_operators(c);
    auto s1 = discrete_error_set(1, 0, 0, c);
    ASSERT_EQ(s1.size(), 2u);
    EXPECT_EQ((s1[1].mat - ops.annihilation.mat).cwiseAbs().maxCoeff(), 0.0);
    auto s2 = discrete_error_set(2, 0, 1, c);
    ASSERT_EQ(s2.size(), 4u);
    EXPECT_EQ((s2[2].mat - ops.annihilation.pow(2).mat).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ((s2[3].mat - ops.number.mat).cwiseAbs().maxCoeff(), 0.0);
    auto s0 = discrete_error_set(0, 0, 0, c);
    ASSERT_EQ(s0.size(), 1u);
    EXPECT_EQ((s0[0].mat - Mat::Identity(c + 1, c + 1)).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(discrete_error_set(1, 1, 0, 4, 2).size(), 5u);
}

TEST(Channels, JumpTimeInterchange) {
    const int c = 10;
    const double x = 0.37;
    Mat decay = Mat::Zero(c + 1, c + 1);
    for (int n = 0; n <= c; ++n) decay(n, n) = std::exp(-x * n);
    for (int l = 1; l <= 4; ++l) {
        Mat al = mode_operators(c).annihilation.pow(l).mat;
        Mat lhs = decay * al, rhs = std::exp(x * l) * al * decay;
        EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-14) << l;
    }
}

TEST(Channels, TracePreservedOnCodeState) {
    for (auto code : {binomial_code(2, 2), binomial_code(1, 1), optimized_code(OptimizedCode::sqrt17)}) {
        auto ch = loss_kraus(0.2, code.cutoff(), code.cutoff());
        EXPECT_NEAR(ch.apply(code.mixed_state()).trace().real(), 1.0, 1e-9);
    }
}

TEST(Channels, TruncationRuleAndDeficit) {
    const int c = 20;
    const double x = 1e-3;
    int lm = loss_ell_max(x, c);
    EXPECT_GE(lm, 1);
    EXPECT_LT(lm, c);
    // first dropped term obeys the bound
    EXPECT_LT(loss_gamma(x, lm + 1) * std::pow(c, lm + 1), 1e-14);
    auto ch = loss_kraus(x, c);
    EXPECT_EQ(ch.ell_max, lm);
    // sum E^dag E + deficit reproduces the identity on the diagonal
    Mat s = Mat::Zero(c + 1, c + 1);
    for (const auto& e : ch.operators) s += e.mat.adjoint() * e.mat;
    for (int n = 0; n <= c; ++n) EXPECT_NEAR(s(n, n).real() + ch.deficit(n), 1.0, 1e-14);
    EXPECT_THROW(loss_kraus(-0.1, 4, 4), std::invalid_argument);
    EXPECT_THROW(loss_kraus(0.1, 5, 4), std::invalid_argument);
}

TEST(Channels, TwoModeLoss) {
    auto ch = two_mode_loss_kraus(0.05, 4, 4);
    EXPECT_EQ(ch.size(), 25u);
    EXPECT_LT(ch.completeness_defect, 1e-12);
    EXPECT_EQ(ch.labels.front(), std::make_pair(0, 0));
}

TEST(Lindblad, FockDecay) {
    const int c = 8;
    auto a = mode_operators(c).annihilation;
    auto rho0 = DensityMatrix::pure(StateVector::basis(5, c));
    auto n = mode_operators(c).number.mat;
    for (double t : {0.1, 0.5, 1.0}) {
        auto r = lindblad_converged(rho0, {{a, 1.0}}, t);
        double m = (r.rho.entries * n).trace().real();
        EXPECT_NEAR(m, 5.0 * std::exp(-t), 1e-6) << t;
    }
}

TEST(Lindblad, AgreesWithKrausSum) {
    const int c = 12;
    const double x = 0.1;
    auto a = mode_operators(c).annihilation;
    Vec psi = oracle::binomial_word(2, 2, 0, c) + oracle::binomial_word(2, 2, 1, c);
    psi(1) = cplx(0.3, 0.2);
    psi.normalize();
    auto rho0 = DensityMatrix::pure(StateVector(psi, c, 1, true));
    auto r = lindblad_converged(rho0, {{a, 1.0}}, x);
    Mat kraus = loss_kraus(x, c, c).apply(rho0.entries);
    EXPECT_LT((r.rho.entries - kraus).cwiseAbs().maxCoeff(), 1e-8);
    r.rho.validate();
}

TEST(Lindblad, ZeroTimeAndGuards) {
    auto a = mode_operators(4).annihilation;
    auto rho0 = DensityMatrix::pure(StateVector::basis(3, 4));
    auto r = lindblad_evolve(rho0, {{a, 1.0}}, 0.0, 100);
    EXPECT_EQ((r.rho.entries - rho0.entries).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_THROW(lindblad_evolve(rho0, {{a, 1.0}}, 0.1, 50), std::invalid_argument);
    EXPECT_THROW(lindblad_evolve(rho0, {{a, -1.0}}, 0.1, 100), std::invalid_argument);
    // a coarse grid on a fast rate drifts in trace
    EXPECT_THROW(lindblad_evolve(rho0, {{a, 400.0}}, 1.0, 100), IntegrationError);
}

TEST(DensityMatrixTest, Validation) {
    Mat m = Mat::Zero(2, 2);
    m(0, 0) = 1.2;
    m(1, 1) = -0.2;
    EXPECT_THROW(DensityMatrix(m).validate(), std::domain_error);
    m(1, 1) = 0.0;
    EXPECT_THROW(DensityMatrix(m).validate(), std::domain_error);
    EXPECT_NO_THROW(DensityMatrix(m, 1.2).validate());
}

TEST(KrausScaling, LeadingOrders) {
    auto grid = logspace(1e-5, 1e-2, 7);
    EXPECT_NEAR(kraus_norm_exponent(1, grid), 0.5, 0.02);
    EXPECT_NEAR(kraus_norm_exponent(0, grid), 1.0, 0.02);
    for (int l = 0; l <= 3; ++l) EXPECT_GT(kraus_taylor_leading(l, grid), 0.5 * l) << l;
    EXPECT_THROW(kraus_taylor_leading(1, logspace(1e-3, 1e-1, 6)), std::invalid_argument);
    EXPECT_THROW(kraus_taylor_leading(1, logspace(1e-4, 1e-2, 4)), std::invalid_argument);
}

TEST(KrausScaling, TwoLossProbabilityOnCode) {
    auto c = binomial_code(1, 1);
    auto grid = logspace(1e-5, 1e-2, 7);
    std::vector<double> p;
    for (double x : grid) {
        Mat e2 = loss_operator(x, 2, c.cutoff()).mat;
        p.push_back((e2 * c.mixed_state() * e2.adjoint()).trace().real());
    }
    EXPECT_NEAR(oracle::slope(grid, p), 2.0, 0.05);
}
