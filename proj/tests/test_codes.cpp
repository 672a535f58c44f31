#include "bqec/channels.hpp"
#include "bqec/codes.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>

using namespace bqec;

namespace {

double max_diff(const Vec& a, const Vec& b) { return (a - b).cwiseAbs().maxCoeff(); }

double gram_defect(const Code& c) {
    return (c.gram() - Mat::Identity(c.d(), c.d())).cwiseAbs().maxCoeff();
}

// <W_i|n^l|W_j>
cplx moment(const Code& c, int i, int j, int ell) {
    cplx s = 0.0;
    for (Eigen::Index n = 0; n < c.dim(); ++n)
        s += std::conj(c.words[i].amp(n)) * std::pow(static_cast<double>(n), ell) * c.words[j].amp(n);
    return s;
}

}  // namespace

TEST(Codes, BinomialSmallestCode) {
    auto c = binomial_code(1, 1);
    const double r = 1.0 / std::sqrt(2.0);
    EXPECT_NEAR(c.words[0].amp(0).real(), r, 1e-15);
    EXPECT_NEAR(c.words[0].amp(4).real(), r, 1e-15);
    EXPECT_NEAR(c.words[1].amp(2).real(), 1.0, 1e-15);
    EXPECT_NEAR(c.words[0].norm(), 1.0, 1e-15);
}

TEST(Codes, BinomialMatchesDefinition) {
    for (auto [N, S] : {std::pair{2, 2}, std::pair{2, 1}, std::pair{3, 4}}) {
        auto c = binomial_code(N, S);
        for (int s = 0; s < 2; ++s)
            EXPECT_LT(max_diff(c.words[s].amp, oracle::binomial_word(N, S, s, c.cutoff())), 1e-15) << N << S;
    }
    auto c22 = binomial_code(2, 2);
    EXPECT_NEAR(c22.words[0].amp(6).real(), std::sqrt(3.0) / 2.0, 1e-15);
    EXPECT_NEAR(c22.words[1].amp(9).real(), 0.5, 1e-15);
    auto c21 = binomial_code(2, 1);
    EXPECT_NEAR(c21.words[0].amp(4).real(), std::sqrt(3.0) / 2.0, 1e-15);
    EXPECT_NEAR(c21.words[1].amp(6).real(), 0.5, 1e-15);
}

TEST(Codes, BinomialSupportOnSpacing) {
    for (int N = 1; N <= 5; ++N)
        for (int S = 0; S <= 5; ++S) {
            auto c = binomial_code(N, S);
            for (int s = 0; s < 2; ++s)
                for (int n : c.support(s)) EXPECT_EQ(n % (S + 1), 0);
        }
}

TEST(Codes, BinomialRejectsSmallCutoff) {
    EXPECT_THROW(binomial_code(2, 2, 7), std::invalid_argument);
}

TEST(Codes, DualBasisIsSumAndDifference) {
    auto c = binomial_code(1, 1);
    auto dual = binomial_dual_basis(1, 1);
    Vec plus = (c.words[0].amp + c.words[1].amp) / std::sqrt(2.0);
    Vec minus = (c.words[0].amp - c.words[1].amp) / std::sqrt(2.0);
    EXPECT_LT(max_diff(dual.words[0].amp, plus), 1e-15);
    EXPECT_LT(max_diff(dual.words[1].amp, minus), 1e-15);
    EXPECT_LT(gram_defect(dual), 1e-14);
}

TEST(Codes, DualBasisMomentsDecouple) {
    for (int N = 1; N <= 5; ++N)
        for (int S = 1; S <= 5; ++S) {
            auto dual = binomial_dual_basis(N, S);
            for (int ell = 1; ell <= N; ++ell) {
                double scale = std::pow(static_cast<double>(dual.cutoff()), ell);
                EXPECT_LT(std::abs(moment(dual, 0, 1, ell)) / scale, 1e-13) << N << S << ell;
            }
        }
}

TEST(Codes, ExtendedBinomial) {
    for (int n = 0; n <= 12; ++n)
        for (int m = 0; m <= n; ++m) EXPECT_EQ(extended_binomial(n, m, 2).convert_to<double>(), oracle::choose(n, m));
    for (int n = 0; n <= 5; ++n) EXPECT_EQ(extended_binomial(n, 0, 1), 1);
    const int expect[] = {1, 2, 3, 2, 1};
    for (int m = 0; m <= 4; ++m) EXPECT_EQ(extended_binomial(2, m, 3), expect[m]);
    EXPECT_EQ(extended_binomial(2, 5, 3), 0);
    // exact beyond double precision: (1+x+x^2+x^3)^40 central coefficient
    auto big = extended_binomial(40, 60, 4);
    EXPECT_GT(big, boost::multiprecision::cpp_int(1) << 70);
    EXPECT_THROW(extended_binomial(2, 1, 0), std::invalid_argument);
}

TEST(Codes, QuditReducesToDualBasis) {
    for (int N = 1; N <= 3; ++N)
        for (int S = 1; S <= 3; ++S) {
            auto q = qudit_binomial_code(N, S, 2);
            auto dual = binomial_dual_basis(N, S, q.cutoff());
            for (int s = 0; s < 2; ++s) {
                cplx ov = q.words[s].amp.dot(dual.words[s].amp);
                EXPECT_NEAR(std::abs(ov), 1.0, 1e-13) << N << S;
            }
        }
}

TEST(Codes, QuditOrthonormalAndMoments) {
    auto q = qudit_binomial_code(1, 1, 3);
    EXPECT_LT(gram_defect(q), 1e-14);
    for (int d = 2; d <= 4; ++d)
        for (int N = 1; N <= 3; ++N)
            for (int S = 1; S <= 3; ++S) {
                auto c = qudit_binomial_code(N, S, d);
                const double a1 = (S + 1.0) * (d - 1.0) * (N + 1.0) / 2.0;
                const double a2 = a1 * (S + 1.0) * ((d - 1.0) * (3.0 * N + 4.0) + 2.0) / 6.0;
                for (int mu = 0; mu < d; ++mu) {
                    EXPECT_NEAR(moment(c, mu, mu, 1).real(), a1, 1e-9 * a1);
                    if (N >= 2) EXPECT_NEAR(moment(c, mu, mu, 2).real(), a2, 1e-9 * a2);
                }
                EXPECT_NEAR(qudit_alpha1(N, S, d), a1, 1e-12 * a1);
                EXPECT_NEAR(qudit_alpha2(N, S, d), a2, 1e-12 * a2);
            }
    EXPECT_THROW(qudit_binomial_code(1, 1, 1), std::invalid_argument);
}

TEST(Codes, CatWordsSeparateAndSupport) {
    auto c = cat_code(3.0);
    EXPECT_LT(std::abs(c.words[0].amp.dot(c.words[1].amp)), 1e-3);
    for (int n : c.support(0)) EXPECT_EQ(n % 4, 0);
    for (int n : c.support(1)) EXPECT_EQ(n % 4, 2);
    EXPECT_FALSE(c.support(1).empty());
    EXPECT_THROW(cat_code(0.0), std::invalid_argument);
    EXPECT_THROW(cat_code(3.0, 1, 12), std::invalid_argument);
}

TEST(Codes, CatAmplitudesFollowCoherentSum) {
    // up word is proportional to the even-4 Fock projection of |beta>
    const double beta = 2.0;
    auto c = cat_code(beta);
    Vec ref = Vec::Zero(c.dim());
    double lf = 0.0;
    for (Eigen::Index n = 0; n < c.dim(); ++n) {
        if (n > 0) lf += std::log(static_cast<double>(n));
        if (n % 4 == 0) ref(n) = std::exp(n * std::log(beta) - 0.5 * lf);
    }
    ref.normalize();
    EXPECT_LT(max_diff(c.words[0].amp, ref), 1e-13);
}

TEST(Codes, CatMomentGapsShrink) {
    for (int p = 1; p <= 2; ++p) {
        double prev = 1e300;
        for (double b : {1.5, 2.5, 3.5}) {
            auto c = cat_code(b);
            double gap = std::abs(moment(c, 0, 0, p).real() - moment(c, 1, 1, p).real());
            EXPECT_LT(gap, prev) << p << " " << b;
            prev = gap;
        }
    }
}

TEST(Codes, TwoModeWords) {
    auto c = two_mode_code(1, 1);
    const int c1 = c.cutoff() + 1;
    const double r = 1.0 / std::sqrt(2.0);
    EXPECT_EQ(c.modes, 2);
    EXPECT_NEAR(c.words[0].amp(0 * c1 + 4).real(), r, 1e-15);
    EXPECT_NEAR(c.words[0].amp(4 * c1 + 0).real(), r, 1e-15);
    EXPECT_NEAR(c.words[1].amp(2 * c1 + 2).real(), 1.0, 1e-15);

    auto n = mode_operators(c.cutoff()).number;
    Operator total = on_mode(n, 0) + on_mode(n, 1);
    for (const auto& w : c.words) {
        double m = expectation(w, total).real();
        double m2 = expectation(w, total * total).real();
        EXPECT_NEAR(m, 4.0, 1e-14);
        EXPECT_NEAR(m2 - m * m, 0.0, 1e-12);
    }
}

TEST(Codes, TwoModeNoJumpIsScalar) {
    auto c = two_mode_code(1, 1);
    const double x = 0.03;
    auto e0 = loss_operator(x, 0, c.cutoff());
    auto e00 = tensor_product(e0, e0);
    for (const auto& w : c.words)
        EXPECT_LT(max_diff(e00.mat * w.amp, std::exp(-2.0 * x) * w.amp), 1e-15);
}

TEST(Codes, OptimizedCodes) {
    auto a = optimized_code(OptimizedCode::sqrt17);
    auto b = optimized_code(OptimizedCode::sqrt21);
    EXPECT_NEAR(a.mean_photon_number(), (std::sqrt(17.0) - 1.0) / 2.0, 1e-14);
    EXPECT_NEAR(b.mean_photon_number(), (std::sqrt(21.0) - 1.0) / 2.0, 1e-14);
    EXPECT_LT(gram_defect(a), 1e-15);
    EXPECT_LT(gram_defect(b), 1e-15);
    EXPECT_THROW(optimized_code(OptimizedCode::sqrt17, 4), std::invalid_argument);
}

TEST(Codes, NaiveCode) {
    auto c = naive_code();
    EXPECT_NEAR(c.mean_photon_number(), 0.5, 1e-15);
    EXPECT_LT(gram_defect(c), 1e-15);
    EXPECT_EQ(c.support(0), std::vector<int>{0});
    EXPECT_EQ(c.support(1), std::vector<int>{1});
}

TEST(Codes, MomentDifference) {
    for (int N = 1; N <= 5; ++N)
        for (int S = 0; S <= 5; ++S) {
            auto c = binomial_code(N, S);
            for (int ell = 0; ell <= N; ++ell) EXPECT_LT(moment_difference(c, ell), 1e-9) << N << S << ell;
            EXPECT_GT(moment_difference(c, N + 1), 1e-3) << N << S;
        }
    EXPECT_EQ(moment_difference(naive_code(), 0), 0.0);
    EXPECT_THROW(moment_difference(two_mode_code(1, 1), 1), std::invalid_argument);
}

TEST(Codes, MeanPhotonQuadraticInOrder) {
    for (int L = 1; L <= 5; ++L)
        EXPECT_NEAR(binomial_code(L, L).mean_photon_number(), (L + 1.0) * (L + 1.0) / 2.0, 1e-12);
}

TEST(Codes, CanonicalPhase) {
    Vec v = Vec::Zero(4);
    v(1) = cplx(0.0, -0.6);
    v(3) = 0.8;
    auto w = canonical_phase(StateVector(v, 3, 1, true));
    EXPECT_NEAR(w.amp(1).real(), 0.6, 1e-15);
    EXPECT_EQ(w.amp(1).imag(), 0.0);
    // already canonical words are left bit-identical
    auto c = binomial_code(2, 2);
    auto again = canonical_phase(c.words[0]);
    EXPECT_EQ(max_diff(again.amp, c.words[0].amp), 0.0);
}

TEST(Codes, TagStrings) {
    for (auto t : {CodeTag::binomial, CodeTag::binomial_dual, CodeTag::qudit, CodeTag::cat, CodeTag::two_mode,
                   CodeTag::naive, CodeTag::opt_sqrt17, CodeTag::opt_sqrt21, CodeTag::custom})
        EXPECT_EQ(code_tag_from_string(to_string(t)), t);
    EXPECT_THROW(code_tag_from_string("gkp"), std::invalid_argument);
}
