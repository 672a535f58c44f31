#include "bqec/codes.hpp"

#include <boost/math/special_functions/binomial.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace bqec {

namespace {

const std::vector<std::pair<CodeTag, std::string>> kTagNames = {
    {CodeTag::binomial, "binomial"},   {CodeTag::binomial_dual, "binomial-dual"},
    {CodeTag::qudit, "qudit"},         {CodeTag::cat, "cat"},
    {CodeTag::two_mode, "two-mode"},   {CodeTag::naive, "naive"},
    {CodeTag::opt_sqrt17, "opt-sqrt17"}, {CodeTag::opt_sqrt21, "opt-sqrt21"},
    {CodeTag::custom, "custom"},
};

double binom(int n, int k) { return boost::math::binomial_coefficient<double>(n, k); }

int resolve_cutoff(int cutoff, int required, int fallback) {
    if (cutoff < 0) cutoff = std::max(required, fallback);
    if (cutoff < required) throw std::invalid_argument("cutoff too small for code support");
    return cutoff;
}

CodeParams binomial_params(int N, int S, int cutoff) {
    CodeParams p;
    p.N = N;
    p.S = S;
    p.L = std::min(N, S);
    p.G = 0;
    p.D = N / 2;
    p.d = 2;
    p.cutoff = cutoff;
    return p;
}

void require_ns(int N, int S) {
    if (N < 0 || S < 0) throw std::invalid_argument("N and S must be non-negative");
}

}  // namespace

std::string to_string(CodeTag tag) {
    for (const auto& [t, s] : kTagNames)
        if (t == tag) return s;
    return "custom";
}

CodeTag code_tag_from_string(const std::string& s) {
    for (const auto& [t, name] : kTagNames)
        if (name == s) return t;
    throw std::invalid_argument("unknown code tag: " + s);
}

CodeParams CodeParams::from_errors(int L, int G, int D, int cutoff) {
    if (L < 0 || G < 0 || D < 0) throw std::invalid_argument("error orders must be non-negative");
    CodeParams p;
    p.L = L;
    p.G = G;
    p.D = D;
    p.N = std::max({L, G, 2 * D});
    p.S = L + G;
    p.d = 2;
    p.cutoff = cutoff < 0 ? default_cutoff(p.N, p.S, G) : cutoff;
    return p;
}

Mat Code::gram() const {
    auto n = words.size();
    Mat g(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) g(i, j) = words[i].inner(words[j]);
    return g;
}

Operator Code::code_projector() const { return Operator::projector(words); }

Mat Code::mixed_state() const {
    Mat rho = Mat::Zero(dim(), dim());
    for (const auto& w : words) rho += w.amp * w.amp.adjoint();
    return rho / static_cast<double>(words.size());
}

double Code::mean_photon_number() const {
    const int c = cutoff();
    double total = 0.0;
    for (const auto& w : words) {
        for (Eigen::Index i = 0; i < w.dim(); ++i) {
            int n = modes == 1 ? static_cast<int>(i) : static_cast<int>(i / (c + 1) + i % (c + 1));
            total += std::norm(w.amp(i)) * n;
        }
    }
    return total / static_cast<double>(words.size());
}

std::vector<int> Code::support(int i, double tol) const {
    std::vector<int> out;
    const auto& w = words.at(i);
    for (Eigen::Index k = 0; k < w.dim(); ++k)
        if (std::abs(w.amp(k)) > tol) out.push_back(static_cast<int>(k));
    return out;
}

StateVector canonical_phase(const StateVector& v, double tol) {
    for (Eigen::Index i = 0; i < v.dim(); ++i) {
        cplx a = v.amp(i);
        if (std::abs(a) > tol) {
            if (a.imag() == 0.0 && a.real() > 0.0) return v;
            cplx ph = std::conj(a) / std::abs(a);
            return {v.amp * ph, v.cutoff, v.modes, v.normalized};
        }
    }
    return v;
}

Code make_code(std::vector<StateVector> words, CodeParams params, CodeTag tag, double tol) {
    if (words.size() < 2) throw std::invalid_argument("a code needs at least two words");
    const int modes = words.front().modes;
    for (auto& w : words) {
        if (w.modes != modes || w.cutoff != words.front().cutoff)
            throw std::invalid_argument("words live in different spaces");
        w = canonical_phase(w);
        w.normalized = true;
    }
    Code c;
    c.words = std::move(words);
    c.params = params;
    c.params.cutoff = c.words.front().cutoff;
    c.params.d = static_cast<int>(c.words.size());
    c.tag = tag;
    c.modes = modes;
    Mat g = c.gram() - Mat::Identity(c.d(), c.d());
    c.orthogonality_defect = g.cwiseAbs().maxCoeff();
    if (c.orthogonality_defect > tol) throw std::invalid_argument("code words are not orthonormal");
    return c;
}

Code binomial_code(int N, int S, int cutoff) {
    require_ns(N, S);
    cutoff = resolve_cutoff(cutoff, (N + 1) * (S + 1), default_cutoff(N, S, 0));
    Vec up = Vec::Zero(cutoff + 1), dn = Vec::Zero(cutoff + 1);
    for (int p = 0; p <= N + 1; ++p) {
        double a = std::sqrt(binom(N + 1, p) / std::ldexp(1.0, N));
        (p % 2 == 0 ? up : dn)(p * (S + 1)) = a;
    }
    return make_code({StateVector(up, cutoff), StateVector(dn, cutoff)}, binomial_params(N, S, cutoff),
                     CodeTag::binomial);
}

Code binomial_dual_basis(int N, int S, int cutoff) {
    require_ns(N, S);
    cutoff = resolve_cutoff(cutoff, (N + 1) * (S + 1), default_cutoff(N, S, 0));
    Vec plus = Vec::Zero(cutoff + 1), minus = Vec::Zero(cutoff + 1);
    for (int p = 0; p <= N + 1; ++p) {
        double a = std::sqrt(binom(N + 1, p) / std::ldexp(1.0, N + 1));
        plus(p * (S + 1)) = a;
        minus(p * (S + 1)) = (p % 2 == 0) ? a : -a;
    }
    return make_code({StateVector(plus, cutoff), StateVector(minus, cutoff)}, binomial_params(N, S, cutoff),
                     CodeTag::binomial_dual);
}

boost::multiprecision::cpp_int extended_binomial(int n, int m, int d) {
    using boost::multiprecision::cpp_int;
    if (n < 0 || m < 0 || d < 1) throw std::invalid_argument("extended_binomial needs n,m >= 0 and d >= 1");
    // coefficients of (1 + x + ... + x^{d-1})^n by repeated convolution
    std::vector<cpp_int> poly{1};
    for (int k = 0; k < n; ++k) {
        std::vector<cpp_int> next(poly.size() + d - 1, 0);
        for (std::size_t i = 0; i < poly.size(); ++i)
            for (int j = 0; j < d; ++j) next[i + j] += poly[i];
        poly.swap(next);
    }
    if (static_cast<std::size_t>(m) >= poly.size()) return 0;
    return poly[m];
}

Code qudit_binomial_code(int N, int S, int d, int cutoff) {
    require_ns(N, S);
    if (d < 2) throw std::invalid_argument("qudit dimension must be at least 2");
    const int pmax = (d - 1) * (N + 1);
    cutoff = resolve_cutoff(cutoff, pmax * (S + 1), default_cutoff(N, S, 0));
    const double norm = std::pow(static_cast<double>(d), N + 1);
    std::vector<StateVector> words;
    for (int mu = 0; mu < d; ++mu) {
        Vec w = Vec::Zero(cutoff + 1);
        for (int p = 0; p <= pmax; ++p) {
            double c = extended_binomial(N + 1, p, d).convert_to<double>();
            // reduce mu*p mod d before forming the phase to keep it exact at p = 0
            double ang = 2.0 * std::numbers::pi * static_cast<double>((mu * p) % d) / d;
            w(p * (S + 1)) = std::polar(std::sqrt(c / norm), ang);
        }
        words.emplace_back(w, cutoff);
    }
    CodeParams params = binomial_params(N, S, cutoff);
    params.d = d;
    return make_code(std::move(words), params, CodeTag::qudit);
}

double qudit_alpha1(int N, int S, int d) { return (S + 1.0) * (d - 1.0) * (N + 1.0) / 2.0; }

double qudit_alpha2(int N, int S, int d) {
    return qudit_alpha1(N, S, d) * (S + 1.0) * ((d - 1.0) * (3.0 * N + 4.0) + 2.0) / 6.0;
}

double cat_truncation_tail(double beta, int cutoff) {
    double lam = beta * beta;
    if (lam == 0.0) return 0.0;
    return boost::math::gamma_p(static_cast<double>(cutoff) + 1.0, lam);
}

int cat_min_cutoff(double beta) {
    double lam = beta * beta;
    return static_cast<int>(std::ceil(lam + 6.0 * std::sqrt(lam + 1.0)));
}

Code cat_code(double beta, int S, int cutoff) {
    if (!std::isfinite(beta) || beta <= 0.0) throw std::invalid_argument("cat amplitude must be positive");
    if (S < 0) throw std::invalid_argument("S must be non-negative");
    const int legs = 2 * (S + 1);
    int minc = std::max(cat_min_cutoff(beta), legs);
    if (cutoff < 0) {
        cutoff = minc;
        while (cat_truncation_tail(beta, cutoff) > 1e-14) ++cutoff;
    }
    if (cutoff < minc) throw std::invalid_argument("cutoff too small for cat amplitude");
    if (cat_truncation_tail(beta, cutoff) > 1e-9) throw std::runtime_error("cat code truncation has not converged");

    Vec up = Vec::Zero(cutoff + 1), dn = Vec::Zero(cutoff + 1);
    const double lb = std::log(beta), lam = beta * beta;
    for (int n = 0; n <= cutoff; ++n) {
        int r = n % legs;
        if (r != 0 && r != S + 1) continue;
        double a = std::exp(n * lb - 0.5 * std::lgamma(n + 1.0) - 0.5 * lam);
        (r == 0 ? up : dn)(n) = a;
    }
    up.normalize();
    dn.normalize();
    CodeParams p;
    p.N = S;
    p.S = S;
    p.L = S;
    p.cutoff = cutoff;
    return make_code({StateVector(up, cutoff), StateVector(dn, cutoff)}, p, CodeTag::cat);
}

Code two_mode_code(int N, int S, int cutoff) {
    require_ns(N, S);
    const int ntot = (N + 1) * (S + 1);
    cutoff = resolve_cutoff(cutoff, ntot, ntot);
    Vec up = Vec::Zero(space_dim(cutoff, 2)), dn = Vec::Zero(space_dim(cutoff, 2));
    for (int p = 0; p <= N + 1; ++p) {
        double c = std::sqrt(binom(N + 1, p) / std::ldexp(1.0, N));
        int n1 = p * (S + 1), n2 = ntot - n1;
        (p % 2 == 0 ? up : dn)(n1 * (cutoff + 1) + n2) = c;
    }
    return make_code({StateVector(up, cutoff, 2), StateVector(dn, cutoff, 2)}, binomial_params(N, S, cutoff),
                     CodeTag::two_mode);
}

Code optimized_code(OptimizedCode which, int cutoff) {
    const double r17 = std::sqrt(17.0), r21 = std::sqrt(21.0);
    if (which == OptimizedCode::sqrt17) {
        cutoff = resolve_cutoff(cutoff, 5, 5);
        Vec up = Vec::Zero(cutoff + 1), dn = Vec::Zero(cutoff + 1);
        up(0) = std::sqrt(7.0 - r17) / std::sqrt(6.0);
        up(3) = std::sqrt(r17 - 1.0) / std::sqrt(6.0);
        dn(1) = std::sqrt(9.0 - r17) / std::sqrt(6.0);
        dn(4) = -std::sqrt(r17 - 3.0) / std::sqrt(6.0);
        return make_code({StateVector(up, cutoff), StateVector(dn, cutoff)},
                         CodeParams::from_errors(1, 0, 0, cutoff), CodeTag::opt_sqrt17);
    }
    cutoff = resolve_cutoff(cutoff, 6, 6);
    Vec up = Vec::Zero(cutoff + 1), dn = Vec::Zero(cutoff + 1);
    up(0) = std::sqrt(9.0 - r21) / std::sqrt(8.0);
    up(4) = std::sqrt(r21 - 1.0) / std::sqrt(8.0);
    dn(1) = std::sqrt(11.0 - r21) / std::sqrt(8.0);
    dn(5) = -std::sqrt(r21 - 3.0) / std::sqrt(8.0);
    return make_code({StateVector(up, cutoff), StateVector(dn, cutoff)}, CodeParams::from_errors(1, 1, 0, cutoff),
                     CodeTag::opt_sqrt21);
}

Code naive_code(int cutoff) {
    cutoff = resolve_cutoff(cutoff, 1, default_cutoff(0, 0, 0));
    CodeParams p;
    p.cutoff = cutoff;
    return make_code({StateVector::basis(0, cutoff), StateVector::basis(1, cutoff)}, p, CodeTag::naive);
}

double moment_difference(const Code& code, int ell) {
    if (code.modes != 1) throw std::invalid_argument("moment_difference needs a single-mode code");
    if (ell < 0) throw std::invalid_argument("moment order must be non-negative");
    std::vector<long double> moments;
    for (const auto& w : code.words) {
        long double m = 0.0L;
        for (Eigen::Index n = 0; n < w.dim(); ++n) {
            long double pr = static_cast<long double>(w.amp(n).real()) * w.amp(n).real() +
                             static_cast<long double>(w.amp(n).imag()) * w.amp(n).imag();
            m += pr * std::pow(static_cast<long double>(n), ell);
        }
        moments.push_back(m);
    }
    auto [lo, hi] = std::minmax_element(moments.begin(), moments.end());
    return static_cast<double>(*hi - *lo);
}

}  // namespace bqec
