#include "bqec/recovery.hpp"

#include "bqec/channels.hpp"
#include "bqec/qec.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <optional>
#include <stdexcept>

namespace bqec {

namespace {

// Image of a word under the no-jump operator, split as v = c W + r with r
// orthogonal to every code word.
struct NoJumpImage {
    Vec v;
    double c = 0.0;
    Vec r;
};

// Symmetric orthonormalization of a set of nearly orthonormal vectors.
void lowdin(std::vector<Vec>& vs) {
    if (vs.size() < 2) return;
    const auto n = static_cast<Eigen::Index>(vs.size());
    Mat g(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) g(i, j) = vs[i].dot(vs[j]);
    double off = (g - Mat::Identity(n, n)).cwiseAbs().maxCoeff();
    if (off < 1e-14) return;
    Eigen::SelfAdjointEigenSolver<Mat> es(g);
    Eigen::VectorXd ev = es.eigenvalues();
    if (ev.minCoeff() < 1e-12) throw std::runtime_error("branch images are linearly dependent");
    Mat inv_sqrt = es.eigenvectors() * ev.cwiseInverse().cwiseSqrt().cast<cplx>().asDiagonal() *
                   es.eigenvectors().adjoint();
    std::vector<Vec> out(vs.size());
    for (Eigen::Index i = 0; i < n; ++i) {
        out[i] = Vec::Zero(vs[0].size());
        for (Eigen::Index j = 0; j < n; ++j) out[i] += inv_sqrt(j, i) * vs[j];
    }
    vs = std::move(out);
}

// e^{-x n/2} W with the code-word component removed via expm1 differences, so
// the small remainder keeps full relative precision.
NoJumpImage exact_no_jump(const Code& code, int sigma, double x) {
    const Vec& w = code.words[sigma].amp;
    const auto dim = w.size();
    NoJumpImage img;
    img.v = Vec(dim);
    for (Eigen::Index n = 0; n < dim; ++n) img.v(n) = std::exp(-0.5 * x * n) * w(n);
    std::vector<Eigen::Index> supp;
    double nw2 = 0.0;
    for (Eigen::Index n = 0; n < dim; ++n)
        if (w(n) != 0.0) {
            supp.push_back(n);
            nw2 += std::norm(w(n));
        }
    double c = 0.0;
    for (auto m : supp) c += std::norm(w(m)) * std::exp(-0.5 * x * m);
    img.c = c / nw2;
    img.r = Vec::Zero(dim);
    for (auto n : supp) {
        double s = 0.0;
        for (auto m : supp)
            s += std::norm(w(m)) * std::exp(-0.5 * x * m) * std::expm1(-0.5 * x * static_cast<double>(n - m));
        img.r(n) = w(n) * (s / nw2);
    }
    for (int t = 0; t < code.d(); ++t) {
        if (t == sigma) continue;
        const Vec& wt = code.words[t].amp;
        img.r -= wt.dot(img.v) * wt;
    }
    return img;
}

NoJumpImage generic_no_jump(const Code& code, int sigma, const Vec& v) {
    NoJumpImage img;
    img.v = v;
    img.c = code.words[sigma].amp.dot(v).real();
    img.r = v;
    for (const auto& w : code.words) img.r -= w.amp.dot(v) * w.amp;
    return img;
}

// Image W + delta of a unit word, with delta small and known to full precision.
NoJumpImage perturbed_no_jump(const Code& code, int sigma, const Vec& delta) {
    const Vec& w = code.words[sigma].amp;
    NoJumpImage img;
    img.v = w + delta;
    img.c = 1.0 + w.dot(delta).real();
    img.r = delta;
    for (const auto& wt : code.words) img.r -= wt.amp.dot(delta) * wt.amp;
    return img;
}

// Pairs W -> cW - sB and B -> sW + cB rotating each no-jump image onto its word.
std::vector<StatePair> rotation_pairs(const Code& code, const std::vector<NoJumpImage>& imgs,
                                      std::vector<std::string>& flags) {
    std::vector<StatePair> pairs;
    std::vector<int> rotated;
    std::vector<Vec> dirs;
    std::vector<double> cs, ss;
    for (int s = 0; s < code.d(); ++s) {
        const auto& img = imgs[s];
        double nv = img.v.norm();
        const auto& w = code.words[s];
        if (nv == 0.0) {
            flags.push_back("no-jump image of word " + std::to_string(s) + " vanishes");
            pairs.emplace_back(w, w);
            continue;
        }
        double nr = img.r.norm();
        double c = img.c / nv, sn = nr / nv;
        if (sn <= 1e-15) {
            pairs.emplace_back(w, w);
            continue;
        }
        double h = std::hypot(c, sn);
        rotated.push_back(s);
        dirs.push_back(img.r / nr);
        cs.push_back(c / h);
        ss.push_back(sn / h);
    }
    lowdin(dirs);
    for (std::size_t i = 0; i < rotated.size(); ++i) {
        const auto& w = code.words[rotated[i]];
        StateVector b(dirs[i], w.cutoff, w.modes, true);
        StateVector wt(cs[i] * w.amp - ss[i] * dirs[i], w.cutoff, w.modes, true);
        StateVector bt(ss[i] * w.amp + cs[i] * dirs[i], w.cutoff, w.modes, true);
        pairs.emplace_back(w, wt);
        pairs.emplace_back(b, bt);
    }
    return pairs;
}

// b_sigma -> W_sigma and, when b is orthogonal to the code space, W_sigma -> -b_sigma.
std::vector<StatePair> transfer_pairs(const Code& code, std::vector<Vec> images, const std::vector<int>& which) {
    lowdin(images);
    std::vector<StatePair> pairs;
    std::vector<StatePair> back;
    for (std::size_t i = 0; i < which.size(); ++i) {
        const auto& w = code.words[which[i]];
        StateVector b(images[i], w.cutoff, w.modes, true);
        pairs.emplace_back(b, w);
        double leak = 0.0;
        for (const auto& u : code.words) leak = std::max(leak, std::abs(u.amp.dot(images[i])));
        if (leak < 1e-12) back.emplace_back(w, StateVector(-images[i], w.cutoff, w.modes, true));
    }
    if (back.size() == pairs.size()) pairs.insert(pairs.end(), back.begin(), back.end());
    return pairs;
}

Operator parity_projector(int cutoff, int S, int k) {
    Mat p = Mat::Zero(cutoff + 1, cutoff + 1);
    const int m = S + 1;
    const int target = ((-k) % m + m) % m;
    for (int n = 0; n <= cutoff; ++n)
        if (n % m == target) p(n, n) = 1.0;
    return {p, cutoff, 1, true};
}

Operator logical_x(const Code& code) {
    if (code.d() != 2) throw std::invalid_argument("echo needs a two-word code");
    return logical_gates(code).X;
}

void require_single_mode(const Code& code) {
    if (code.modes != 1) throw std::invalid_argument("recovery synthesis needs a single-mode code");
}

// Taylor coefficients of h(x)^alpha for h(0) = 1, via the power recurrence.
std::vector<double> series_power(const std::vector<double>& h, double alpha, int order) {
    std::vector<double> p(order + 1, 0.0);
    p[0] = 1.0;
    for (int n = 1; n <= order; ++n) {
        double acc = 0.0;
        for (int i = 1; i <= n && i < static_cast<int>(h.size()); ++i) acc += (alpha * i - n + i) * h[i] * p[n - i];
        p[n] = acc / n;
    }
    return p;
}

}  // namespace

std::vector<Operator> RecoveryMap::operators() const {
    std::vector<Operator> out;
    for (const auto& b : branches) out.push_back(b.op);
    return out;
}

Mat RecoveryMap::uncovered() const {
    const auto dim = branches.front().projector.dim();
    Mat q = Mat::Identity(dim, dim);
    for (const auto& b : branches) q -= b.projector.mat;
    return q;
}

double RecoveryMap::trace_excess() const {
    const auto dim = branches.front().op.dim();
    Mat s = Mat::Zero(dim, dim);
    for (const auto& b : branches) s += b.op.mat.adjoint() * b.op.mat;
    s = 0.5 * (s + s.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Mat> es(s, Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff() - 1.0;
}

Operator truncated_loss_operator(double kappa_dt, int k, int L, int cutoff) {
    if (k < 0 || L < 0) throw std::invalid_argument("orders must be non-negative");
    if (kappa_dt < 0.0) throw std::invalid_argument("kappa_dt must be non-negative");
    // jump images keep total order (kappa_dt)^{L/2}; the no-jump operator must be
    // right through (kappa_dt)^L since its leading part is O(1)
    const int jmax = k == 0 ? L : (L - k) / 2;
    Mat e = Mat::Zero(cutoff + 1, cutoff + 1);
    if (jmax < 0 || k > cutoff) return {e, cutoff};
    // h(x) = (1 - e^{-x})/x = sum_i (-x)^i/(i+1)!
    std::vector<double> h(jmax + 1);
    double fact = 1.0;
    for (int i = 0; i <= jmax; ++i) {
        fact *= (i + 1);
        h[i] = ((i % 2) ? -1.0 : 1.0) / fact;
    }
    auto hk = series_power(h, 0.5 * k, jmax);
    const double inv_sqrt_kfact = 1.0 / std::sqrt(std::tgamma(k + 1.0));
    for (int m = 0; m + k <= cutoff; ++m) {
        // multiply by e^{-x m/2} = sum_j (-m/2)^j x^j / j!
        double val = 0.0;
        for (int j = 0; j <= jmax; ++j) {
            double coef = 0.0, pw = 1.0, jf = 1.0;
            for (int i = 0; i <= j; ++i) {
                if (i > 0) {
                    pw *= -0.5 * m;
                    jf *= i;
                }
                coef += hk[j - i] * pw / jf;
            }
            coef *= inv_sqrt_kfact;
            if (std::abs(coef) < 1e-12) continue;
            val += coef * std::pow(kappa_dt, j);
        }
        double ladder = 1.0;
        for (int j = m + 1; j <= m + k; ++j) ladder *= std::sqrt(static_cast<double>(j));
        e(m, m + k) = std::pow(kappa_dt, 0.5 * k) * val * ladder;
    }
    return {e, cutoff};
}

RecoveryMap build_recovery(const Code& code, double kappa_dt, int L, const RecoveryOptions& options) {
    require_single_mode(code);
    if (!(kappa_dt >= 0.0) || !std::isfinite(kappa_dt)) throw std::invalid_argument("kappa_dt must be finite and >= 0");
    if (L < 0) throw std::invalid_argument("recovery order must be non-negative");
    const int S = code.params.S;
    if (S < L) throw std::invalid_argument("code spacing S+1 must be at least L+1");
    for (int s = 0; s < code.d(); ++s)
        for (int n : code.support(s, 0.0))
            if (n % (S + 1) != 0) throw std::invalid_argument("code words are not supported on multiples of S+1");

    const int cutoff = code.cutoff();
    auto a = mode_operators(cutoff).annihilation;
    RecoveryMap rm;
    rm.scheme = RecoveryScheme::parity_projective;
    rm.order = L;
    std::optional<Operator> x_gate;
    if (options.echo) x_gate = logical_x(code);

    for (int k = 0; k <= L; ++k) {
        std::vector<StatePair> pairs;
        if (k == 0) {
            std::vector<NoJumpImage> imgs;
            Operator b0 = options.truncated_branches ? truncated_loss_operator(kappa_dt, 0, L, cutoff)
                                                     : Operator::identity(cutoff);
            for (int s = 0; s < code.d(); ++s) {
                if (options.truncated_branches)
                    imgs.push_back(generic_no_jump(code, s, b0.mat * code.words[s].amp));
                else
                    imgs.push_back(exact_no_jump(code, s, kappa_dt));
            }
            pairs = rotation_pairs(code, imgs, rm.flags);
        } else {
            Operator bk = options.truncated_branches ? truncated_loss_operator(kappa_dt, k, L, cutoff)
                                                     : loss_operator(kappa_dt, k, cutoff);
            Operator ak = a.pow(k);
            std::vector<Vec> images;
            std::vector<int> which;
            for (int s = 0; s < code.d(); ++s) {
                Vec v = bk.mat * code.words[s].amp;
                // at kappa_dt = 0 the branch direction is the limit a^k W
                if (v.norm() == 0.0) v = ak.mat * code.words[s].amp;
                double nv = v.norm();
                if (nv == 0.0) {
                    rm.flags.push_back("branch " + std::to_string(k) + " annihilates word " + std::to_string(s));
                    continue;
                }
                images.push_back(v / nv);
                which.push_back(s);
            }
            pairs = transfer_pairs(code, images, which);
        }
        RecoveryBranch br;
        br.outcome = k;
        br.projector = parity_projector(cutoff, S, k);
        br.unitary = unitary_completion(pairs, cutoff);
        if (x_gate) br.unitary = *x_gate * br.unitary;
        br.op = br.unitary * br.projector;
        rm.branches.push_back(std::move(br));
    }
    return rm;
}

RecoveryMap measurement_recovery(const Code& code) {
    require_single_mode(code);
    const int cutoff = code.cutoff();
    auto a = mode_operators(cutoff).annihilation;
    Operator pw = code.code_projector();
    std::vector<Vec> images;
    std::vector<int> which;
    RecoveryMap rm;
    rm.scheme = RecoveryScheme::word_projective;
    rm.order = 1;
    for (int s = 0; s < code.d(); ++s) {
        Vec v = a.mat * code.words[s].amp;
        double nv = v.norm();
        if (nv == 0.0) {
            rm.flags.push_back("loss annihilates word " + std::to_string(s));
            continue;
        }
        images.push_back(v / nv);
        which.push_back(s);
    }
    auto pairs = transfer_pairs(code, images, which);
    RecoveryBranch b0;
    b0.outcome = 0;
    b0.projector = pw;
    b0.unitary = Operator::identity(cutoff);
    b0.op = pw;
    RecoveryBranch b1;
    b1.outcome = 1;
    b1.projector = Operator(Mat::Identity(pw.dim(), pw.dim()) - pw.mat, cutoff, 1, true);
    b1.unitary = unitary_completion(pairs, cutoff);
    b1.op = b1.unitary * b1.projector;
    rm.branches = {b0, b1};
    return rm;
}

RecoveryMap sqrt17_recovery(double kappa_dt, int cutoff) {
    if (!(kappa_dt >= 0.0) || !std::isfinite(kappa_dt)) throw std::invalid_argument("kappa_dt must be finite and >= 0");
    Code code = optimized_code(OptimizedCode::sqrt17, cutoff);
    cutoff = code.cutoff();
    auto a = mode_operators(cutoff).annihilation;
    std::vector<Vec> images;
    std::vector<int> which;
    std::vector<StateVector> e1;
    for (int s = 0; s < code.d(); ++s) {
        Vec v = a.mat * code.words[s].amp;
        images.push_back(v / v.norm());
        which.push_back(s);
    }
    lowdin(images);
    for (const auto& v : images) e1.emplace_back(v, cutoff, 1, true);
    Operator p1 = Operator::projector(e1);
    Operator rest(Mat::Identity(p1.dim(), p1.dim()) - p1.mat, cutoff, 1, true);

    RecoveryMap rm;
    rm.scheme = RecoveryScheme::word_projective;
    rm.order = 1;
    // the words lie outside the one-loss space, so (I - P_1) e^{-xn/2} W = W + (I - P_1)(e^{-xn/2} - 1) W
    Vec shrink(p1.dim());
    for (Eigen::Index n = 0; n < shrink.size(); ++n) shrink(n) = std::expm1(-0.5 * kappa_dt * static_cast<double>(n));
    std::vector<NoJumpImage> imgs;
    for (int s = 0; s < code.d(); ++s)
        imgs.push_back(perturbed_no_jump(code, s, rest.mat * shrink.cwiseProduct(code.words[s].amp)));
    RecoveryBranch b0;
    b0.outcome = 0;
    b0.projector = rest;
    b0.unitary = unitary_completion(rotation_pairs(code, imgs, rm.flags), cutoff);
    b0.op = b0.unitary * b0.projector;
    RecoveryBranch b1;
    b1.outcome = 1;
    b1.projector = p1;
    b1.unitary = unitary_completion(transfer_pairs(code, images, which), cutoff);
    b1.op = b1.unitary * b1.projector;
    rm.branches = {b0, b1};
    return rm;
}

}  // namespace bqec
