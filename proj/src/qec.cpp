#include "bqec/qec.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace bqec {

QecReport kl_matrix(const Code& code, const std::vector<Operator>& errors, double tol) {
    if (errors.empty()) throw std::invalid_argument("error set is empty");
    for (const auto& e : errors)
        if (e.dim() != code.dim()) throw std::invalid_argument("error operator dimension mismatch");
    const int d = code.d();
    const auto m = static_cast<Eigen::Index>(errors.size());
    // images[s][l] = E_l |W_s>
    std::vector<std::vector<Vec>> images(d);
    for (int s = 0; s < d; ++s)
        for (const auto& e : errors) images[s].push_back(e.mat * code.words[s].amp);

    QecReport r;
    r.tolerance = tol;
    for (int s = 0; s < d; ++s) {
        Mat a(m, m);
        for (Eigen::Index l = 0; l < m; ++l)
            for (Eigen::Index k = 0; k < m; ++k) a(l, k) = images[s][l].dot(images[s][k]);
        r.per_word.push_back(a);
    }
    for (int s = 0; s < d; ++s)
        for (int t = 0; t < d; ++t) {
            if (s == t) continue;
            for (Eigen::Index l = 0; l < m; ++l)
                for (Eigen::Index k = 0; k < m; ++k)
                    r.offdiag_defect = std::max(r.offdiag_defect, std::abs(images[s][l].dot(images[t][k])));
            r.worddep_defect = std::max(r.worddep_defect, (r.per_word[s] - r.per_word[t]).cwiseAbs().maxCoeff());
        }
    r.alpha = r.per_word.front();
    r.passed = r.offdiag_defect <= tol && r.worddep_defect <= tol;
    return r;
}

ErrorWords error_words(const Code& code, const Operator& error, double tol) {
    if (error.dim() != code.dim()) throw std::invalid_argument("error operator dimension mismatch");
    ErrorWords ew;
    const int d = code.d();
    Mat proj = code.code_projector().mat;
    std::vector<Vec> raw;
    for (int s = 0; s < d; ++s) {
        Vec v = error.mat * code.words[s].amp;
        double nv = v.norm();
        raw.push_back(v);
        ew.norms.push_back(nv);
        bool dead = nv <= tol;
        ew.annihilated.push_back(dead);
        if (dead) {
            ew.images.push_back(StateVector::zero(code.cutoff(), code.modes));
            ew.orthogonal.push_back(StateVector::zero(code.cutoff(), code.modes));
            ew.has_orthogonal.push_back(false);
            continue;
        }
        ew.images.push_back(StateVector(v / nv, code.cutoff(), code.modes, true));
        Vec r = v - proj * v;
        r -= proj * r;
        double nr = r.norm();
        if (nr <= tol * std::max(1.0, nv)) {
            ew.orthogonal.push_back(StateVector::zero(code.cutoff(), code.modes));
            ew.has_orthogonal.push_back(false);
        } else {
            ew.orthogonal.push_back(canonical_phase(StateVector(r / nr, code.cutoff(), code.modes, true)));
            ew.has_orthogonal.push_back(true);
        }
    }
    ew.overlaps.resize(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) ew.overlaps(i, j) = ew.images[i].amp.dot(ew.images[j].amp);
    if (std::all_of(ew.annihilated.begin(), ew.annihilated.end(), [](bool b) { return b; }))
        throw std::invalid_argument("error annihilates every code word");
    return ew;
}

namespace {

// Orthonormal completion of span(cols) over standard basis vectors in `order`.
std::vector<Vec> gram_schmidt_complement(const std::vector<Vec>& cols, const std::vector<Eigen::Index>& order,
                                         Eigen::Index dim, std::size_t want) {
    std::vector<Vec> basis = cols;
    std::vector<Vec> out;
    for (auto i : order) {
        if (out.size() == want) break;
        Vec v = Vec::Zero(dim);
        v(i) = 1.0;
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& b : basis) v -= b.dot(v) * b;
        double n = v.norm();
        if (n > 1e-8) {
            v /= n;
            basis.push_back(v);
            out.push_back(v);
        }
    }
    if (out.size() != want) throw std::runtime_error("unitary completion failed to span the complement");
    return out;
}

double orthonormality_defect(const std::vector<Vec>& vs) {
    double worst = 0.0;
    for (std::size_t i = 0; i < vs.size(); ++i)
        for (std::size_t j = 0; j < vs.size(); ++j) {
            cplx g = vs[i].dot(vs[j]) - (i == j ? 1.0 : 0.0);
            worst = std::max(worst, std::abs(g));
        }
    return worst;
}

}  // namespace

Operator unitary_completion(const std::vector<StatePair>& pairs, int cutoff, int modes, double tol) {
    const Eigen::Index dim = space_dim(cutoff, modes);
    std::vector<Vec> src, tgt;
    for (const auto& [s, t] : pairs) {
        if (s.dim() != dim || t.dim() != dim) throw std::invalid_argument("pair dimension mismatch");
        src.push_back(s.amp);
        tgt.push_back(t.amp);
    }
    if (orthonormality_defect(src) > tol) throw std::invalid_argument("sources are not orthonormal");
    if (orthonormality_defect(tgt) > tol) throw std::invalid_argument("targets are not orthonormal");

    // basis states with no weight in any source or target are mapped to themselves
    std::vector<bool> touched(dim, false);
    for (Eigen::Index i = 0; i < dim; ++i)
        for (std::size_t p = 0; p < src.size(); ++p)
            if (src[p](i) != 0.0 || tgt[p](i) != 0.0) touched[i] = true;

    Mat u = Mat::Zero(dim, dim);
    std::vector<Eigen::Index> order;
    for (Eigen::Index i = 0; i < dim; ++i) {
        if (touched[i])
            order.push_back(i);
        else
            u(i, i) = 1.0;
    }
    for (std::size_t p = 0; p < src.size(); ++p) u += tgt[p] * src[p].adjoint();
    const std::size_t rest = order.size() - src.size();
    if (order.size() < src.size()) throw std::invalid_argument("too many pairs for the touched subspace");
    auto cs = gram_schmidt_complement(src, order, dim, rest);
    auto ct = gram_schmidt_complement(tgt, order, dim, rest);
    for (std::size_t i = 0; i < rest; ++i) u += ct[i] * cs[i].adjoint();
    Operator out(u, cutoff, modes);
    if (unitarity_defect(out) > tol) throw std::runtime_error("completed operator is not unitary");
    return out;
}

double unitarity_defect(const Operator& u) {
    return (u.mat.adjoint() * u.mat - Mat::Identity(u.dim(), u.dim())).cwiseAbs().maxCoeff();
}

Operator LogicalGates::phase(double theta) const {
    const auto dim = words[0].dim();
    Mat pu = words[0].amp * words[0].amp.adjoint();
    Mat pd = words[1].amp * words[1].amp.adjoint();
    Mat m = Mat::Identity(dim, dim) - pu - pd;
    m += std::polar(1.0, -0.5 * theta) * pu + std::polar(1.0, 0.5 * theta) * pd;
    return {m, words[0].cutoff, words[0].modes};
}

LogicalGates logical_gates(const Code& code) {
    if (code.d() != 2) throw std::invalid_argument("logical gates need a two-word code");
    const auto dim = code.dim();
    const Vec& u = code.words[0].amp;
    const Vec& d = code.words[1].amp;
    Mat rest = Mat::Identity(dim, dim) - u * u.adjoint() - d * d.adjoint();
    LogicalGates g;
    g.words = code.words;
    g.Z = Operator(u * u.adjoint() - d * d.adjoint() + rest, code.cutoff(), code.modes);
    g.X = Operator(d * u.adjoint() + u * d.adjoint() + rest, code.cutoff(), code.modes);
    return g;
}

namespace {

std::vector<Monomial> dedupe(std::vector<Monomial> ms) {
    std::set<std::pair<int, int>> seen;
    std::vector<Monomial> out;
    for (const auto& m : ms)
        if (seen.insert({m.j, m.k}).second) out.push_back(m);
    return out;
}

std::vector<Monomial> product(const std::vector<Monomial>& a, const std::vector<Monomial>& b) {
    std::vector<Monomial> out;
    for (const auto& x : a)
        for (const auto& y : b) out.push_back({x.j + y.j, x.k + y.k});
    return dedupe(out);
}

std::vector<Monomial> power(const std::vector<Monomial>& a, int x) {
    std::vector<Monomial> out{{0, 0}};
    for (int i = 0; i < x; ++i) out = product(out, a);
    return out;
}

}  // namespace

RequiredParams required_code_params(const std::vector<ErrorGenerator>& generators) {
    if (generators.empty()) throw std::invalid_argument("generator list is empty");
    std::vector<Monomial> worst;
    for (const auto& g : generators) {
        if (g.terms.empty()) throw std::invalid_argument("generator without monomials");
        if (g.order < 1) throw std::invalid_argument("generator order must be at least 1");
        for (const auto& m : g.terms)
            if (m.j < 0 || m.k < 0) throw std::invalid_argument("negative monomial power");
        std::vector<Monomial> adj;
        for (const auto& m : g.terms) adj.push_back({m.k, m.j});
        auto a_x = power(g.terms, g.order);
        auto dephase = power(product(adj, g.terms), g.order / 2);
        worst.insert(worst.end(), a_x.begin(), a_x.end());
        worst.insert(worst.end(), dephase.begin(), dephase.end());
    }
    RequiredParams r;
    r.worst_case = dedupe(worst);
    for (const auto& m : r.worst_case) {
        r.L = std::max(r.L, m.k - m.j);
        r.G = std::max(r.G, m.j - m.k);
        r.N = std::max(r.N, m.j + m.k);
    }
    return r;
}

}  // namespace bqec
