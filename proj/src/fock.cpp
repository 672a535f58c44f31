#include "bqec/fock.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <iostream>
#include <stdexcept>

namespace bqec {

Eigen::Index space_dim(int cutoff, int modes) {
    Eigen::Index d = 1;
    for (int i = 0; i < modes; ++i) d *= (cutoff + 1);
    return d;
}

StateVector::StateVector(Vec a, int cutoff_, int modes_, bool normalized_)
    : amp(std::move(a)), cutoff(cutoff_), modes(modes_), normalized(normalized_) {
    if (modes < 1 || modes > 2) throw std::invalid_argument("modes must be 1 or 2");
    if (amp.size() != space_dim(cutoff, modes))
        throw std::invalid_argument("amplitude count does not match cutoff");
}

StateVector StateVector::basis(int n, int cutoff) {
    if (n < 0 || n > cutoff) throw std::out_of_range("Fock index exceeds cutoff");
    Vec v = Vec::Zero(cutoff + 1);
    v(n) = 1.0;
    return {v, cutoff, 1, true};
}

StateVector StateVector::basis(int n1, int n2, int cutoff) {
    if (n1 < 0 || n2 < 0 || n1 > cutoff || n2 > cutoff)
        throw std::out_of_range("Fock index exceeds cutoff");
    Vec v = Vec::Zero(space_dim(cutoff, 2));
    v(n1 * (cutoff + 1) + n2) = 1.0;
    return {v, cutoff, 2, true};
}

StateVector StateVector::zero(int cutoff, int modes) {
    return {Vec::Zero(space_dim(cutoff, modes)), cutoff, modes, false};
}

StateVector StateVector::normalized_copy() const {
    double nrm = norm();
    if (nrm == 0.0) throw std::domain_error("cannot normalize the zero vector");
    return {amp / nrm, cutoff, modes, true};
}

cplx StateVector::inner(const StateVector& other) const {
    if (dim() != other.dim()) throw std::invalid_argument("dimension mismatch");
    return amp.dot(other.amp);
}

Operator::Operator(Mat m, int cutoff_, int modes_, bool hermitian_)
    : mat(std::move(m)), cutoff(cutoff_), modes(modes_), hermitian(hermitian_) {
    if (mat.rows() != mat.cols()) throw std::invalid_argument("operator must be square");
    if (mat.rows() != space_dim(cutoff, modes))
        throw std::invalid_argument("operator dimension does not match cutoff");
    if (hermitian && hermiticity_defect() >= 1e-12)
        throw std::invalid_argument("hermitian hint set on a non-hermitian matrix");
}

Operator Operator::identity(int cutoff, int modes) {
    auto d = space_dim(cutoff, modes);
    return {Mat::Identity(d, d), cutoff, modes, true};
}

Operator Operator::zero(int cutoff, int modes) {
    auto d = space_dim(cutoff, modes);
    return {Mat::Zero(d, d), cutoff, modes, true};
}

Operator Operator::projector(const std::vector<StateVector>& orthonormal) {
    if (orthonormal.empty()) throw std::invalid_argument("projector needs at least one vector");
    const auto& f = orthonormal.front();
    Mat p = Mat::Zero(f.dim(), f.dim());
    for (const auto& v : orthonormal) {
        if (v.dim() != f.dim()) throw std::invalid_argument("dimension mismatch");
        p += v.amp * v.amp.adjoint();
    }
    p = 0.5 * (p + p.adjoint()).eval();
    return {p, f.cutoff, f.modes, true};
}

Operator Operator::adjoint() const { return {mat.adjoint(), cutoff, modes, hermitian}; }

Operator Operator::pow(int k) const {
    if (k < 0) throw std::invalid_argument("negative operator power");
    Mat r = Mat::Identity(dim(), dim());
    for (int i = 0; i < k; ++i) r = r * mat;
    return {r, cutoff, modes, false};
}

double Operator::hermiticity_defect() const {
    return (mat - mat.adjoint()).cwiseAbs().maxCoeff();
}

static void require_same_space(const Operator& a, const Operator& b) {
    if (a.dim() != b.dim() || a.modes != b.modes) throw std::invalid_argument("dimension mismatch");
}

Operator Operator::operator*(const Operator& rhs) const {
    require_same_space(*this, rhs);
    return {mat * rhs.mat, cutoff, modes, false};
}

Operator Operator::operator+(const Operator& rhs) const {
    require_same_space(*this, rhs);
    return {mat + rhs.mat, cutoff, modes, false};
}

Operator Operator::operator-(const Operator& rhs) const {
    require_same_space(*this, rhs);
    return {mat - rhs.mat, cutoff, modes, false};
}

StateVector Operator::operator*(const StateVector& v) const {
    if (v.dim() != dim()) throw std::invalid_argument("dimension mismatch");
    return {mat * v.amp, cutoff, modes, false};
}

Operator operator*(cplx s, const Operator& op) { return {s * op.mat, op.cutoff, op.modes, false}; }

ModeOperators mode_operators(int cutoff) {
    if (cutoff < 1) throw std::invalid_argument("cutoff must be at least 1");
    Mat a = Mat::Zero(cutoff + 1, cutoff + 1);
    for (int n = 1; n <= cutoff; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    Mat num = Mat::Zero(cutoff + 1, cutoff + 1);
    for (int n = 0; n <= cutoff; ++n) num(n, n) = static_cast<double>(n);
    return {Operator(a, cutoff), Operator(a.adjoint(), cutoff), Operator(num, cutoff, 1, true)};
}

Operator displacement(cplx beta, int cutoff) {
    if (!std::isfinite(beta.real()) || !std::isfinite(beta.imag()))
        throw std::invalid_argument("displacement amplitude must be finite");
    if (std::norm(beta) > 0.25 * cutoff)
        std::clog << "bqec: displacement |beta|^2=" << std::norm(beta)
                  << " is not small against cutoff " << cutoff << "\n";
    auto ops = mode_operators(cutoff);
    // generator A = beta a^dag - beta^* a is anti-hermitian; H = iA is hermitian
    Mat h = cplx(0, 1) * (beta * ops.creation.mat - std::conj(beta) * ops.annihilation.mat);
    h = 0.5 * (h + h.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    Vec phases = (-cplx(0, 1) * es.eigenvalues().cast<cplx>()).array().exp();
    Mat d = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
    return {d, cutoff};
}

Operator tensor_product(const Operator& a, const Operator& b) {
    if (a.modes != 1 || b.modes != 1) throw std::invalid_argument("tensor_product needs single-mode operands");
    if (a.cutoff != b.cutoff) throw std::invalid_argument("tensor_product needs equal cutoffs");
    auto n = a.dim();
    Mat k(n * n, n * n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) k.block(i * n, j * n, n, n) = a.mat(i, j) * b.mat;
    return {k, a.cutoff, 2, a.hermitian && b.hermitian};
}

StateVector tensor_product(const StateVector& a, const StateVector& b) {
    if (a.modes != 1 || b.modes != 1) throw std::invalid_argument("tensor_product needs single-mode operands");
    if (a.cutoff != b.cutoff) throw std::invalid_argument("tensor_product needs equal cutoffs");
    auto n = a.dim();
    Vec v(n * n);
    for (Eigen::Index i = 0; i < n; ++i) v.segment(i * n, n) = a.amp(i) * b.amp;
    return {v, a.cutoff, 2, a.normalized && b.normalized};
}

Operator on_mode(const Operator& op, int which) {
    auto id = Operator::identity(op.cutoff);
    if (which == 0) return tensor_product(op, id);
    if (which == 1) return tensor_product(id, op);
    throw std::invalid_argument("mode index must be 0 or 1");
}

cplx expectation(const StateVector& state, const Operator& op) {
    if (state.dim() != op.dim()) throw std::invalid_argument("dimension mismatch");
    return state.amp.dot(op.mat * state.amp);
}

int default_cutoff(int N, int S, int G) { return (N + 1) * (S + 1) + std::max(G, 1) * 4; }

double max_abs_block(const Mat& m, Eigen::Index block) {
    if (block <= 0 || block > m.rows()) block = m.rows();
    if (block == 0) return 0.0;
    return m.topLeftCorner(block, block).cwiseAbs().maxCoeff();
}

}  // namespace bqec
