#pragma once

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace bqec {

using cplx = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;

constexpr double kDefaultTol = 1e-10;

// Dimension of a (cutoff, modes) space: (cutoff+1)^modes.
Eigen::Index space_dim(int cutoff, int modes);

// Amplitudes over Fock levels 0..cutoff per mode. Two-mode states are
// flattened row-major: index = n1*(cutoff+1) + n2.
struct StateVector {
    Vec amp;
    int cutoff = 0;
    int modes = 1;
    bool normalized = false;

    StateVector() = default;
    StateVector(Vec a, int cutoff_, int modes_ = 1, bool normalized_ = false);

    static StateVector basis(int n, int cutoff);
    static StateVector basis(int n1, int n2, int cutoff);
    static StateVector zero(int cutoff, int modes = 1);

    Eigen::Index dim() const { return amp.size(); }
    double norm() const { return amp.norm(); }
    StateVector normalized_copy() const;
    cplx inner(const StateVector& other) const;  // <this|other>
    cplx operator[](Eigen::Index i) const { return amp(i); }
};

struct Operator {
    Mat mat;
    int cutoff = 0;
    int modes = 1;
    bool hermitian = false;

    Operator() = default;
    Operator(Mat m, int cutoff_, int modes_ = 1, bool hermitian_ = false);

    static Operator identity(int cutoff, int modes = 1);
    static Operator zero(int cutoff, int modes = 1);
    static Operator projector(const std::vector<StateVector>& orthonormal);

    Eigen::Index dim() const { return mat.rows(); }
    Operator adjoint() const;
    Operator pow(int k) const;
    double hermiticity_defect() const;

    Operator operator*(const Operator& rhs) const;
    Operator operator+(const Operator& rhs) const;
    Operator operator-(const Operator& rhs) const;
    StateVector operator*(const StateVector& v) const;
};

Operator operator*(cplx s, const Operator& op);

struct ModeOperators {
    Operator annihilation;
    Operator creation;
    Operator number;
};

ModeOperators mode_operators(int cutoff);

// exp(beta a^dag - beta^* a) via eigendecomposition of the Hermitian generator.
Operator displacement(cplx beta, int cutoff);

Operator tensor_product(const Operator& a, const Operator& b);
StateVector tensor_product(const StateVector& a, const StateVector& b);

// Lift a single-mode operator onto mode 0 or 1 of a two-mode space.
Operator on_mode(const Operator& op, int which);

cplx expectation(const StateVector& state, const Operator& op);

// (N+1)(S+1) + max(G,1)*4
int default_cutoff(int N, int S, int G);

// max |M_ij| over the leading block of size `block` (whole matrix if block <= 0)
double max_abs_block(const Mat& m, Eigen::Index block = 0);

}  // namespace bqec
