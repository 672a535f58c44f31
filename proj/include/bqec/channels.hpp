#pragma once

#include "bqec/fock.hpp"

#include <stdexcept>
#include <utility>
#include <vector>

namespace bqec {

struct KrausChannel {
    std::vector<Operator> operators;
    // per-operator loss counts; second entry is used by two-mode channels only
    std::vector<std::pair<int, int>> labels;
    double kappa_dt = 0.0;
    int ell_max = 0;
    int cutoff = 0;
    int modes = 1;
    // ||sum E^dag E - I||_max over the full truncated space
    double completeness_defect = 0.0;
    // diagonal of I - sum E^dag E, evaluated analytically as the binomial tail
    // of dropped jump counts; exact and non-negative
    Eigen::VectorXd deficit;

    std::size_t size() const { return operators.size(); }
    Mat apply(const Mat& rho) const;
};

// gamma_l = (1 - e^{-x})^l / l!
double loss_gamma(double kappa_dt, int ell);

// Smallest ell_max such that the first dropped term obeys gamma_l * cutoff^l < tol
// (a bound on ||E_l||^2), capped at cutoff.
int loss_ell_max(double kappa_dt, int cutoff, double tol = 1e-14);

// E_l = sqrt(gamma_l) e^{-x n/2} a^l as a matrix
Operator loss_operator(double kappa_dt, int ell, int cutoff);

KrausChannel loss_kraus(double kappa_dt, int ell_max, int cutoff);
KrausChannel loss_kraus(double kappa_dt, int cutoff);

// Independent loss on both modes with equal rate: E_{l1 l2} = E_l1 (x) E_l2.
KrausChannel two_mode_loss_kraus(double kappa_dt, int ell_max, int cutoff);
KrausChannel two_mode_loss_kraus(double kappa_dt, int cutoff);

// {I, a..a^L, a^dag..(a^dag)^G, n..n^D}; on two modes every non-identity term
// is expanded once per mode.
std::vector<Operator> discrete_error_set(int L, int G, int D, int cutoff, int modes = 1);

struct DensityMatrix {
    Mat entries;
    double trace_tag = 1.0;

    DensityMatrix() = default;
    // unit-trace state
    explicit DensityMatrix(Mat m);
    DensityMatrix(Mat m, double trace_tag_);

    static DensityMatrix pure(const StateVector& psi);
    // hermitian, trace and positivity checks; throws std::domain_error
    void validate(double tol = 1e-10) const;
    double trace() const { return entries.trace().real(); }
};

struct IntegrationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct JumpOperator {
    Operator op;
    double rate = 0.0;
};

struct LindbladResult {
    DensityMatrix rho;
    double trace_drift = 0.0;
    int steps = 0;
};

// Fixed-step RK4 of d(rho)/dt = sum_i rate_i D[A_i] rho.
LindbladResult lindblad_evolve(const DensityMatrix& rho0, const std::vector<JumpOperator>& jumps, double t,
                               int steps);

// Repeats lindblad_evolve, doubling the step count until two successive results
// differ by less than tol in max entry.
LindbladResult lindblad_converged(const DensityMatrix& rho0, const std::vector<JumpOperator>& jumps, double t,
                                  int steps = 100, double tol = 1e-9, int max_doublings = 12);

// Exponent of ||E_l - sqrt(x^l/l!) a^l||_F over the grid (subleading order, > l/2).
double kraus_taylor_leading(int ell, const std::vector<double>& kappa_dt_grid, int cutoff = 12);
// Exponent of ||E_l||_F (l >= 1) or ||E_0 - I||_F (l = 0).
double kraus_norm_exponent(int ell, const std::vector<double>& kappa_dt_grid, int cutoff = 12);

}  // namespace bqec
