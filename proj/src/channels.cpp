#include "bqec/channels.hpp"

#include "bqec/fit.hpp"

#include <boost/math/special_functions/beta.hpp>

#include <Eigen/Eigenvalues>

#include <cmath>

namespace bqec {

namespace {

// P(X > k) for X ~ Binomial(n, p)
double binomial_upper_tail(int n, int k, double p) {
    if (k >= n || p <= 0.0) return 0.0;
    if (k < 0) return 1.0;
    if (p >= 1.0) return 1.0;
    return boost::math::ibeta(static_cast<double>(k + 1), static_cast<double>(n - k), p);
}

Mat loss_matrix(double x, int ell, int cutoff) {
    Mat e = Mat::Zero(cutoff + 1, cutoff + 1);
    const double p = -std::expm1(-x);
    if (ell > cutoff) return e;
    if (ell > 0 && p == 0.0) return e;
    const double sg = std::sqrt(loss_gamma(x, ell));
    for (int m = 0; m + ell <= cutoff; ++m) {
        // sqrt((m+l)!/m!) as a product keeps the relative error at a few ulp
        double ladder = 1.0;
        for (int j = m + 1; j <= m + ell; ++j) ladder *= std::sqrt(static_cast<double>(j));
        e(m, m + ell) = sg * std::exp(-0.5 * x * m) * ladder;
    }
    return e;
}

Mat dissipator(const Mat& rho, const std::vector<JumpOperator>& jumps, const std::vector<Mat>& ada) {
    Mat out = Mat::Zero(rho.rows(), rho.cols());
    for (std::size_t i = 0; i < jumps.size(); ++i) {
        const Mat& a = jumps[i].op.mat;
        Mat t = ada[i] * rho;
        out += jumps[i].rate * (a * rho * a.adjoint() - 0.5 * (t + t.adjoint()));
    }
    return out;
}

double completeness(const std::vector<Operator>& ops) {
    const auto d = ops.front().dim();
    Mat s = Mat::Zero(d, d);
    for (const auto& e : ops) s += e.mat.adjoint() * e.mat;
    return (s - Mat::Identity(d, d)).cwiseAbs().maxCoeff();
}

void check_kappa(double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("kappa_dt must be finite");
    if (x < 0.0) throw std::invalid_argument("kappa_dt must be non-negative");
}

}  // namespace

Mat KrausChannel::apply(const Mat& rho) const {
    Mat out = Mat::Zero(rho.rows(), rho.cols());
    for (const auto& e : operators) out += e.mat * rho * e.mat.adjoint();
    return out;
}

double loss_gamma(double kappa_dt, int ell) {
    if (ell == 0) return 1.0;
    double p = -std::expm1(-kappa_dt);
    return std::pow(p, ell) / std::tgamma(ell + 1.0);
}

Operator loss_operator(double kappa_dt, int ell, int cutoff) {
    check_kappa(kappa_dt);
    if (ell < 0) throw std::invalid_argument("loss count must be non-negative");
    return {loss_matrix(kappa_dt, ell, cutoff), cutoff};
}

int loss_ell_max(double kappa_dt, int cutoff, double tol) {
    check_kappa(kappa_dt);
    if (kappa_dt == 0.0) return 0;
    for (int ell = 1; ell <= cutoff; ++ell) {
        double bound = loss_gamma(kappa_dt, ell) * std::pow(static_cast<double>(cutoff), ell);
        double ratio = -std::expm1(-kappa_dt) * cutoff / (ell + 1.0);
        if (bound < tol && ratio < 1.0) return ell - 1;
    }
    return cutoff;
}

KrausChannel loss_kraus(double kappa_dt, int ell_max, int cutoff) {
    check_kappa(kappa_dt);
    if (cutoff < 1) throw std::invalid_argument("cutoff must be at least 1");
    if (ell_max < 0 || ell_max > cutoff) throw std::invalid_argument("ell_max must lie in [0, cutoff]");
    KrausChannel ch;
    ch.kappa_dt = kappa_dt;
    ch.ell_max = ell_max;
    ch.cutoff = cutoff;
    ch.modes = 1;
    for (int ell = 0; ell <= ell_max; ++ell) {
        ch.operators.emplace_back(loss_matrix(kappa_dt, ell, cutoff), cutoff);
        ch.labels.emplace_back(ell, 0);
    }
    ch.completeness_defect = completeness(ch.operators);
    const double p = -std::expm1(-kappa_dt);
    ch.deficit.resize(cutoff + 1);
    for (int n = 0; n <= cutoff; ++n) ch.deficit(n) = binomial_upper_tail(n, ell_max, p);
    return ch;
}

KrausChannel loss_kraus(double kappa_dt, int cutoff) {
    return loss_kraus(kappa_dt, loss_ell_max(kappa_dt, cutoff), cutoff);
}

KrausChannel two_mode_loss_kraus(double kappa_dt, int ell_max, int cutoff) {
    KrausChannel single = loss_kraus(kappa_dt, ell_max, cutoff);
    KrausChannel ch;
    ch.kappa_dt = kappa_dt;
    ch.ell_max = ell_max;
    ch.cutoff = cutoff;
    ch.modes = 2;
    // ordered by total loss count, then by loss on the first mode
    for (int tot = 0; tot <= 2 * ell_max; ++tot)
        for (int l1 = std::max(0, tot - ell_max); l1 <= std::min(tot, ell_max); ++l1) {
            int l2 = tot - l1;
            ch.operators.push_back(tensor_product(single.operators[l1], single.operators[l2]));
            ch.labels.emplace_back(l1, l2);
        }
    ch.completeness_defect = completeness(ch.operators);
    const int c1 = cutoff + 1;
    ch.deficit.resize(c1 * c1);
    for (int n1 = 0; n1 < c1; ++n1)
        for (int n2 = 0; n2 < c1; ++n2) {
            double t1 = single.deficit(n1), t2 = single.deficit(n2);
            ch.deficit(n1 * c1 + n2) = t1 + t2 - t1 * t2;
        }
    return ch;
}

KrausChannel two_mode_loss_kraus(double kappa_dt, int cutoff) {
    return two_mode_loss_kraus(kappa_dt, loss_ell_max(kappa_dt, cutoff), cutoff);
}

std::vector<Operator> discrete_error_set(int L, int G, int D, int cutoff, int modes) {
    if (L < 0 || G < 0 || D < 0) throw std::invalid_argument("error orders must be non-negative");
    if (modes != 1 && modes != 2) throw std::invalid_argument("modes must be 1 or 2");
    auto ops = mode_operators(cutoff);
    std::vector<Operator> single;
    for (int k = 1; k <= L; ++k) single.push_back(ops.annihilation.pow(k));
    for (int k = 1; k <= G; ++k) single.push_back(ops.creation.pow(k));
    for (int k = 1; k <= D; ++k) single.push_back(ops.number.pow(k));
    std::vector<Operator> out{Operator::identity(cutoff, modes)};
    for (const auto& op : single) {
        if (modes == 1) {
            out.push_back(op);
        } else {
            out.push_back(on_mode(op, 0));
            out.push_back(on_mode(op, 1));
        }
    }
    return out;
}

DensityMatrix::DensityMatrix(Mat m) : entries(std::move(m)) {}

DensityMatrix::DensityMatrix(Mat m, double trace_tag_) : entries(std::move(m)), trace_tag(trace_tag_) {}

DensityMatrix DensityMatrix::pure(const StateVector& psi) {
    return DensityMatrix(psi.amp * psi.amp.adjoint(), psi.amp.squaredNorm());
}

void DensityMatrix::validate(double tol) const {
    if (entries.rows() != entries.cols()) throw std::domain_error("density matrix must be square");
    if ((entries - entries.adjoint()).cwiseAbs().maxCoeff() > tol)
        throw std::domain_error("density matrix is not hermitian");
    if (std::abs(trace() - trace_tag) > 1e-9) throw std::domain_error("density matrix trace drifted");
    Mat h = 0.5 * (entries + entries.adjoint());
    Eigen::SelfAdjointEigenSolver<Mat> es(h, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-9) throw std::domain_error("density matrix is not positive");
}

LindbladResult lindblad_evolve(const DensityMatrix& rho0, const std::vector<JumpOperator>& jumps, double t,
                               int steps) {
    if (steps < 100) throw std::invalid_argument("lindblad_evolve needs at least 100 steps");
    if (!(t >= 0.0)) throw std::invalid_argument("evolution time must be non-negative");
    std::vector<Mat> ada;
    for (const auto& j : jumps) {
        if (j.rate < 0.0) throw std::invalid_argument("jump rates must be non-negative");
        if (j.op.dim() != rho0.entries.rows()) throw std::invalid_argument("dimension mismatch");
        ada.push_back(j.op.mat.adjoint() * j.op.mat);
    }
    const double h = t / steps;
    Mat rho = rho0.entries;
    if (t > 0.0) {
        for (int s = 0; s < steps; ++s) {
            Mat k1 = dissipator(rho, jumps, ada);
            Mat k2 = dissipator(rho + 0.5 * h * k1, jumps, ada);
            Mat k3 = dissipator(rho + 0.5 * h * k2, jumps, ada);
            Mat k4 = dissipator(rho + h * k3, jumps, ada);
            rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
    }
    LindbladResult r;
    r.trace_drift = std::abs(rho.trace().real() - rho0.entries.trace().real());
    r.steps = steps;
    if (r.trace_drift > 1e-7) throw IntegrationError("RK4 trace drift exceeds 1e-7; raise the step count");
    r.rho = DensityMatrix(rho, rho0.trace_tag);
    return r;
}

LindbladResult lindblad_converged(const DensityMatrix& rho0, const std::vector<JumpOperator>& jumps, double t,
                                  int steps, double tol, int max_doublings) {
    LindbladResult prev = lindblad_evolve(rho0, jumps, t, steps);
    for (int i = 0; i < max_doublings; ++i) {
        steps *= 2;
        LindbladResult next = lindblad_evolve(rho0, jumps, t, steps);
        double diff = (next.rho.entries - prev.rho.entries).cwiseAbs().maxCoeff();
        if (diff < tol) return next;
        prev = std::move(next);
    }
    throw IntegrationError("RK4 step halving did not converge");
}

double kraus_taylor_leading(int ell, const std::vector<double>& kappa_dt_grid, int cutoff) {
    if (kappa_dt_grid.size() < 5) throw std::invalid_argument("fit grid needs at least 5 points");
    auto a = mode_operators(cutoff).annihilation.pow(ell).mat;
    std::vector<double> ys;
    for (double x : kappa_dt_grid) {
        if (x > 1e-2) throw std::invalid_argument("fit grid must stay at or below 1e-2");
        Mat lead = std::sqrt(std::pow(x, ell) / std::tgamma(ell + 1.0)) * a;
        ys.push_back((loss_matrix(x, ell, cutoff) - lead).norm());
    }
    auto f = fit_loglog(kappa_dt_grid, ys);
    if (f.max_residual > 0.05) throw std::runtime_error("Kraus scaling fit residual too large");
    return f.exponent;
}

double kraus_norm_exponent(int ell, const std::vector<double>& kappa_dt_grid, int cutoff) {
    if (kappa_dt_grid.size() < 5) throw std::invalid_argument("fit grid needs at least 5 points");
    std::vector<double> ys;
    for (double x : kappa_dt_grid) {
        Mat e = loss_matrix(x, ell, cutoff);
        if (ell == 0) e -= Mat::Identity(cutoff + 1, cutoff + 1);
        ys.push_back(e.norm());
    }
    auto f = fit_loglog(kappa_dt_grid, ys);
    if (f.max_residual > 0.05) throw std::runtime_error("Kraus scaling fit residual too large");
    return f.exponent;
}

}  // namespace bqec
