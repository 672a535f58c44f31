#pragma once

#include "bqec/channels.hpp"
#include "bqec/codes.hpp"
#include "bqec/recovery.hpp"

#include <optional>
#include <string>
#include <vector>

namespace bqec {

// Weighted ensemble of pure states, rho = sum_i w_i |psi_i><psi_i|.
struct Ensemble {
    std::vector<StateVector> states;
    std::vector<double> weights;

    static Ensemble mixed(const Code& code);
    static Ensemble pure(const StateVector& psi);
    Mat density() const;
};

// max-entry of R(E(rho)) - rho. Each branch image R_k E_l psi is split into its
// component along psi and an orthogonal remainder, and the lost weight is
// accumulated from non-negative pieces, so the result keeps relative precision
// far below the double-precision floor of a direct subtraction.
double recovery_residual(const RecoveryMap& recovery, const KrausChannel& channel, const Ensemble& rho);
double recovery_residual(const RecoveryMap& recovery, const KrausChannel& channel, const Code& code);

// 1 - sum_{k,l} |Tr(R_k E_l rho_c)|^2 assembled from non-negative terms (same split).
double entanglement_infidelity(const RecoveryMap& recovery, const KrausChannel& channel, const Code& code);
// The same quantity by direct subtraction; loses precision once it drops below ~1e-15.
double entanglement_infidelity_direct(const RecoveryMap& recovery, const KrausChannel& channel, const Code& code);

// Probability of losing exactly `ell` photons (summed over both modes for two-mode codes)
// on the maximally mixed code state, exact Kraus form.
double loss_probability(const Code& code, int ell, double kappa_dt);
// P_{L+1}/(kappa dt), the rate of uncorrectable losses in units of kappa.
double uncorrectable_rate(const Code& code, int L, double kappa_dt);
// lim P_ell/(kappa dt)^ell = <(a^dag)^ell a^ell>/ell!
double loss_prefactor(const Code& code, int ell);

// two-photon loss probability of two_mode_code(1,1) over binomial_code(1,1)
double two_mode_uncorrectable_ratio(double kappa_dt);

struct CatViolation {
    double closed_form = 0.0;
    double numeric = 0.0;
};

// violation per unit kappa dt: closed form 4u e^{-u}(sin u + cos u), u = beta^2,
// and <C_down|n|C_down> - <C_up|n|C_up> from the Fock words
CatViolation cat_violation(double beta);

struct CatOptimum {
    double u = 0.0;
    double beta = 0.0;
    double mean_photons = 0.0;
};

// Smallest |beta|^2 where the numeric violation vanishes, with the mean photon number there.
CatOptimum cat_optimal_beta();

struct UnfaithfulOptimum {
    double dt_opt = 0.0;
    double rate_opt = 0.0;
    double search_dt = 0.0;
    double search_rate = 0.0;
};

// P_T/dt = N L^{L+1} (kappa dt)^L + eta/dt, in units of kappa
double unfaithful_total_rate(double dt, double eta, int L, double N_prefactor);
UnfaithfulOptimum unfaithful_recovery_optimum(double eta, int L, double N_prefactor);
// N in P_{L+1}/dt ~ N kappa (kappa dt)^L L^{L+1}, from a log-log fit of the exact rate
double fitted_rate_prefactor(const Code& code, int L, const std::vector<double>& kappa_dt_grid);

struct SweepCode {
    Code code;
    int L = 0;
    std::string tag;
};

struct SweepRow {
    double kappa_dt = 0.0;
    std::vector<double> infidelity_rate;
};

struct SweepResult {
    std::vector<std::string> tags;
    std::vector<SweepRow> rows;
};

// naive code (L=0) followed by binomial S=N=L codes for L = 1..max_L
std::vector<SweepCode> scaling_codes(int max_L);
// 40 log-spaced points on [1e-4, 1]
std::vector<double> scaling_grid();

// F_e/dt per code per grid point with matched recovery and an untruncated loss
// channel; rows sorted by kappa_dt.
SweepResult sweep_infidelity(const std::vector<SweepCode>& codes, std::vector<double> dt_grid, int threads = 0);

// Largest kappa_dt at which curve `a` crosses curve `b`, by linear interpolation in
// log-log space between adjacent grid points; below it `a` has the lower rate.
std::optional<double> crossover(const SweepResult& sweep, std::size_t a, std::size_t b);

// log-log slope of column `col` over rows with kappa_dt <= dt_max
double small_dt_slope(const SweepResult& sweep, std::size_t col, double dt_max);

}  // namespace bqec
