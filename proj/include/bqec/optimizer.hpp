#pragma once

#include "bqec/codes.hpp"

#include <cstdint>
#include <vector>

namespace bqec {

struct OptimizationProblem {
    int L = 1;
    int G = 0;
    int cutoff = 5;
    // max KL entry defect accepted as feasible
    double tolerance_kl = 1e-9;
    int restarts = 32;
    std::uint64_t seed = 1;
    // search over complex amplitudes instead of real ones
    bool complex_amplitudes = false;
    // allowed Fock levels per word; empty means every level 0..cutoff
    std::vector<std::vector<int>> support;
    long max_evaluations = 100000;
    int threads = 0;

    void validate() const;
};

struct RestartRecord {
    int index = 0;
    double objective = 0.0;
    double kl_defect = 0.0;
    bool feasible = false;
    long evaluations = 0;
};

struct OptResult {
    Code code;
    // <(a^dag)^{L+1} a^{L+1}>/(L+1)! on the maximally mixed code state
    double objective = 0.0;
    double kl_defect = 0.0;
    bool converged = false;
    int best_restart = -1;
    std::vector<RestartRecord> restart_log;
};

// Sum of squared KL violations: every <W_s|E_l^dag E_k|W_t> with s < t, plus
// the word dependence of every diagonal entry (l <= k) over word pairs.
double kl_penalty(const std::vector<StateVector>& words, const std::vector<Operator>& errors);

// max KL entry defect (off-diagonal and word dependence) of the words against
// {I, a..a^L, a^dag..(a^dag)^G}
double kl_defect(const Code& code, int L, int G);

// Penalized Nelder-Mead from a binomial warm start (restart 0) and seeded
// random restarts, each followed by Gauss-Newton restoration of the KL equalities.
OptResult optimize_code(const OptimizationProblem& problem);

}  // namespace bqec
