#pragma once

#include "bqec/codes.hpp"

#include <string>
#include <vector>

namespace bqec {

enum class RecoveryScheme { parity_projective, word_projective };

struct RecoveryBranch {
    // measurement outcome label (parity branch k, or word-space index)
    int outcome = 0;
    Operator projector;
    Operator unitary;
    // unitary * projector
    Operator op;
};

struct RecoveryMap {
    std::vector<RecoveryBranch> branches;
    RecoveryScheme scheme = RecoveryScheme::parity_projective;
    int order = 0;
    // degenerate or dropped branches, one message each
    std::vector<std::string> flags;

    std::vector<Operator> operators() const;
    // I - sum_k Pi_k, the part of the space no branch catches
    Mat uncovered() const;
    // largest eigenvalue of sum R_k^dag R_k minus one
    double trace_excess() const;
};

struct RecoveryOptions {
    // append the logical X echo to every branch
    bool echo = false;
    // use Taylor-truncated branch images instead of the exact Kraus images
    bool truncated_branches = false;
};

// Taylor-truncated loss image: exact E_k with the scalar prefactor per Fock level
// cut after total order (kappa_dt)^{L/2} for k >= 1 and (kappa_dt)^L for k = 0;
// coefficients below 1e-12 are dropped.
Operator truncated_loss_operator(double kappa_dt, int k, int L, int cutoff);

// Parity-projective recovery R_k = U_k Pi_k, k = 0..L, with Pi_k the projector
// on photon numbers n = -k mod (S+1).
RecoveryMap build_recovery(const Code& code, double kappa_dt, int L, const RecoveryOptions& options = {});

// {P_W, U_1 (I - P_W)} with U_1 swapping the one-loss error words and the code words.
RecoveryMap measurement_recovery(const Code& code);

// {U_0 (I - P_1), U_1 P_1} for the sqrt17 code.
RecoveryMap sqrt17_recovery(double kappa_dt, int cutoff = -1);

}  // namespace bqec
