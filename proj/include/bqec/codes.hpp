#pragma once

#include "bqec/fock.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <vector>

namespace bqec {

enum class CodeTag { binomial, binomial_dual, qudit, cat, two_mode, naive, opt_sqrt17, opt_sqrt21, custom };

std::string to_string(CodeTag tag);
CodeTag code_tag_from_string(const std::string& s);

struct CodeParams {
    int N = 0;
    int S = 0;
    int L = 0;
    int G = 0;
    int D = 0;
    int d = 2;
    int cutoff = 0;

    // N = max{L, G, 2D}, S = L + G
    static CodeParams from_errors(int L, int G, int D, int cutoff = -1);
};

struct Code {
    std::vector<StateVector> words;
    CodeParams params;
    CodeTag tag = CodeTag::custom;
    int modes = 1;
    // max |<W_i|W_j> - delta_ij|
    double orthogonality_defect = 0.0;

    int d() const { return static_cast<int>(words.size()); }
    int cutoff() const { return params.cutoff; }
    Eigen::Index dim() const { return words.front().dim(); }

    Mat gram() const;
    Operator code_projector() const;
    // (1/d) sum_sigma |W_sigma><W_sigma|
    Mat mixed_state() const;
    // total photon number averaged over the maximally mixed code state
    double mean_photon_number() const;
    // occupied basis indices of word i (|amp| > tol)
    std::vector<int> support(int i, double tol = 1e-14) const;
};

// Validates shapes and orthonormality (defect <= tol), fixes the global phase
// of each word so its first nonzero amplitude is real positive.
Code make_code(std::vector<StateVector> words, CodeParams params, CodeTag tag, double tol = 1e-10);

// Multiply by a phase so the first nonzero amplitude is real positive.
StateVector canonical_phase(const StateVector& v, double tol = 1e-14);

// Declared parameters of a binomial code with given (N,S): L = min(N,S), G = 0, D = N/2.
Code binomial_code(int N, int S, int cutoff = -1);
Code binomial_dual_basis(int N, int S, int cutoff = -1);

boost::multiprecision::cpp_int extended_binomial(int n, int m, int d);

Code qudit_binomial_code(int N, int S, int d, int cutoff = -1);

// Closed-form moments of qudit words: alpha_1 and alpha_2.
double qudit_alpha1(int N, int S, int d);
double qudit_alpha2(int N, int S, int d);

// 2(S+1)-legged cat words in Fock form; the up word lives on n = 0 mod 2(S+1),
// the down word on n = S+1 mod 2(S+1). Default cutoff keeps the Poisson tail < 1e-14.
Code cat_code(double beta, int S = 1, int cutoff = -1);
int cat_min_cutoff(double beta);
// Poisson mass of a coherent state above the cutoff.
double cat_truncation_tail(double beta, int cutoff);

Code two_mode_code(int N, int S, int cutoff = -1);

enum class OptimizedCode { sqrt17, sqrt21 };
Code optimized_code(OptimizedCode which, int cutoff = -1);

Code naive_code(int cutoff = -1);

// max_{i,j} |<W_i|n^ell|W_i> - <W_j|n^ell|W_j>|, single-mode only
double moment_difference(const Code& code, int ell);

}  // namespace bqec
