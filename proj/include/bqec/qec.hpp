#pragma once

#include "bqec/codes.hpp"

#include <string>
#include <utility>
#include <vector>

namespace bqec {

struct QecReport {
    // alpha[(l,k)] = <W_0|E_l^dag E_k|W_0>; per_word holds the same matrix for every word
    Mat alpha;
    std::vector<Mat> per_word;
    double offdiag_defect = 0.0;
    double worddep_defect = 0.0;
    double tolerance = 1e-9;
    bool passed = false;
};

QecReport kl_matrix(const Code& code, const std::vector<Operator>& errors, double tol = 1e-9);

struct ErrorWords {
    // E|W_sigma>, normalized; zero vector where the error annihilates the word
    std::vector<StateVector> images;
    std::vector<double> norms;
    std::vector<bool> annihilated;
    // normalized component of E|W_sigma> orthogonal to the code space; zero vector
    // (and has_orthogonal=false) when the image stays inside the code space
    std::vector<StateVector> orthogonal;
    std::vector<bool> has_orthogonal;
    // <image_i|image_j>
    Mat overlaps;
};

ErrorWords error_words(const Code& code, const Operator& error, double tol = 1e-12);

using StatePair = std::pair<StateVector, StateVector>;

// Unitary sending each source to its target. Basis vectors untouched by every
// source and target are kept fixed; the rest of the complement is completed by
// ordered Gram-Schmidt over the standard basis.
Operator unitary_completion(const std::vector<StatePair>& pairs, int cutoff, int modes = 1, double tol = 1e-10);

double unitarity_defect(const Operator& u);

struct LogicalGates {
    Operator Z;
    Operator X;
    Operator phase(double theta) const;

    std::vector<StateVector> words;
};

LogicalGates logical_gates(const Code& code);

// (a^dag)^j a^k counted by powers only
struct Monomial {
    int j = 0;
    int k = 0;
    bool operator==(const Monomial&) const = default;
};

struct ErrorGenerator {
    std::vector<Monomial> terms;
    int order = 1;
};

struct RequiredParams {
    int L = 0;
    int G = 0;
    int N = 0;
    std::vector<Monomial> worst_case;
};

// Worst-case set {A_i^{x_i}} U {(A_i^dag A_i)^{floor(x_i/2)}} expanded into monomials.
RequiredParams required_code_params(const std::vector<ErrorGenerator>& generators);

}  // namespace bqec
