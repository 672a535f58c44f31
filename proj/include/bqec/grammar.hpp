#pragma once

#include "bqec/fock.hpp"
#include "bqec/qec.hpp"

#include <string>
#include <vector>

namespace bqec {

// Comma-separated tokens I, a, aK, ad, adK, n, nK (K a positive integer).
// On two modes every non-identity token is applied once per mode.
std::vector<Operator> parse_error_spec(const std::string& spec, int cutoff, int modes = 1);

// "n*a+ad:1;a:2": generators separated by ';', each a '+'-sum of '*'-products
// of the factors I, a, ad, n (optionally ^k), then ':' and the order.
std::vector<ErrorGenerator> parse_generators(const std::string& spec);

}  // namespace bqec
