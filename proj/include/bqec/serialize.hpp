#pragma once

#include "bqec/codes.hpp"

#include <json.hpp>

#include <string>

namespace bqec {

inline constexpr const char* kToolVersion = "0.3.0";

// {"modes","cutoff","tag","params":{N,S,L,G,D,d},"words":[[[re,im],...],...]}
// Two-mode words are stored flattened, index n1*(cutoff+1) + n2.
nlohmann::json code_to_json(const Code& code);
// Rebuilds and re-validates the code; throws std::invalid_argument on malformed input.
Code code_from_json(const nlohmann::json& j);

void save_code(const Code& code, const std::string& path, const nlohmann::json& meta);
Code load_code(const std::string& path);

}  // namespace bqec
