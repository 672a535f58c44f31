#include "bqec/grammar.hpp"

#include <regex>
#include <sstream>
#include <stdexcept>

namespace bqec {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(item);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return {};
    return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

int parse_power(const std::string& digits, const std::string& token) {
    if (digits.empty()) return 1;
    int k = std::stoi(digits);
    if (k < 1) throw std::invalid_argument("power must be positive in '" + token + "'");
    return k;
}

}  // namespace

std::vector<Operator> parse_error_spec(const std::string& spec, int cutoff, int modes) {
    if (modes != 1 && modes != 2) throw std::invalid_argument("modes must be 1 or 2");
    static const std::regex tok(R"((I|ad|a|n)([0-9]*))");
    auto ops = mode_operators(cutoff);
    std::vector<Operator> out;
    for (const auto& raw : split(spec, ',')) {
        const std::string t = trim(raw);
        std::smatch m;
        if (!std::regex_match(t, m, tok)) throw std::invalid_argument("unknown error token '" + t + "'");
        const std::string base = m[1];
        if (base == "I") {
            if (!m[2].str().empty()) throw std::invalid_argument("identity takes no power: '" + t + "'");
            out.push_back(Operator::identity(cutoff, modes));
            continue;
        }
        const int k = parse_power(m[2], t);
        const Operator& b = base == "a" ? ops.annihilation : base == "ad" ? ops.creation : ops.number;
        Operator single = b.pow(k);
        if (modes == 1) {
            out.push_back(single);
        } else {
            out.push_back(on_mode(single, 0));
            out.push_back(on_mode(single, 1));
        }
    }
    if (out.empty()) throw std::invalid_argument("empty error spec");
    return out;
}

std::vector<ErrorGenerator> parse_generators(const std::string& spec) {
    static const std::regex factor(R"((I|ad|a|n)(\^([0-9]+))?)");
    std::vector<ErrorGenerator> gens;
    for (const auto& raw : split(spec, ';')) {
        const std::string g = trim(raw);
        auto colon = g.rfind(':');
        if (colon == std::string::npos) throw std::invalid_argument("generator '" + g + "' lacks ':order'");
        ErrorGenerator gen;
        const std::string order = trim(g.substr(colon + 1));
        if (order.empty() || order.find_first_not_of("0123456789") != std::string::npos)
            throw std::invalid_argument("bad order in '" + g + "'");
        gen.order = std::stoi(order);
        if (gen.order < 1) throw std::invalid_argument("order must be at least 1 in '" + g + "'");
        for (const auto& term : split(g.substr(0, colon), '+')) {
            Monomial mono;
            for (const auto& f : split(term, '*')) {
                const std::string t = trim(f);
                std::smatch m;
                if (!std::regex_match(t, m, factor)) throw std::invalid_argument("unknown factor '" + t + "'");
                const int k = parse_power(m[3], t);
                const std::string base = m[1];
                if (base == "a") mono.k += k;
                if (base == "ad") mono.j += k;
                if (base == "n") {
                    mono.j += k;
                    mono.k += k;
                }
            }
            gen.terms.push_back(mono);
        }
        gens.push_back(gen);
    }
    if (gens.empty()) throw std::invalid_argument("empty generator spec");
    return gens;
}

}  // namespace bqec
