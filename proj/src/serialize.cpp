#include "bqec/serialize.hpp"

#include <json.hpp>

#include <fstream>
#include <stdexcept>

namespace bqec {

using nlohmann::json;

json code_to_json(const Code& code) {
    json words = json::array();
    for (const auto& w : code.words) {
        json amps = json::array();
        for (Eigen::Index i = 0; i < w.dim(); ++i) amps.push_back({w.amp(i).real(), w.amp(i).imag()});
        words.push_back(amps);
    }
    const auto& p = code.params;
    return {{"modes", code.modes},
            {"cutoff", code.cutoff()},
            {"tag", to_string(code.tag)},
            {"params", {{"N", p.N}, {"S", p.S}, {"L", p.L}, {"G", p.G}, {"D", p.D}, {"d", p.d}}},
            {"words", words}};
}

Code code_from_json(const json& j) {
    try {
        const int modes = j.at("modes").get<int>();
        const int cutoff = j.at("cutoff").get<int>();
        if (modes != 1 && modes != 2) throw std::invalid_argument("modes must be 1 or 2");
        if (cutoff < 1) throw std::invalid_argument("cutoff must be at least 1");
        CodeParams p;
        const auto& jp = j.at("params");
        p.N = jp.at("N").get<int>();
        p.S = jp.at("S").get<int>();
        p.L = jp.at("L").get<int>();
        p.G = jp.at("G").get<int>();
        p.D = jp.at("D").get<int>();
        p.d = jp.at("d").get<int>();
        p.cutoff = cutoff;
        const auto dim = space_dim(cutoff, modes);
        std::vector<StateVector> words;
        for (const auto& jw : j.at("words")) {
            if (static_cast<Eigen::Index>(jw.size()) != dim) throw std::invalid_argument("word length does not match cutoff");
            Vec v(dim);
            for (Eigen::Index i = 0; i < dim; ++i) {
                const auto& z = jw.at(i);
                if (z.size() != 2) throw std::invalid_argument("amplitudes must be [re, im] pairs");
                v(i) = cplx(z.at(0).get<double>(), z.at(1).get<double>());
            }
            words.emplace_back(v, cutoff, modes, true);
        }
        if (static_cast<int>(words.size()) != p.d) throw std::invalid_argument("word count does not match d");
        Code c = make_code(std::move(words), p, code_tag_from_string(j.at("tag").get<std::string>()));
        c.modes = modes;
        return c;
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("malformed code json: ") + e.what());
    }
}

void save_code(const Code& code, const std::string& path, const json& meta) {
    json j = code_to_json(code);
    if (!meta.is_null()) j["meta"] = meta;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << '\n';
}

Code load_code(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot read " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw std::invalid_argument("malformed json in " + path + ": " + e.what());
    }
    return code_from_json(j);
}

}  // namespace bqec
