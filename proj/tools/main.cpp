#include "bqec/fit.hpp"
#include "bqec/grammar.hpp"
#include "bqec/metrics.hpp"
#include "bqec/optimizer.hpp"
#include "bqec/qec.hpp"
#include "bqec/serialize.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

using nlohmann::json;
using namespace bqec;

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

std::uint64_t default_seed() {
    if (const char* s = std::getenv("BQEC_SEED")) {
        try {
            return std::stoull(s);
        } catch (const std::exception&) {
            throw UsageError("BQEC_SEED is not an unsigned integer");
        }
    }
    return 1;
}

json meta_block(const std::string& command, const json& config, std::uint64_t seed) {
    return {{"tool", "bqec"}, {"version", kToolVersion}, {"command", command}, {"config", config}, {"seed", seed}};
}

void emit(const std::string& text, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw UsageError("cannot write " + path);
    out << text;
}

json complex_matrix(const Mat& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
        rows.push_back(row);
    }
    return rows;
}

struct BuildArgs {
    std::string family;
    int N = 1, S = 1, d = 2, cutoff = -1;
    double beta = 2.0;
    std::string which = "sqrt17";
    std::string out;
};

Code build(const BuildArgs& a) {
    if (a.family == "binomial") return binomial_code(a.N, a.S, a.cutoff);
    if (a.family == "binomial-dual") return binomial_dual_basis(a.N, a.S, a.cutoff);
    if (a.family == "qudit") return qudit_binomial_code(a.N, a.S, a.d, a.cutoff);
    if (a.family == "cat") return cat_code(a.beta, a.S, a.cutoff);
    if (a.family == "two-mode") return two_mode_code(a.N, a.S, a.cutoff);
    if (a.family == "naive") return naive_code(a.cutoff);
    if (a.family == "opt") {
        if (a.which == "sqrt17") return optimized_code(OptimizedCode::sqrt17, a.cutoff);
        if (a.which == "sqrt21") return optimized_code(OptimizedCode::sqrt21, a.cutoff);
        throw UsageError("--which must be sqrt17 or sqrt21");
    }
    throw UsageError("unknown family '" + a.family + "'");
}

int run_build(const BuildArgs& a, std::uint64_t seed) {
    Code c = build(a);
    json config = {{"family", a.family}, {"N", a.N}, {"S", a.S},          {"d", a.d},
                   {"beta", a.beta},     {"which", a.which}, {"cutoff", a.cutoff}};
    json j = code_to_json(c);
    j["meta"] = meta_block("code build", config, seed);
    emit(j.dump(2) + "\n", a.out);
    return kPass;
}

struct CheckArgs {
    std::string code_file;
    std::string errors;
    double tol = 1e-9;
    std::string out;
};

int run_check(const CheckArgs& a, std::uint64_t seed) {
    Code c = load_code(a.code_file);
    auto errs = parse_error_spec(a.errors, c.cutoff(), c.modes);
    auto r = kl_matrix(c, errs, a.tol);
    json j = {{"passed", r.passed},
              {"offdiag_defect", r.offdiag_defect},
              {"worddep_defect", r.worddep_defect},
              {"tolerance", r.tolerance},
              {"alpha", complex_matrix(r.alpha)}};
    j["meta"] = meta_block("check", {{"code", a.code_file}, {"errors", a.errors}, {"tol", a.tol}}, seed);
    emit(j.dump(2) + "\n", a.out);
    return r.passed ? kPass : kFail;
}

int run_classify(const std::string& gens, const std::string& out, std::uint64_t seed) {
    auto r = required_code_params(parse_generators(gens));
    json worst = json::array();
    for (const auto& m : r.worst_case) worst.push_back({{"ad", m.j}, {"a", m.k}});
    json j = {{"L", r.L}, {"G", r.G}, {"N", r.N}, {"worst_case", worst}};
    j["meta"] = meta_block("classify", {{"gens", gens}}, seed);
    emit(j.dump(2) + "\n", out);
    return kPass;
}

struct SweepArgs {
    int max_L = 3;
    double dt_min = 1e-4, dt_max = 1.0;
    int points = 40;
    int threads = 0;
    std::string out;
};

int run_sweep(const SweepArgs& a, std::uint64_t seed) {
    if (!(a.dt_min > 0.0) || a.dt_min > a.dt_max) throw UsageError("need 0 < dt-min <= dt-max");
    auto res = sweep_infidelity(scaling_codes(a.max_L), logspace(a.dt_min, a.dt_max, a.points), a.threads);
    json config = {{"max_L", a.max_L}, {"dt_min", a.dt_min}, {"dt_max", a.dt_max}, {"points", a.points}};
    std::ostringstream os;
    os << "# tool bqec " << kToolVersion << "\n";
    os << "# config " << config.dump() << "\n";
    os << "# seed " << seed << "\n";
    os << "# rates in units of kappa, kappa_dt dimensionless\n";
    os << "kappa_dt";
    for (const auto& t : res.tags) os << ',' << t;
    os << '\n' << std::setprecision(17);
    for (const auto& row : res.rows) {
        os << row.kappa_dt;
        for (double v : row.infidelity_rate) os << ',' << v;
        os << '\n';
    }
    emit(os.str(), a.out);
    return kPass;
}

std::vector<std::vector<int>> parse_support(const std::string& s) {
    if (s.empty()) return {};
    std::vector<std::vector<int>> out;
    std::stringstream words(s);
    std::string w;
    while (std::getline(words, w, ';')) {
        std::vector<int> levels;
        std::stringstream ls(w);
        std::string n;
        while (std::getline(ls, n, ',')) {
            try {
                levels.push_back(std::stoi(n));
            } catch (const std::exception&) {
                throw UsageError("bad support level '" + n + "'");
            }
        }
        out.push_back(levels);
    }
    return out;
}

struct OptimizeArgs {
    OptimizationProblem problem;
    std::string support;
    std::string out;
};

int run_optimize(OptimizeArgs a, std::uint64_t seed) {
    a.problem.seed = seed;
    a.problem.support = parse_support(a.support);
    auto r = optimize_code(a.problem);
    json config = {{"L", a.problem.L},
                   {"G", a.problem.G},
                   {"cutoff", a.problem.cutoff},
                   {"restarts", a.problem.restarts},
                   {"tolerance_kl", a.problem.tolerance_kl},
                   {"complex", a.problem.complex_amplitudes},
                   {"support", a.support}};
    json j = code_to_json(r.code);
    j["optimization"] = {{"objective", r.objective},
                         {"kl_defect", r.kl_defect},
                         {"converged", r.converged},
                         {"best_restart", r.best_restart},
                         {"mean_photon_number", r.code.mean_photon_number()},
                         {"seed", seed}};
    j["meta"] = meta_block("optimize", config, seed);
    emit(j.dump(2) + "\n", a.out);
    if (!r.converged) std::cerr << "no restart reached kl_defect <= " << a.problem.tolerance_kl << "\n";
    return r.converged ? kPass : kFail;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bosonic code construction, verification and sweeps"};
    app.require_subcommand(1);
    std::optional<std::uint64_t> seed_flag;
    app.add_option("--seed", seed_flag, "RNG seed (default: BQEC_SEED or 1)");

    auto* code = app.add_subcommand("code", "code construction");
    code->require_subcommand(1);
    BuildArgs ba;
    auto* build_cmd = code->add_subcommand("build", "build a code and write it as JSON");
    build_cmd->add_option("--family", ba.family, "binomial|binomial-dual|qudit|cat|two-mode|naive|opt")->required();
    build_cmd->add_option("--N", ba.N);
    build_cmd->add_option("--S", ba.S);
    build_cmd->add_option("--d", ba.d);
    build_cmd->add_option("--beta", ba.beta);
    build_cmd->add_option("--which", ba.which, "sqrt17|sqrt21");
    build_cmd->add_option("--cutoff", ba.cutoff);
    build_cmd->add_option("--out,-o", ba.out);

    CheckArgs ca;
    auto* check_cmd = app.add_subcommand("check", "Knill-Laflamme check of a code file");
    check_cmd->add_option("--code", ca.code_file)->required();
    check_cmd->add_option("--errors", ca.errors, "e.g. I,a,a2,n")->required();
    check_cmd->add_option("--tol", ca.tol);
    check_cmd->add_option("--out,-o", ca.out);

    std::string gens, classify_out;
    auto* classify_cmd = app.add_subcommand("classify", "code parameters needed for error generators");
    classify_cmd->add_option("--gens", gens, "e.g. \"n*a+ad:1;a:2\"")->required();
    classify_cmd->add_option("--out,-o", classify_out);

    SweepArgs sa;
    auto* sweep_cmd = app.add_subcommand("sweep", "entanglement infidelity rate versus timestep");
    sweep_cmd->add_option("--max-L", sa.max_L)->check(CLI::Range(0, 6));
    sweep_cmd->add_option("--dt-min", sa.dt_min);
    sweep_cmd->add_option("--dt-max", sa.dt_max);
    sweep_cmd->add_option("--points", sa.points)->check(CLI::PositiveNumber);
    sweep_cmd->add_option("--threads", sa.threads);
    sweep_cmd->add_option("--out,-o", sa.out);

    OptimizeArgs oa;
    auto* opt_cmd = app.add_subcommand("optimize", "search for a code minimizing the uncorrectable rate");
    opt_cmd->add_option("--L", oa.problem.L);
    opt_cmd->add_option("--G", oa.problem.G);
    opt_cmd->add_option("--cutoff", oa.problem.cutoff);
    opt_cmd->add_option("--restarts", oa.problem.restarts);
    opt_cmd->add_option("--tol", oa.problem.tolerance_kl);
    opt_cmd->add_flag("--complex", oa.problem.complex_amplitudes);
    opt_cmd->add_option("--support", oa.support, "allowed levels per word, e.g. \"0,2,4;2\"");
    opt_cmd->add_option("--threads", oa.problem.threads);
    opt_cmd->add_option("--out,-o", oa.out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        const std::uint64_t seed = seed_flag ? *seed_flag : default_seed();
        if (*build_cmd) return run_build(ba, seed);
        if (*check_cmd) return run_check(ca, seed);
        if (*classify_cmd) return run_classify(gens, classify_out, seed);
        if (*sweep_cmd) return run_sweep(sa, seed);
        if (*opt_cmd) return run_optimize(oa, seed);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFail;
    }
    return kUsage;
}
