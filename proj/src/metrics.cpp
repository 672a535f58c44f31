#include "bqec/metrics.hpp"

#include "bqec/fit.hpp"

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace bqec {

Ensemble Ensemble::mixed(const Code& code) {
    Ensemble e;
    e.states = code.words;
    e.weights.assign(code.words.size(), 1.0 / code.d());
    return e;
}

Ensemble Ensemble::pure(const StateVector& psi) {
    return {{psi}, {1.0}};
}

Mat Ensemble::density() const {
    const auto dim = states.front().dim();
    Mat rho = Mat::Zero(dim, dim);
    for (std::size_t i = 0; i < states.size(); ++i) rho += weights[i] * states[i].amp * states[i].amp.adjoint();
    return rho;
}

namespace {

// Decomposition of R(E(|psi><psi|)) around |psi>.
struct Split {
    // c_{k,l} = <psi|R_k E_l|psi>, one per (k, l), branch-major
    std::vector<cplx> c;
    // delta_{k,l} = R_k E_l psi - c psi
    std::vector<Vec> delta;
    // weight of E_l psi outside every projector, plus the channel deficit
    double lost = 0.0;
};

void check_dims(const RecoveryMap& recovery, const KrausChannel& channel, Eigen::Index dim) {
    if (recovery.branches.empty()) throw std::invalid_argument("recovery has no branches");
    if (channel.operators.empty()) throw std::invalid_argument("channel has no operators");
    if (recovery.branches.front().op.dim() != dim || channel.operators.front().dim() != dim)
        throw std::invalid_argument("recovery, channel and state dimensions differ");
}

Split split(const RecoveryMap& recovery, const KrausChannel& channel, const Vec& psi) {
    Split s;
    const Mat q = recovery.uncovered();
    for (const auto& e : channel.operators) {
        Vec u = e.mat * psi;
        s.lost += std::max(0.0, u.dot(q * u).real());
    }
    if (channel.deficit.size() == psi.size())
        for (Eigen::Index n = 0; n < psi.size(); ++n) s.lost += channel.deficit(n) * std::norm(psi(n));
    for (const auto& b : recovery.branches)
        for (const auto& e : channel.operators) {
            Vec v = b.op.mat * (e.mat * psi);
            cplx c = psi.dot(v);
            s.c.push_back(c);
            s.delta.push_back(v - c * psi);
        }
    return s;
}

// Total weight that did not return to psi: sum ||delta||^2 + lost.
double drained(const Split& s) {
    double d = s.lost;
    for (const auto& v : s.delta) d += v.squaredNorm();
    return d;
}

// falling factorial n!/(n-l)!
double falling(int n, int l) {
    double f = 1.0;
    for (int j = n - l + 1; j <= n; ++j) f *= j;
    return f;
}

// probability of losing (l1 from the mode with n1 photons, l2 from the one with n2)
double jump_weight(int n1, int l1, int n2, int l2, double x) {
    if (l1 > n1 || l2 > n2) return 0.0;
    return loss_gamma(x, l1) * loss_gamma(x, l2) * std::exp(-x * (n1 - l1 + n2 - l2)) * falling(n1, l1) *
           falling(n2, l2);
}

template <class F>
double average_over_words(const Code& code, F per_level) {
    double total = 0.0;
    const int c1 = code.cutoff() + 1;
    for (const auto& w : code.words)
        for (Eigen::Index i = 0; i < w.dim(); ++i) {
            double p = std::norm(w.amp(i));
            if (p == 0.0) continue;
            if (code.modes == 1)
                total += p * per_level(static_cast<int>(i), 0);
            else
                total += p * per_level(static_cast<int>(i / c1), static_cast<int>(i % c1));
        }
    return total / code.d();
}

}  // namespace

double recovery_residual(const RecoveryMap& recovery, const KrausChannel& channel, const Ensemble& rho) {
    if (rho.states.empty() || rho.states.size() != rho.weights.size())
        throw std::invalid_argument("ensemble states and weights differ in length");
    const auto dim = rho.states.front().dim();
    check_dims(recovery, channel, dim);
    Mat out = Mat::Zero(dim, dim);
    for (std::size_t i = 0; i < rho.states.size(); ++i) {
        const Vec& psi = rho.states[i].amp;
        Split s = split(recovery, channel, psi);
        Mat m = -drained(s) * psi * psi.adjoint();
        for (std::size_t j = 0; j < s.c.size(); ++j) {
            Mat cross = s.c[j] * psi * s.delta[j].adjoint();
            m += cross + cross.adjoint() + s.delta[j] * s.delta[j].adjoint();
        }
        out += rho.weights[i] * m;
    }
    return out.cwiseAbs().maxCoeff();
}

double recovery_residual(const RecoveryMap& recovery, const KrausChannel& channel, const Code& code) {
    return recovery_residual(recovery, channel, Ensemble::mixed(code));
}

double entanglement_infidelity(const RecoveryMap& recovery, const KrausChannel& channel, const Code& code) {
    check_dims(recovery, channel, code.dim());
    const int d = code.d();
    std::vector<Split> splits;
    for (const auto& w : code.words) splits.push_back(split(recovery, channel, w.amp));
    // 1 - sum |mean_sigma c|^2 = sum spread of c over words + mean drained weight
    double f = 0.0;
    for (std::size_t j = 0; j < splits.front().c.size(); ++j) {
        cplx mean = 0.0;
        for (const auto& s : splits) mean += s.c[j];
        mean /= static_cast<double>(d);
        for (const auto& s : splits) f += std::norm(s.c[j] - mean) / d;
    }
    for (const auto& s : splits) f += drained(s) / d;
    return std::clamp(f, 0.0, 1.0);
}

double entanglement_infidelity_direct(const RecoveryMap& recovery, const KrausChannel& channel, const Code& code) {
    check_dims(recovery, channel, code.dim());
    const Mat rho = code.mixed_state();
    double f = 0.0;
    for (const auto& b : recovery.branches)
        for (const auto& e : channel.operators) f += std::norm((b.op.mat * e.mat * rho).trace());
    return 1.0 - f;
}

double loss_probability(const Code& code, int ell, double kappa_dt) {
    if (ell < 0) throw std::invalid_argument("loss count must be non-negative");
    if (!(kappa_dt >= 0.0) || !std::isfinite(kappa_dt)) throw std::invalid_argument("kappa_dt must be finite and >= 0");
    if (code.modes == 1)
        return average_over_words(code, [&](int n, int) { return jump_weight(n, ell, 0, 0, kappa_dt); });
    return average_over_words(code, [&](int n1, int n2) {
        double p = 0.0;
        for (int l1 = 0; l1 <= ell; ++l1) p += jump_weight(n1, l1, n2, ell - l1, kappa_dt);
        return p;
    });
}

double uncorrectable_rate(const Code& code, int L, double kappa_dt) {
    if (!(kappa_dt > 0.0)) throw std::invalid_argument("kappa_dt must be positive");
    return loss_probability(code, L + 1, kappa_dt) / kappa_dt;
}

double loss_prefactor(const Code& code, int ell) {
    if (ell < 0) throw std::invalid_argument("loss count must be non-negative");
    auto term = [](int n, int l) { return l > n ? 0.0 : falling(n, l) / std::tgamma(l + 1.0); };
    if (code.modes == 1) return average_over_words(code, [&](int n, int) { return term(n, ell); });
    return average_over_words(code, [&](int n1, int n2) {
        double p = 0.0;
        for (int l1 = 0; l1 <= ell; ++l1) p += term(n1, l1) * term(n2, ell - l1);
        return p;
    });
}

double two_mode_uncorrectable_ratio(double kappa_dt) {
    return loss_probability(two_mode_code(1, 1), 2, kappa_dt) / loss_probability(binomial_code(1, 1), 2, kappa_dt);
}

CatViolation cat_violation(double beta) {
    if (!(beta > 0.0) || !std::isfinite(beta)) throw std::invalid_argument("beta must be positive");
    const double u = beta * beta;
    CatViolation v;
    v.closed_form = 4.0 * u * std::exp(-u) * (std::sin(u) + std::cos(u));
    Code c = cat_code(beta, 1);
    auto n = mode_operators(c.cutoff()).number;
    v.numeric = expectation(c.words[1], n).real() - expectation(c.words[0], n).real();
    return v;
}

CatOptimum cat_optimal_beta() {
    // the first sign change of the violation sits just below 3pi/4
    auto f = [](double u) { return cat_violation(std::sqrt(u)).numeric; };
    boost::math::tools::eps_tolerance<double> tol(40);
    std::uintmax_t iters = 100;
    auto [lo, hi] = boost::math::tools::toms748_solve(f, 2.0, 2.8, tol, iters);
    CatOptimum o;
    o.u = 0.5 * (lo + hi);
    o.beta = std::sqrt(o.u);
    o.mean_photons = cat_code(o.beta, 1).mean_photon_number();
    return o;
}

double unfaithful_total_rate(double dt, double eta, int L, double N_prefactor) {
    return N_prefactor * std::pow(static_cast<double>(L), L + 1) * std::pow(dt, L) + eta / dt;
}

UnfaithfulOptimum unfaithful_recovery_optimum(double eta, int L, double N_prefactor) {
    if (L < 1) throw std::invalid_argument("order must be at least 1");
    if (!(eta >= 0.0) || !(N_prefactor > 0.0)) throw std::invalid_argument("need eta >= 0 and N > 0");
    UnfaithfulOptimum o;
    if (eta == 0.0) return o;
    const double NL = N_prefactor * L;
    o.dt_opt = std::pow(eta / (N_prefactor * std::pow(static_cast<double>(L), L + 2)), 1.0 / (L + 1));
    o.rate_opt = std::pow(eta, static_cast<double>(L) / (L + 1)) * (1.0 + L) * std::pow(NL, 1.0 / (L + 1));

    // coarse log grid, then Brent refinement in log dt
    auto g = [&](double logdt) { return unfaithful_total_rate(std::exp(logdt), eta, L, N_prefactor); };
    const auto grid = logspace(1e-12, 1e2, 2001);
    std::size_t best = 0;
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (g(std::log(grid[i])) < g(std::log(grid[best]))) best = i;
    double lo = std::log(grid[best > 0 ? best - 1 : 0]);
    double hi = std::log(grid[std::min(best + 1, grid.size() - 1)]);
    auto [x, fx] = boost::math::tools::brent_find_minima(g, lo, hi, 52);
    o.search_dt = std::exp(x);
    o.search_rate = fx;
    return o;
}

double fitted_rate_prefactor(const Code& code, int L, const std::vector<double>& kappa_dt_grid) {
    if (L < 1) throw std::invalid_argument("order must be at least 1");
    if (kappa_dt_grid.size() < 3) throw std::invalid_argument("need at least three grid points");
    std::vector<double> y;
    for (double x : kappa_dt_grid) y.push_back(uncorrectable_rate(code, L, x));
    auto fit = fit_loglog(kappa_dt_grid, y);
    if (std::abs(fit.exponent - L) > 0.05) throw std::runtime_error("uncorrectable rate does not scale as dt^L");
    // intercept at the nominal slope L
    double acc = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) acc += std::log(y[i]) - L * std::log(kappa_dt_grid[i]);
    acc /= static_cast<double>(y.size());
    return std::exp(acc) / std::pow(static_cast<double>(L), L + 1);
}

std::vector<SweepCode> scaling_codes(int max_L) {
    if (max_L < 0) throw std::invalid_argument("max_L must be non-negative");
    std::vector<SweepCode> out;
    out.push_back({naive_code(), 0, "naive"});
    for (int L = 1; L <= max_L; ++L) out.push_back({binomial_code(L, L), L, "binomial_L" + std::to_string(L)});
    return out;
}

std::vector<double> scaling_grid() {
    return logspace(1e-4, 1.0, 40);
}

SweepResult sweep_infidelity(const std::vector<SweepCode>& codes, std::vector<double> dt_grid, int threads) {
    if (codes.empty()) throw std::invalid_argument("no codes to sweep");
    for (double x : dt_grid)
        if (!(x > 0.0) || !std::isfinite(x)) throw std::invalid_argument("grid values must be positive");
    std::sort(dt_grid.begin(), dt_grid.end());
    SweepResult res;
    for (const auto& c : codes) res.tags.push_back(c.tag);
    res.rows.resize(dt_grid.size());

    const std::size_t jobs = dt_grid.size() * codes.size();
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t j = next++; j < jobs; j = next++) {
            std::size_t r = j / codes.size(), c = j % codes.size();
            const double x = dt_grid[r];
            const auto& sc = codes[c];
            // every jump order is kept: the absolute truncation bound would fold
            // correctable orders into the lost weight once F_e drops below it
            auto channel = loss_kraus(x, sc.code.cutoff(), sc.code.cutoff());
            auto rec = build_recovery(sc.code, x, sc.L);
            res.rows[r].infidelity_rate[c] = entanglement_infidelity(rec, channel, sc.code) / x;
        }
    };
    for (std::size_t r = 0; r < dt_grid.size(); ++r) {
        res.rows[r].kappa_dt = dt_grid[r];
        res.rows[r].infidelity_rate.assign(codes.size(), 0.0);
    }
    std::size_t n = threads > 0 ? static_cast<std::size_t>(threads) : std::max(1u, std::thread::hardware_concurrency());
    n = std::min(n, jobs);
    if (n <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < n; ++t) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    return res;
}

std::optional<double> crossover(const SweepResult& sweep, std::size_t a, std::size_t b) {
    if (a >= sweep.tags.size() || b >= sweep.tags.size()) throw std::out_of_range("column index out of range");
    auto gap = [&](std::size_t r) {
        return std::log(sweep.rows[r].infidelity_rate[a]) - std::log(sweep.rows[r].infidelity_rate[b]);
    };
    for (std::size_t r = sweep.rows.size(); r-- > 1;) {
        double g1 = gap(r - 1), g2 = gap(r);
        if (g1 < 0.0 && g2 >= 0.0) {
            double l1 = std::log(sweep.rows[r - 1].kappa_dt), l2 = std::log(sweep.rows[r].kappa_dt);
            return std::exp(l1 + (l2 - l1) * g1 / (g1 - g2));
        }
    }
    return std::nullopt;
}

double small_dt_slope(const SweepResult& sweep, std::size_t col, double dt_max) {
    std::vector<double> x, y;
    for (const auto& row : sweep.rows)
        if (row.kappa_dt <= dt_max) {
            x.push_back(row.kappa_dt);
            y.push_back(row.infidelity_rate.at(col));
        }
    if (x.size() < 2) throw std::invalid_argument("fewer than two rows below dt_max");
    return fit_loglog(x, y).exponent;
}

}  // namespace bqec
