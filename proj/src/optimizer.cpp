#include "bqec/optimizer.hpp"

#include "bqec/channels.hpp"
#include "bqec/metrics.hpp"
#include "bqec/qec.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <Eigen/QR>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <optional>
#include <random>
#include <stdexcept>
#include <thread>

namespace bqec {

void OptimizationProblem::validate() const {
    if (L < 1 || G < 0) throw std::invalid_argument("need L >= 1 and G >= 0");
    if (cutoff < 2 * (L + 1)) throw std::invalid_argument("cutoff must be at least 2(L+1)");
    if (!(tolerance_kl > 0.0)) throw std::invalid_argument("tolerance_kl must be positive");
    if (restarts < 1) throw std::invalid_argument("need at least one restart");
    if (max_evaluations < 100) throw std::invalid_argument("evaluation budget too small");
    if (!support.empty()) {
        if (support.size() != 2) throw std::invalid_argument("support masks are needed for both words");
        for (const auto& s : support) {
            if (s.empty()) throw std::invalid_argument("empty support mask");
            for (int n : s)
                if (n < 0 || n > cutoff) throw std::invalid_argument("support level outside the cutoff");
        }
    }
}

double kl_penalty(const std::vector<StateVector>& words, const std::vector<Operator>& errors) {
    double p = 0.0;
    const auto m = errors.size();
    for (std::size_t s = 0; s < words.size(); ++s)
        for (std::size_t t = s + 1; t < words.size(); ++t)
            for (std::size_t l = 0; l < m; ++l)
                for (std::size_t k = 0; k < m; ++k) {
                    Vec el_s = errors[l].mat * words[s].amp, el_t = errors[l].mat * words[t].amp;
                    Vec ek_s = errors[k].mat * words[s].amp, ek_t = errors[k].mat * words[t].amp;
                    p += std::norm(el_s.dot(ek_t));
                    if (l <= k) p += std::norm(el_s.dot(ek_s) - el_t.dot(ek_t));
                }
    return p;
}

double kl_defect(const Code& code, int L, int G) {
    auto r = kl_matrix(code, discrete_error_set(L, G, 0, code.cutoff()));
    return std::max(r.offdiag_defect, r.worddep_defect);
}

namespace {

// In complex mode the first allowed level of each word carries no imaginary
// part, which fixes the global phase and removes a flat search direction.
struct Layout {
    int cutoff = 0;
    bool complex = false;
    std::vector<std::vector<int>> levels;

    std::size_t size() const {
        std::size_t n = 0;
        for (const auto& l : levels) n += complex ? 2 * l.size() - 1 : l.size();
        return n;
    }

    // unnormalized words from a parameter vector
    std::vector<Vec> unpack(const Eigen::VectorXd& x) const {
        std::vector<Vec> w;
        std::size_t i = 0;
        for (const auto& lv : levels) {
            Vec v = Vec::Zero(cutoff + 1);
            for (int n : lv) v(n) = x(i++);
            if (complex)
                for (std::size_t j = 1; j < lv.size(); ++j) v(lv[j]) += cplx(0.0, x(i++));
            w.push_back(v);
        }
        return w;
    }

    Eigen::VectorXd pack(const std::vector<Vec>& w) const {
        Eigen::VectorXd x(size());
        std::size_t i = 0;
        for (std::size_t s = 0; s < levels.size(); ++s) {
            // rotate so the leading allowed amplitude is real
            cplx ph(1.0);
            if (complex && std::abs(w[s](levels[s][0])) > 0.0)
                ph = std::conj(w[s](levels[s][0])) / std::abs(w[s](levels[s][0]));
            for (int n : levels[s]) x(i++) = (ph * w[s](n)).real();
            if (complex)
                for (std::size_t j = 1; j < levels[s].size(); ++j) x(i++) = (ph * w[s](levels[s][j])).imag();
        }
        return x;
    }
};

// Quantities shared by every evaluation of one problem.
struct Model {
    Layout layout;
    int L = 1;
    // E_l^dag E_k for all pairs of the error set
    std::vector<Mat> products;
    Eigen::VectorXd weight;  // falling factorial n!/(n-L-1)!/(L+1)! per level

    static Model make(const OptimizationProblem& p) {
        Model m;
        m.L = p.L;
        m.layout.cutoff = p.cutoff;
        m.layout.complex = p.complex_amplitudes;
        if (p.support.empty()) {
            std::vector<int> all(p.cutoff + 1);
            for (int n = 0; n <= p.cutoff; ++n) all[n] = n;
            m.layout.levels = {all, all};
        } else {
            m.layout.levels = p.support;
        }
        auto errs = discrete_error_set(p.L, p.G, 0, p.cutoff);
        for (const auto& el : errs)
            for (const auto& ek : errs) m.products.push_back(el.mat.adjoint() * ek.mat);
        m.weight = Eigen::VectorXd::Zero(p.cutoff + 1);
        for (int n = p.L + 1; n <= p.cutoff; ++n) {
            double f = 1.0;
            for (int j = n - p.L; j <= n; ++j) f *= j;
            m.weight(n) = f / std::tgamma(p.L + 2.0);
        }
        return m;
    }

    std::vector<Vec> words(const Eigen::VectorXd& x) const {
        auto w = layout.unpack(x);
        for (auto& v : w) {
            double n = v.norm();
            if (n > 0.0) v /= n;
        }
        return w;
    }

    double objective(const std::vector<Vec>& w) const {
        double f = 0.0;
        for (const auto& v : w) f += v.cwiseAbs2().dot(weight);
        return f / static_cast<double>(w.size());
    }

    // orthogonality and KL equalities as real residuals
    Eigen::VectorXd constraints(const std::vector<Vec>& w) const {
        std::vector<double> r;
        auto push = [&](cplx z) {
            r.push_back(z.real());
            if (layout.complex) r.push_back(z.imag());
        };
        push(w[0].dot(w[1]));
        for (const auto& o : products) {
            push(w[0].dot(o * w[1]));
            push(w[0].dot(o * w[0]) - w[1].dot(o * w[1]));
        }
        return Eigen::Map<Eigen::VectorXd>(r.data(), static_cast<Eigen::Index>(r.size()));
    }

    double penalized(const Eigen::VectorXd& x, double mu) const {
        auto w = words(x);
        if (w[0].norm() == 0.0 || w[1].norm() == 0.0) return 1e300;
        return objective(w) + mu * constraints(w).squaredNorm();
    }
};

struct Penalized {
    const Model* model;
    double mu;
    long evaluations = 0;
};

double penalized_f(const gsl_vector* v, void* params) {
    auto* p = static_cast<Penalized*>(params);
    ++p->evaluations;
    Eigen::VectorXd x(v->size);
    for (std::size_t i = 0; i < v->size; ++i) x(i) = gsl_vector_get(v, i);
    return p->model->penalized(x, p->mu);
}

// Nelder-Mead from x until the best value moves less than 1e-12 over 200
// iterations or the evaluation budget runs out.
Eigen::VectorXd descend(const Model& model, Eigen::VectorXd x, double mu, long budget, long& used) {
    const std::size_t n = x.size();
    Penalized ctx{&model, mu, 0};
    gsl_multimin_function fn{&penalized_f, n, &ctx};
    gsl_vector* start = gsl_vector_alloc(n);
    gsl_vector* step = gsl_vector_alloc(n);
    for (std::size_t i = 0; i < n; ++i) gsl_vector_set(start, i, x(i));
    gsl_vector_set_all(step, 0.1);
    gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n);
    gsl_multimin_fminimizer_set(s, &fn, start, step);
    double anchor = s->fval;
    int since = 0;
    while (ctx.evaluations < budget) {
        if (gsl_multimin_fminimizer_iterate(s) != GSL_SUCCESS) break;
        if (std::abs(anchor - s->fval) >= 1e-12) {
            anchor = s->fval;
            since = 0;
        } else if (++since >= 200) {
            break;
        }
        if (gsl_multimin_fminimizer_size(s) < 1e-15) break;
    }
    for (std::size_t i = 0; i < n; ++i) x(i) = gsl_vector_get(s->x, i);
    used += ctx.evaluations;
    gsl_multimin_fminimizer_free(s);
    gsl_vector_free(start);
    gsl_vector_free(step);
    return x;
}

// Minimum-norm Gauss-Newton steps on the equality residuals.
Eigen::VectorXd restore(const Model& model, Eigen::VectorXd x) {
    const double h = 1e-7;
    for (int it = 0; it < 50; ++it) {
        Eigen::VectorXd r = model.constraints(model.words(x));
        if (r.cwiseAbs().maxCoeff() < 1e-14) break;
        Eigen::MatrixXd J(r.size(), x.size());
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            Eigen::VectorXd xp = x, xm = x;
            xp(i) += h;
            xm(i) -= h;
            J.col(i) = (model.constraints(model.words(xp)) - model.constraints(model.words(xm))) / (2 * h);
        }
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
        cod.setThreshold(1e-10);
        cod.compute(J);
        Eigen::VectorXd dx = cod.solve(r);
        if (!dx.allFinite()) break;
        x -= dx;
    }
    return x;
}

// normalize, then Gram-Schmidt the second word against the first
std::vector<Vec> finalize(const std::vector<Vec>& w) {
    std::vector<Vec> out;
    for (const auto& v : w) {
        Vec u = v;
        for (const auto& b : out) u -= b.dot(u) * b;
        out.push_back(u / u.norm());
    }
    return out;
}

struct Candidate {
    std::vector<Vec> words;
    double objective = 0.0;
    double defect = 0.0;
    bool feasible = false;
};

Candidate evaluate(const Model& model, const OptimizationProblem& p, const std::vector<Vec>& raw) {
    Candidate c;
    c.words = finalize(raw);
    c.objective = model.objective(c.words);
    std::vector<StateVector> sv;
    for (const auto& v : c.words) sv.emplace_back(v, p.cutoff, 1, true);
    double ortho = std::abs(c.words[0].dot(c.words[1]));
    try {
        Code code = make_code(sv, CodeParams::from_errors(p.L, p.G, 0, p.cutoff), CodeTag::custom);
        c.defect = std::max(ortho, kl_defect(code, p.L, p.G));
    } catch (const std::exception&) {
        c.defect = std::max(ortho, 1.0);
    }
    c.feasible = c.defect <= p.tolerance_kl;
    return c;
}

// binomial code with S = L + G and N = max(L, G), if it fits under the cutoff
std::optional<std::vector<Vec>> warm_start(const OptimizationProblem& p) {
    const int N = std::max(p.L, p.G), S = p.L + p.G;
    if ((N + 1) * (S + 1) > p.cutoff) return std::nullopt;
    Code b = binomial_code(N, S, p.cutoff);
    std::vector<Vec> w;
    for (const auto& s : b.words) w.push_back(s.amp);
    if (!p.support.empty())
        for (std::size_t i = 0; i < 2; ++i)
            for (Eigen::Index n = 0; n < w[i].size(); ++n)
                if (w[i](n) != 0.0 &&
                    std::find(p.support[i].begin(), p.support[i].end(), static_cast<int>(n)) == p.support[i].end())
                    return std::nullopt;
    return w;
}

}  // namespace

OptResult optimize_code(const OptimizationProblem& problem) {
    problem.validate();
    const Model model = Model::make(problem);
    const auto warm = warm_start(problem);

    // per-restart starting points drawn up front so the result is independent of scheduling
    std::mt19937_64 rng(problem.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<Eigen::VectorXd> starts;
    for (int r = 0; r < problem.restarts; ++r) {
        Eigen::VectorXd x(model.layout.size());
        for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = normal(rng);
        if (r == 0 && warm) x = model.layout.pack(*warm);
        starts.push_back(x);
    }

    std::vector<Candidate> found(problem.restarts);
    std::vector<RestartRecord> log(problem.restarts);
    std::atomic<int> next{0};
    auto work = [&] {
        for (int r = next++; r < problem.restarts; r = next++) {
            Eigen::VectorXd x = starts[r];
            long used = 0;
            double mu = 1e3;
            for (int round = 0; round < 4 && used < problem.max_evaluations; ++round, mu *= 10.0)
                x = descend(model, x, mu, problem.max_evaluations - used, used);
            Candidate c = evaluate(model, problem, model.words(restore(model, x)));
            if (r == 0 && warm) {
                // the exact warm start competes as well, so the result never loses to it
                Candidate w = evaluate(model, problem, *warm);
                if (w.feasible && (!c.feasible || w.objective < c.objective)) c = w;
            }
            found[r] = c;
            log[r] = {r, c.objective, c.defect, c.feasible, used};
        }
    };
    std::size_t n = problem.threads > 0 ? static_cast<std::size_t>(problem.threads)
                                        : std::max(1u, std::thread::hardware_concurrency());
    n = std::min<std::size_t>(n, problem.restarts);
    if (n <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < n; ++t) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    // lowest feasible objective, ties to the lower restart index; else the smallest defect
    int best = -1;
    for (int r = 0; r < problem.restarts; ++r) {
        const auto& c = found[r];
        if (best < 0) {
            best = r;
            continue;
        }
        const auto& b = found[best];
        if (c.feasible != b.feasible) {
            if (c.feasible) best = r;
        } else if (c.feasible ? c.objective < b.objective : c.defect < b.defect) {
            best = r;
        }
    }

    OptResult res;
    res.restart_log = log;
    res.best_restart = best;
    const auto& c = found[best];
    std::vector<StateVector> sv;
    for (const auto& v : c.words) sv.emplace_back(v, problem.cutoff, 1, true);
    CodeParams params = CodeParams::from_errors(problem.L, problem.G, 0, problem.cutoff);
    res.code = make_code(sv, params, CodeTag::custom, std::max(1e-10, c.defect));
    res.objective = loss_prefactor(res.code, problem.L + 1);
    res.kl_defect = c.defect;
    res.converged = c.feasible;
    return res;
}

}  // namespace bqec
