// Copyright 2026 fkpde contributors
// SPDX-License-Identifier: Apache-2.0
#include "fkpde/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <exception>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>

namespace fkpde {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

void axpy(double alpha, const std::vector<double>& x, std::vector<double>& y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

bool finite(const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

struct Probe {
    double alpha = 0.0;
    double f = 0.0;
    double slope = 0.0;
    std::vector<double> x;
    std::vector<double> g;
};

// Strong-Wolfe line search along d (bracketing + zoom with cubic interpolation).
class LineSearch {
  public:
    LineSearch(const ValueGradFn& fn, const std::vector<double>& x0, double f0, const std::vector<double>& g0,
               const std::vector<double>& d, int max_evals, int& eval_counter)
        : fn_(fn), x0_(x0), d_(d), max_evals_(max_evals), evals_(eval_counter) {
        origin_.alpha = 0.0;
        origin_.f = f0;
        origin_.slope = dot(g0, d);
    }

    std::optional<Probe> run(double alpha_init) {
        if (!(origin_.slope < 0.0)) return std::nullopt;
        Probe prev = origin_;
        double alpha = alpha_init;
        for (int i = 0; i < max_evals_; ++i) {
            Probe cur = probe(alpha);
            if (!std::isfinite(cur.f)) {
                alpha = 0.5 * (prev.alpha + alpha);
                continue;
            }
            if (cur.f > origin_.f + kC1 * alpha * origin_.slope || (i > 0 && cur.f >= prev.f))
                return zoom(prev, cur);
            if (std::abs(cur.slope) <= -kC2 * origin_.slope) return cur;
            if (cur.slope >= 0.0) return zoom(cur, prev);
            prev = std::move(cur);
            alpha *= 2.0;
        }
        return std::nullopt;
    }

  private:
    static constexpr double kC1 = 1e-4;
    static constexpr double kC2 = 0.9;

    Probe probe(double alpha) {
        Probe p;
        p.alpha = alpha;
        p.x = x0_;
        axpy(alpha, d_, p.x);
        p.f = fn_(p.x, p.g);
        ++evals_;
        p.slope = dot(p.g, d_);
        return p;
    }

    static double cubic_min(const Probe& a, const Probe& b) {
        const double d1 = a.slope + b.slope - 3.0 * (a.f - b.f) / (a.alpha - b.alpha);
        const double disc = d1 * d1 - a.slope * b.slope;
        const double lo = std::min(a.alpha, b.alpha);
        const double hi = std::max(a.alpha, b.alpha);
        if (disc >= 0.0) {
            const double d2 = std::copysign(std::sqrt(disc), b.alpha - a.alpha);
            const double t = b.alpha - (b.alpha - a.alpha) * (b.slope + d2 - d1) / (b.slope - a.slope + 2.0 * d2);
            const double margin = 0.1 * (hi - lo);
            if (std::isfinite(t) && t > lo + margin && t < hi - margin) return t;
        }
        return 0.5 * (lo + hi);
    }

    std::optional<Probe> zoom(Probe lo, Probe hi) {
        Probe best = lo;
        for (int i = 0; i < max_evals_; ++i) {
            if (std::abs(hi.alpha - lo.alpha) < 1e-16 * std::max(1.0, std::abs(lo.alpha))) break;
            Probe cur = probe(cubic_min(lo, hi));
            if (!std::isfinite(cur.f) || cur.f > origin_.f + kC1 * cur.alpha * origin_.slope || cur.f >= lo.f) {
                hi = std::move(cur);
            } else {
                if (std::abs(cur.slope) <= -kC2 * origin_.slope) return cur;
                if (cur.slope * (hi.alpha - lo.alpha) >= 0.0) hi = lo;
                lo = std::move(cur);
                best = lo;
            }
        }
        // Accept a sufficient-decrease point even without the curvature condition.
        if (best.alpha > 0.0 && best.f < origin_.f) return best;
        return std::nullopt;
    }

    const ValueGradFn& fn_;
    const std::vector<double>& x0_;
    const std::vector<double>& d_;
    int max_evals_;
    int& evals_;
    Probe origin_;
};

std::string optimizer_name(OptimizerKind k) { return k == OptimizerKind::adam ? "adam" : "quasi_newton"; }

}  // namespace

StageResult adam(const ValueGradFn& fn, std::vector<double> params, const AdamSettings& s) {
    if (s.steps < 1) throw ValidationError("adam steps must be >= 1");
    StageResult out;
    out.optimizer = OptimizerKind::adam;
    const std::size_t n = params.size();
    std::vector<double> m(n, 0.0), v(n, 0.0), g;
    double b1t = 1.0, b2t = 1.0;
    for (int step = 0; step < s.steps; ++step) {
        const double f = fn(params, g);
        ++out.evaluations;
        if (!std::isfinite(f) || !finite(g)) {
            out.aborted = true;
            out.message = "non-finite cost at step " + std::to_string(step);
            break;
        }
        out.trace.push_back(f);
        b1t *= s.beta1;
        b2t *= s.beta2;
        for (std::size_t i = 0; i < n; ++i) {
            m[i] = s.beta1 * m[i] + (1.0 - s.beta1) * g[i];
            v[i] = s.beta2 * v[i] + (1.0 - s.beta2) * g[i] * g[i];
            const double mhat = m[i] / (1.0 - b1t);
            const double vhat = v[i] / (1.0 - b2t);
            params[i] -= s.learning_rate * mhat / (std::sqrt(vhat) + s.epsilon);
        }
        ++out.iterations;
    }
    if (!out.aborted) {
        out.trace.push_back(fn(params, g));
        ++out.evaluations;
    }
    out.params = std::move(params);
    return out;
}

StageResult quasi_newton(const ValueGradFn& fn, std::vector<double> x, const QuasiNewtonSettings& s) {
    if (s.max_iterations < 1) throw ValidationError("quasi-Newton max_iterations must be >= 1");
    StageResult out;
    out.optimizer = OptimizerKind::quasi_newton;
    std::vector<double> g;
    double f = fn(x, g);
    ++out.evaluations;
    out.trace.push_back(f);
    if (!std::isfinite(f) || !finite(g)) {
        out.aborted = true;
        out.message = "non-finite cost at start";
        out.params = std::move(x);
        return out;
    }
    const double tol = s.tolerance_factor * std::numeric_limits<double>::epsilon();
    std::deque<std::vector<double>> ss, ys;
    std::deque<double> rhos;
    bool retried = false;

    for (int it = 0; it < s.max_iterations; ++it) {
        const double gnorm = std::sqrt(dot(g, g));
        if (gnorm == 0.0) {
            out.converged = true;
            out.message = "zero gradient";
            break;
        }
        // Two-loop recursion for d = -H g.
        std::vector<double> q = g;
        std::vector<double> alphas(ss.size());
        for (std::size_t k = ss.size(); k-- > 0;) {
            alphas[k] = rhos[k] * dot(ss[k], q);
            axpy(-alphas[k], ys[k], q);
        }
        double gamma = 1.0;
        if (!ss.empty()) gamma = dot(ss.back(), ys.back()) / dot(ys.back(), ys.back());
        for (double& qi : q) qi *= gamma;
        for (std::size_t k = 0; k < ss.size(); ++k) {
            const double beta = rhos[k] * dot(ys[k], q);
            axpy(alphas[k] - beta, ss[k], q);
        }
        std::vector<double> d(q.size());
        for (std::size_t i = 0; i < q.size(); ++i) d[i] = -q[i];
        if (dot(d, g) >= 0.0) {
            for (std::size_t i = 0; i < g.size(); ++i) d[i] = -g[i];
            ss.clear();
            ys.clear();
            rhos.clear();
        }
        const double alpha0 = ss.empty() ? std::min(1.0, 1.0 / gnorm) : 1.0;

        LineSearch ls(fn, x, f, g, d, s.max_line_search, out.evaluations);
        std::optional<Probe> step = ls.run(alpha0);
        if (!step) {
            if (!retried && !ss.empty()) {
                retried = true;
                ss.clear();
                ys.clear();
                rhos.clear();
                continue;
            }
            out.line_search_failed = true;
            out.message = "line search failed at iteration " + std::to_string(it);
            break;
        }
        retried = false;
        std::vector<double> sk(x.size()), yk(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            sk[i] = step->x[i] - x[i];
            yk[i] = step->g[i] - g[i];
        }
        const double f_prev = f;
        x = std::move(step->x);
        g = std::move(step->g);
        f = step->f;
        out.trace.push_back(f);
        ++out.iterations;

        const double sy = dot(sk, yk);
        if (sy > 1e-300) {
            ss.push_back(std::move(sk));
            ys.push_back(std::move(yk));
            rhos.push_back(1.0 / sy);
            if (static_cast<int>(ss.size()) > s.memory) {
                ss.pop_front();
                ys.pop_front();
                rhos.pop_front();
            }
        }
        if ((f_prev - f) / std::max({std::abs(f_prev), std::abs(f), 1.0}) <= tol) {
            out.converged = true;
            out.message = "cost change below tolerance";
            break;
        }
    }
    if (out.message.empty()) out.message = "iteration budget exhausted";
    out.params = std::move(x);
    return out;
}

ValueGradFn masked(const ValueGradFn& fn, const std::vector<double>& full, const std::vector<int>& free_indices) {
    return [fn, full, free_indices](const std::vector<double>& sub, std::vector<double>& gsub) {
        std::vector<double> x = full;
        for (std::size_t k = 0; k < free_indices.size(); ++k) x[static_cast<std::size_t>(free_indices[k])] = sub[k];
        std::vector<double> g;
        const double f = fn(x, g);
        gsub.resize(free_indices.size());
        for (std::size_t k = 0; k < free_indices.size(); ++k) gsub[k] = g[static_cast<std::size_t>(free_indices[k])];
        return f;
    };
}

// ---------------------------------------------------------------------------

void RampSchedule::validate() const {
    if (stages.empty()) throw ValidationError("schedule has no stages");
    for (std::size_t i = 0; i < stages.size(); ++i) {
        const RampStage& st = stages[i];
        if (st.max_iterations < 1)
            throw ValidationError("schedule stage " + std::to_string(i) + ": max_iterations must be >= 1");
        if (st.diffusion < 0.0 || st.nonlinearity < 0.0)
            throw ValidationError("schedule stage " + std::to_string(i) + ": coefficients must be >= 0");
    }
}

RampSchedule RampSchedule::diffusion_default(double target, int budget) {
    RampSchedule r;
    for (double frac : {0.125, 0.25, 0.5, 1.0})
        r.stages.push_back({frac * target, 0.0, r.stages.empty() ? OptimizerKind::adam : OptimizerKind::quasi_newton,
                            budget});
    return r;
}

RampSchedule RampSchedule::burgers_default(double diffusion, double target, int budget) {
    RampSchedule r;
    for (double frac : {0.0, 0.125, 0.25, 0.5, 1.0})
        r.stages.push_back({diffusion, frac * target,
                            r.stages.empty() ? OptimizerKind::adam : OptimizerKind::quasi_newton, budget});
    return r;
}

RampSchedule RampSchedule::single(const PdeProblem& problem, OptimizerKind kind, int budget) {
    return RampSchedule{{RampStage{problem.diffusion, problem.nonlinearity, kind, budget}}};
}

int default_budget(int n_qubits) {
    if (n_qubits <= 6) return 2500;
    if (n_qubits <= 8) return 5000;
    return 10000;
}

int OptimRun::total_iterations() const {
    int n = 0;
    for (const StageResult& s : stages) n += s.iterations;
    return n;
}

std::vector<double> random_angles(std::size_t count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(0.0, 2.0 * std::numbers::pi);
    std::vector<double> out(count);
    for (double& a : out) a = dist(rng);
    return out;
}

OptimRun run_stages(const PdeProblem& problem_template, const RampSchedule& schedule, const Ansatz& ansatz,
                    std::vector<double> params, const ProtocolSettings& settings) {
    schedule.validate();
    OptimRun run;
    run.initial_params = params;
    const CostMode mode = settings.mode == CostMode::Kind::relinearized ? CostMode::relinearized()
                                                                         : CostMode::self_consistent();
    if (settings.mode == CostMode::Kind::frozen)
        throw ValidationError("protocol mode must be self_consistent or relinearized");
    PdeProblem problem = problem_template;
    for (std::size_t i = 0; i < schedule.stages.size(); ++i) {
        const RampStage& st = schedule.stages[i];
        problem.diffusion = st.diffusion;
        problem.nonlinearity = st.nonlinearity;
        const Objective obj(ansatz, problem, mode);
        const ValueGradFn fn = [&obj](const std::vector<double>& x, std::vector<double>& g) {
            return obj.cost_and_gradient(x, g).total;
        };
        StageResult res;
        if (st.optimizer == OptimizerKind::adam) {
            AdamSettings a = settings.adam;
            a.steps = st.max_iterations;
            res = adam(fn, std::move(params), a);
        } else {
            QuasiNewtonSettings q = settings.quasi_newton;
            q.max_iterations = st.max_iterations;
            res = quasi_newton(fn, std::move(params), q);
        }
        res.label = "stage" + std::to_string(i) + ":" + optimizer_name(st.optimizer) +
                    ":D=" + std::to_string(st.diffusion) + ":beta=" + std::to_string(st.nonlinearity);
        params = res.params;
        const bool aborted = res.aborted;
        run.stages.push_back(std::move(res));
        if (aborted) break;
    }
    run.final_params = params;
    run.final_cost = Objective(ansatz, problem, CostMode::self_consistent()).cost(params);
    return run;
}

ProtocolResult run_protocol(const PdeProblem& problem_template, const RampSchedule& schedule, const Ansatz& ansatz,
                            int seeds, const ProtocolSettings& settings, std::uint64_t first_seed) {
    if (seeds < 1) throw ValidationError("seeds must be >= 1");
    schedule.validate();
    ProtocolResult result;
    result.runs.resize(static_cast<std::size_t>(seeds));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(seeds));
#pragma omp parallel for schedule(dynamic)
    for (int k = 0; k < seeds; ++k) {
        const auto idx = static_cast<std::size_t>(k);
        try {
            const std::uint64_t seed = first_seed + static_cast<std::uint64_t>(k);
            OptimRun run = run_stages(problem_template, schedule, ansatz,
                                      random_angles(static_cast<std::size_t>(ansatz.n_params), seed), settings);
            run.seed = seed;
            result.runs[idx] = std::move(run);
        } catch (...) {
            errors[idx] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    for (std::size_t k = 1; k < result.runs.size(); ++k)
        if (result.runs[k].final_cost.total < result.runs[result.best].final_cost.total) result.best = k;
    return result;
}

// ---------------------------------------------------------------------------

double gradient_norm_statistic(const std::vector<double>& norms, std::size_t n_params) {
    if (norms.size() < 2 || n_params == 0) return 0.0;
    double mean = 0.0;
    for (double v : norms) mean += v;
    mean /= static_cast<double>(norms.size());
    double var = 0.0;
    for (double v : norms) var += (v - mean) * (v - mean);
    var /= static_cast<double>(norms.size() - 1);
    return std::sqrt(var) / std::sqrt(static_cast<double>(n_params));
}

std::vector<GradientVarianceRow> gradient_variance_study(const PdeProblem& problem_template,
                                                         const GradientVarianceSettings& cfg) {
    if (cfg.seeds < 2) throw ValidationError("gradient variance study needs at least 2 seeds");
    std::vector<GradientVarianceRow> rows;
    for (int n : cfg.qubit_sizes) {
        if (n < 2 || n % 2 != 0) throw ValidationError("qubit sizes must be even and >= 2");
        const int half = n / 2;
        PdeProblem base = problem_template;
        base.nonlinearity = 0.0;
        base.grid = build_grid(half, half, problem_template.grid.domain_length,
                               cfg.dt_for_6 * std::pow(0.5, (n - 6) / 2.0));
        const double target = problem_template.diffusion;
        for (int layers : cfg.layers) {
            const Ansatz ansatz =
                build_brickwall(n, layers, 1, QubitOrdering::make(Ordering::reversed_space, half, half));
            const auto p = static_cast<std::size_t>(ansatz.n_params);
            std::vector<double> init_norms(static_cast<std::size_t>(cfg.seeds));
            std::vector<double> ramp_norms(static_cast<std::size_t>(cfg.seeds));
            const int budget = cfg.ramp_budget.value_or(default_budget(n));
            RampSchedule ramp = RampSchedule::diffusion_default(target, budget);
            ramp.stages.pop_back();  // stop at D = target/2
            std::vector<std::exception_ptr> errors(static_cast<std::size_t>(cfg.seeds));
#pragma omp parallel for schedule(dynamic)
            for (int s = 0; s < cfg.seeds; ++s) {
                const auto idx = static_cast<std::size_t>(s);
                try {
                    const std::vector<double> theta = random_angles(p, static_cast<std::uint64_t>(s));
                    PdeProblem first = base;
                    first.diffusion = ramp.stages.front().diffusion;
                    std::vector<double> g;
                    Objective(ansatz, first).cost_and_gradient(theta, g);
                    init_norms[idx] = std::sqrt(dot(g, g));
                    if (cfg.include_after_ramp) {
                        const OptimRun run = run_stages(base, ramp, ansatz, theta, cfg.protocol);
                        PdeProblem last = base;
                        last.diffusion = target;
                        Objective(ansatz, last).cost_and_gradient(run.final_params, g);
                        ramp_norms[idx] = std::sqrt(dot(g, g));
                    }
                } catch (...) {
                    errors[idx] = std::current_exception();
                }
            }
            for (const auto& e : errors)
                if (e) std::rethrow_exception(e);
            auto row = [&](const std::string& stage, const std::vector<double>& norms) {
                double mean = 0.0;
                for (double v : norms) mean += v;
                rows.push_back({n, layers, stage, ansatz.n_params, gradient_norm_statistic(norms, p),
                                mean / static_cast<double>(norms.size())});
            };
            row("random_init", init_norms);
            if (cfg.include_after_ramp) row("after_ramp", ramp_norms);
        }
    }
    return rows;
}

void write_traces_csv(const std::string& path, const std::vector<OptimRun>& runs) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out.precision(17);
    out << "seed,stage,label,iteration,cost\n";
    for (const OptimRun& r : runs)
        for (std::size_t s = 0; s < r.stages.size(); ++s)
            for (std::size_t i = 0; i < r.stages[s].trace.size(); ++i)
                out << r.seed << ',' << s << ',' << r.stages[s].label << ',' << i << ',' << r.stages[s].trace[i]
                    << '\n';
}

}  // namespace fkpde
