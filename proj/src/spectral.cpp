// Copyright 2026 fkpde contributors
// SPDX-License-Identifier: Apache-2.0
#include "fkpde/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>

namespace fkpde {

namespace {

constexpr Eigen::Index kMaxDenseDim = Eigen::Index{1} << 12;

CVec random_state(std::size_t dim, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist;
    CVec v(static_cast<Eigen::Index>(dim));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = cplx(dist(rng), dist(rng));
    return v.normalized();
}

RVec slice_norms(const CVec& psi, const SpacetimeGrid& g) {
    RVec out = RVec::Zero(static_cast<Eigen::Index>(g.time_points()));
    for (std::size_t i = 0; i < g.space_points(); ++i)
        for (std::size_t j = 0; j < g.time_points(); ++j)
            out(static_cast<Eigen::Index>(j)) += std::norm(psi(static_cast<Eigen::Index>(g.index(i, j))));
    return out.cwiseSqrt();
}

// Spectral norm estimate by power iteration, warm-started from v.
double norm_estimate(const CMat& h, CVec& v, int iterations) {
    double est = 0.0;
    for (int k = 0; k < iterations; ++k) {
        CVec w = h * v;
        est = w.norm();
        if (est == 0.0) return 0.0;
        v = w / est;
    }
    return est;
}

struct Probe {
    CVec psi;
    CMat h;
    double energy = 0.0;
    double residual = 0.0;
};

Probe probe(const PdeProblem& problem, CVec psi) {
    Probe p;
    p.h = assemble_hamiltonian(problem, Linearization::at_state(psi)).h;
    const CVec hpsi = p.h * psi;
    p.energy = psi.dot(hpsi).real();
    p.residual = (hpsi - p.energy * psi).norm();
    p.psi = std::move(psi);
    return p;
}

// One imaginary-time step of length tau on the (shifted) Hamiltonian frozen at cur.
CVec propagate(const Probe& cur, const IteConfig& cfg, bool excited, double tau, CVec& power, bool first) {
    CMat hp = cur.h;
    if (excited) {
        const EigenPairs low = dense_eigs(cur.h, 2);
        const double c = cfg.shift_factor * std::max(low.values(1), 0.0);
        hp += c * low.vectors.col(0) * low.vectors.col(0).adjoint();
    }
    CVec next;
    if (cfg.integrator == IteConfig::Integrator::euler) {
        const double scale = norm_estimate(hp, power, first ? 50 : 2);
        next = cur.psi - tau / std::max(scale, 1e-300) * (hp * cur.psi);
    } else {
        Eigen::SelfAdjointEigenSolver<CMat> es(hp);
        const RVec& lam = es.eigenvalues();
        const double t = tau / std::max(lam(1) - lam(0), 1e-300);
        const CVec coeffs = es.eigenvectors().adjoint() * cur.psi;
        CVec scaled(coeffs.size());
        for (Eigen::Index k = 0; k < coeffs.size(); ++k) {
            const double x = t * (lam(k) - lam(0));
            scaled(k) = x > 700.0 ? cplx(0.0) : coeffs(k) * std::exp(-x);
        }
        next = es.eigenvectors() * scaled;
    }
    return next;
}

// Steps are in units of 1/|H| (Euler) or 1/gap (exponential) and adapt:
// a step is kept only if it lowers the energy (ground) or the eigen-residual (excited).
IteResult iterate(const PdeProblem& problem_in, const IteConfig& cfg, bool excited) {
    PdeProblem problem = problem_in;
    problem.c3 = 0.0;
    problem.validate();
    if (static_cast<Eigen::Index>(problem.grid.dimension()) > kMaxDenseDim)
        throw ValidationError("imaginary time evolution is limited to 12 qubits");
    if (cfg.max_steps < 1) throw ValidationError("ITE max_steps must be >= 1");

    const bool euler = cfg.integrator == IteConfig::Integrator::euler;
    const double max_tau = euler ? cfg.tau_scale : 1e3 * cfg.gap_steps;
    double tau = cfg.tau > 0.0 ? cfg.tau : (euler ? cfg.tau_scale : cfg.gap_steps);
    const bool adaptive = !(cfg.tau > 0.0);

    IteResult res;
    CVec power = random_state(problem.grid.dimension(), cfg.seed + 1);
    Probe cur;
    try {
        cur = probe(problem, random_state(problem.grid.dimension(), cfg.seed));
    } catch (const std::exception& e) {
        res.diverging = true;
        res.message = std::string("relinearization failed: ") + e.what();
        return res;
    }
    int rejected_in_row = 0;
    for (int step = 0;; ++step) {
        res.energy = cur.energy;
        res.residual = cur.residual;
        res.state = cur.psi;
        res.steps = step;
        res.trace.push_back(cur.energy);
        if (!std::isfinite(cur.energy)) {
            res.diverging = true;
            res.message = "non-finite energy";
            break;
        }
        const bool done = excited ? cur.residual < cfg.residual_target
                                  : (cur.energy <= cfg.energy_target && cur.residual < std::sqrt(cfg.energy_target));
        if (done) {
            res.converged = true;
            res.message = "converged";
            break;
        }
        const auto w = static_cast<std::size_t>(cfg.divergence_window);
        if (res.trace.size() > w && cur.energy > res.trace[res.trace.size() - 1 - w] + 1e-12 && !excited) {
            res.diverging = true;
            res.message = "energy increased over the divergence window";
            break;
        }
        if (step >= cfg.max_steps) break;

        CVec next = propagate(cur, cfg, excited, tau, power, step == 0);
        const double nrm = next.norm();
        if (!(nrm > 0.0) || !std::isfinite(nrm)) {
            res.diverging = true;
            res.message = "state collapsed";
            break;
        }
        next /= nrm;
        Probe cand;
        bool ok = true;
        try {
            cand = probe(problem, std::move(next));
        } catch (const std::exception&) {
            ok = false;
        }
        if (ok && adaptive) {
            ok = excited ? cand.residual <= cur.residual : cand.energy <= cur.energy + 1e-15;
        }
        if (ok) {
            cur = std::move(cand);
            rejected_in_row = 0;
            if (adaptive) tau = std::min(tau * 1.5, max_tau);
        } else {
            tau *= 0.5;
            if (++rejected_in_row > 60) {
                res.message = "step size underflow: no descent direction";
                break;
            }
        }
    }
    if (res.message.empty()) res.message = "step budget exhausted";
    const RVec norms = slice_norms(res.state, problem.grid);
    res.overweighted = norms(norms.size() - 1) > cfg.overweight_factor * norms(0);
    return res;
}

}  // namespace

EigenPairs dense_eigs(const CMat& h, int k) {
    if (h.rows() != h.cols()) throw ValidationError("dense_eigs needs a square matrix");
    if (h.rows() > kMaxDenseDim) throw ValidationError("dense_eigs is limited to dimension 4096");
    if (k < 1 || k > h.rows()) throw ValidationError("dense_eigs: k out of range");
    const double asym = (h - h.adjoint()).cwiseAbs().maxCoeff();
    if (asym > 1e-10) throw ValidationError("dense_eigs: matrix is not Hermitian (deviation " + std::to_string(asym) + ")");
    Eigen::SelfAdjointEigenSolver<CMat> es(h);
    if (es.info() != Eigen::Success) throw std::runtime_error("eigensolver failed");
    return {es.eigenvalues().head(k), es.eigenvectors().leftCols(k)};
}

StabilityReport stability_check(double diffusion, double /*nonlinearity*/, double dt, double dx) {
    if (!(dx > 0.0)) throw ValidationError("stability_check: dx must be positive");
    if (dt < 0.0 || diffusion < 0.0) throw ValidationError("stability_check: dt and D must be non-negative");
    StabilityReport r;
    const double ratio = diffusion * dt / (dx * dx);
    r.margin = 0.5 - ratio;
    r.stable = ratio < 0.5;
    r.dt_max = diffusion == 0.0 ? std::numeric_limits<double>::infinity() : dx * dx / (2.0 * diffusion);
    return r;
}

CVec apply_hamiltonian(const EnergyEvaluator& evaluator, const CVec& psi) {
    const PdeProblem& p = evaluator.problem();
    const Linearization lin =
        p.linear() ? Linearization::at_state(psi) : Linearization::frozen(slice_values(p, psi).values);
    CVec g;
    evaluator.evaluate_with_gradient(psi, lin, g);
    if (p.c3 != 0.0) g += p.c3 * psi.conjugate();
    return g;
}

IteResult ite_ground(const PdeProblem& problem, const IteConfig& config) { return iterate(problem, config, false); }

IteResult ite_excited(const PdeProblem& problem, const IteConfig& config) { return iterate(problem, config, true); }

std::vector<GapPoint> gap_scan(const PdeProblem& problem_template, const std::vector<int>& n_t_values,
                               const IteConfig& config, bool excited_ite) {
    std::vector<GapPoint> out;
    for (int nt : n_t_values) {
        PdeProblem p = problem_template;
        p.c3 = 0.0;
        p.grid = build_grid(problem_template.grid.n_x, nt, problem_template.grid.domain_length, problem_template.grid.dt);
        GapPoint pt;
        pt.n_t = nt;
        const IteResult ground = ite_ground(p, config);
        pt.e0 = ground.energy;
        pt.ground_converged = ground.converged;
        // Freeze H at the exact zero-energy state when the implicit march has a root.
        CVec at = ground.state;
        pt.e1_at_history_state = false;
        try {
            at = history_state(p).state;
            pt.e1_at_history_state = true;
        } catch (const InstabilityError&) {
        }
        pt.e1 = dense_eigs(assemble_hamiltonian(p, Linearization::at_state(at)).h, 2).values(1);
        if (!excited_ite) {
            out.push_back(pt);
            continue;
        }
        const IteResult ex = ite_excited(p, config);
        pt.ite_e1 = ex.energy;
        pt.ite_residual = ex.residual;
        pt.ite_converged = ex.converged;
        out.push_back(pt);
    }
    return out;
}

void write_gap_csv(const std::string& path, const std::vector<GapPoint>& points) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out.precision(17);
    out << "n_t,e0,ground_converged,e1,e1_at_history_state,ite_e1,ite_residual,ite_converged\n";
    for (const GapPoint& p : points)
        out << p.n_t << ',' << p.e0 << ',' << (p.ground_converged ? 1 : 0) << ',' << p.e1 << ',' << (p.e1_at_history_state ? 1 : 0) << ',' << p.ite_e1 << ','
            << p.ite_residual << ',' << (p.ite_converged ? 1 : 0) << '\n';
}

}  // namespace fkpde
