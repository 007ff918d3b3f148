// Copyright 2026 fkpde contributors
// SPDX-License-Identifier: Apache-2.0
#include "fkpde/fkham.hpp"

#include <cmath>

namespace fkpde {

void PdeProblem::validate() const {
    build_grid(grid.n_x, grid.n_t, grid.domain_length, grid.dt);
    if (!(diffusion >= 0.0)) throw ValidationError("diffusion must be >= 0");
    if (!(nonlinearity >= 0.0)) throw ValidationError("nonlinearity must be >= 0");
    if (taylor_order != 1 && taylor_order != 2) throw ValidationError("taylor_order must be 1 or 2");
    if (!(c0 > 0.0)) throw ValidationError("c0 must be positive");
    if (!(c3 >= 0.0)) throw ValidationError("c3 must be >= 0");
}

DenseOperator linearized_generator(const PdeProblem& problem, const CVec& f_values) {
    const std::size_t nx = problem.grid.space_points();
    if (static_cast<std::size_t>(f_values.size()) != nx)
        throw ValidationError("f_values must have " + std::to_string(nx) + " entries");
    if (!f_values.allFinite()) throw ValidationError("linearization values contain NaN or Inf");
    CMat l = problem.diffusion * discrete_operator(OperatorKind::laplacian, problem.grid).matrix;
    if (problem.nonlinearity != 0.0)
        l -= problem.nonlinearity * f_values.asDiagonal() * discrete_operator(OperatorKind::first_derivative, problem.grid).matrix;
    return {l, "generator"};
}

DenseOperator propagator(const DenseOperator& generator, double dt, int order, Direction direction) {
    if (order != 1 && order != 2) throw ValidationError("propagator order must be 1 or 2");
    const double h = direction == Direction::forward ? dt : -dt;
    const CMat hl = h * generator.matrix;
    CMat t = CMat::Identity(hl.rows(), hl.cols()) + hl;
    if (order == 2) t += 0.5 * hl * hl;
    return {t, direction == Direction::forward ? "propagator_forward" : "propagator_backward"};
}

Linearization Linearization::at_state(const CVec& psi) {
    Linearization l;
    l.kind = Kind::state;
    l.state = psi;
    return l;
}

Linearization Linearization::frozen(const CMat& per_slice) {
    Linearization l;
    l.kind = Kind::frozen;
    l.frozen_values = per_slice;
    return l;
}

Linearization Linearization::single_slice(const CVec& f_values, std::size_t n_slices) {
    CMat m(f_values.size(), static_cast<Eigen::Index>(n_slices));
    for (Eigen::Index j = 0; j < m.cols(); ++j) m.col(j) = f_values;
    return frozen(m);
}

namespace {

constexpr double kProbabilityFloor = 1e-12;

// Columns are time slices.
CMat as_slices(const CVec& psi, const SpacetimeGrid& grid) {
    const auto nt = static_cast<Eigen::Index>(grid.time_points());
    const auto nx = static_cast<Eigen::Index>(grid.space_points());
    return Eigen::Map<const CMat>(psi.data(), nt, nx).transpose();
}

CVec from_slices(const CMat& s) {
    CMat t = s.transpose();
    return Eigen::Map<const CVec>(t.data(), t.size());
}

void check_state(const CVec& psi, const SpacetimeGrid& grid) {
    if (static_cast<std::size_t>(psi.size()) != grid.dimension())
        throw ValidationError("state length " + std::to_string(psi.size()) + " does not match grid dimension " +
                              std::to_string(grid.dimension()));
}

// Reference direction for the global phase: the initial profile on slice 0, or
// the largest amplitude when the overlap vanishes.
struct PhaseReference {
    bool use_profile = true;
    Eigen::Index slice_index = 0;  // row within slice 0 / flat index when !use_profile
    Eigen::Index column = 0;
    cplx overlap;
    double alpha = 0.0;
};

PhaseReference phase_reference(const CMat& slices, const CVec& psi0) {
    PhaseReference ref;
    ref.overlap = psi0.dot(slices.col(0));  // <psi0|slice_0>
    const double p0 = slices.col(0).squaredNorm();
    if (std::abs(ref.overlap) > 1e-8 * std::sqrt(std::max(p0, 0.0)) && std::abs(ref.overlap) > 1e-150) {
        ref.alpha = std::arg(ref.overlap);
        return ref;
    }
    ref.use_profile = false;
    slices.cwiseAbs().maxCoeff(&ref.slice_index, &ref.column);
    ref.overlap = slices(ref.slice_index, ref.column);
    ref.alpha = std::arg(ref.overlap);
    return ref;
}

}  // namespace

namespace {

double rescale_from_slices(const CMat& slices, double initial_norm) {
    const double p0 = slices.col(0).squaredNorm();
    if (!(p0 > kProbabilityFloor))
        throw ValidationError("state has no support on time index 0 (p0 = " + std::to_string(p0) + ")");
    return initial_norm / std::sqrt(p0);
}

}  // namespace

double rescale_constant(const CVec& state, const SpacetimeGrid& grid, double initial_norm) {
    check_state(state, grid);
    return rescale_from_slices(as_slices(state, grid), initial_norm);
}

SliceValues slice_values(const PdeProblem& problem, const CVec& state) {
    check_state(state, problem.grid);
    const SampledProfile init = sample_profile(problem.profile, problem.grid);
    const CMat s = as_slices(state, problem.grid);
    SliceValues out;
    out.rescale = rescale_from_slices(s, init.norm);
    if (problem.amplitude_map == AmplitudeMap::complex_amplitude) {
        out.values = out.rescale * s;
        return out;
    }
    const PhaseReference ref = phase_reference(s, init.normalized());
    out.phase = ref.alpha;
    out.values = (out.rescale * (std::polar(1.0, -ref.alpha) * s).real()).cast<cplx>();
    return out;
}

RMat extract_solution(const CVec& state, const PdeProblem& problem) {
    PdeProblem p = problem;
    p.amplitude_map = AmplitudeMap::real_part;
    return slice_values(p, state).values.real();
}

// ---------------------------------------------------------------------------

namespace {

CMat resolve_values(const PdeProblem& problem, const Linearization& lin, double* rescale) {
    const auto nx = static_cast<Eigen::Index>(problem.grid.space_points());
    const auto nt = static_cast<Eigen::Index>(problem.grid.time_points());
    CMat values;
    if (lin.kind == Linearization::Kind::state) {
        SliceValues sv = slice_values(problem, lin.state);
        values = std::move(sv.values);
        if (rescale) *rescale = sv.rescale;
    } else {
        values = lin.frozen_values;
        if (values.rows() != nx || values.cols() != nt)
            throw ValidationError("frozen linearization must be " + std::to_string(nx) + " x " + std::to_string(nt));
        if (rescale) *rescale = 1.0;
    }
    if (!values.allFinite()) throw ValidationError("linearization values contain NaN or Inf");
    return values;
}

Eigen::Index value_column(const PdeProblem& problem, Eigen::Index slice) {
    return problem.slice_rule == SliceRule::per_slice ? slice : 0;
}

}  // namespace

HamiltonianBundle assemble_hamiltonian(const PdeProblem& problem, const Linearization& linearization) {
    problem.validate();
    const SpacetimeGrid& g = problem.grid;
    const auto nx = static_cast<Eigen::Index>(g.space_points());
    const auto nt = static_cast<Eigen::Index>(g.time_points());
    const auto dim = static_cast<Eigen::Index>(g.dimension());
    const SampledProfile init = sample_profile(problem.profile, g);
    const CVec psi0 = init.normalized();
    if (std::abs(psi0.norm() - 1.0) > 1e-12) throw ValidationError("initial state is not normalized");

    HamiltonianBundle b;
    if (problem.linear()) {
        b.linearization_values = CMat::Zero(nx, nt);
    } else {
        b.linearization_values = resolve_values(problem, linearization, &b.rescale);
    }
    for (Eigen::Index j = 0; j < nt; ++j) {
        const CVec f = b.linearization_values.col(value_column(problem, j));
        const DenseOperator l = linearized_generator(problem, f);
        b.generators.push_back(l.matrix);
        b.propagators.push_back(propagator(l, g.dt, problem.taylor_order, Direction::backward).matrix);
    }

    auto at = [&](Eigen::Index s, Eigen::Index t) { return static_cast<Eigen::Index>(g.index(static_cast<std::size_t>(s), static_cast<std::size_t>(t))); };
    b.c0_term = CMat::Zero(dim, dim);
    b.c1 = CMat::Zero(dim, dim);
    b.c2 = CMat::Zero(dim, dim);
    const CMat p0 = CMat::Identity(nx, nx) - psi0 * psi0.adjoint();
    for (Eigen::Index s = 0; s < nx; ++s)
        for (Eigen::Index s2 = 0; s2 < nx; ++s2) b.c0_term(at(s, 0), at(s2, 0)) = p0(s, s2);
    for (Eigen::Index t = 0; t < nt; ++t) {
        if (t < nt - 1)
            for (Eigen::Index s = 0; s < nx; ++s) b.c1(at(s, t), at(s, t)) += 1.0;
        if (t >= 1) {
            const CMat gram = b.propagators[static_cast<std::size_t>(t)].adjoint() * b.propagators[static_cast<std::size_t>(t)];
            for (Eigen::Index s = 0; s < nx; ++s)
                for (Eigen::Index s2 = 0; s2 < nx; ++s2) b.c1(at(s, t), at(s2, t)) += gram(s, s2);
        }
    }
    // Forward hop T (x) |t-1><t| plus its adjoint.
    CMat hop = CMat::Zero(dim, dim);
    for (Eigen::Index t = 1; t < nt; ++t) {
        const CMat& tm = b.propagators[static_cast<std::size_t>(t)];
        for (Eigen::Index s = 0; s < nx; ++s)
            for (Eigen::Index s2 = 0; s2 < nx; ++s2) hop(at(s, t - 1), at(s2, t)) = tm(s, s2);
    }
    b.c2 = hop + hop.adjoint();
    b.h = problem.c0 * b.c0_term + b.c1 - b.c2;
    const double asym = (b.h - b.h.adjoint()).cwiseAbs().maxCoeff();
    if (asym > 1e-12) throw std::logic_error("assembled Hamiltonian is not Hermitian (" + std::to_string(asym) + ")");
    return b;
}

// ---------------------------------------------------------------------------

namespace {

// Real Newton solve of T(-dt)[u] u = rhs with T built from u itself.
RVec implicit_step(const PdeProblem& p, const RMat& lap, const RMat& der, const RVec& rhs, const RVec* frozen_f) {
    const double dt = p.grid.dt;
    const double beta = p.nonlinearity;
    const auto n = rhs.size();
    const RMat id = RMat::Identity(n, n);
    auto gen = [&](const RVec& f) -> RMat {
        RMat l = p.diffusion * lap;
        if (beta != 0.0) l -= beta * f.asDiagonal() * der;
        return l;
    };
    auto prop = [&](const RMat& l) -> RMat {
        RMat t = id - dt * l;
        if (p.taylor_order == 2) t += 0.5 * dt * dt * l * l;
        return t;
    };
    if (beta == 0.0 || frozen_f) {
        const RMat t = prop(gen(frozen_f ? *frozen_f : RVec::Zero(n)));
        return t.partialPivLu().solve(rhs);
    }
    // Predictor: propagator linearized at the previous slice.
    RVec u = prop(gen(rhs)).partialPivLu().solve(rhs);
    const double scale = std::max(rhs.norm(), 1e-300);
    for (int it = 0; it < 100; ++it) {
        const RMat l = gen(u);
        const RVec du = der * u;
        const RVec w = l * u;
        RVec res = u - dt * w - rhs;
        // d(L(u)u)/du = L - beta diag(D u)
        const RMat jw = l - beta * RMat(du.asDiagonal());
        RMat jac = id - dt * jw;
        if (p.taylor_order == 2) {
            const RVec lw = l * w;
            res += 0.5 * dt * dt * lw;
            const RVec dw = der * w;
            jac += 0.5 * dt * dt * (l * jw - beta * RMat(dw.asDiagonal()));
        }
        if (!res.allFinite()) break;
        if (res.norm() <= 1e-14 * scale) return u;
        const RVec step = jac.partialPivLu().solve(res);
        u -= step;
        if (step.norm() <= 1e-15 * std::max(u.norm(), 1e-300)) return u;
    }
    // Accept a slightly looser fixed point before declaring failure.
    RVec chk = prop(gen(u)) * u - rhs;
    if (chk.allFinite() && chk.norm() <= 1e-11 * scale) return u;
    throw InstabilityError("implicit step did not converge (Newton residual " + std::to_string(chk.norm()) + ")");
}

}  // namespace

HistoryState history_state(const PdeProblem& problem) {
    problem.validate();
    const SpacetimeGrid& g = problem.grid;
    const auto nx = static_cast<Eigen::Index>(g.space_points());
    const auto nt = static_cast<Eigen::Index>(g.time_points());
    const SampledProfile init = sample_profile(problem.profile, g);
    const RMat lap = discrete_operator(OperatorKind::laplacian, g).matrix.real();
    const RMat der = discrete_operator(OperatorKind::first_derivative, g).matrix.real();

    HistoryState hs;
    hs.physical = RMat::Zero(nx, nt);
    hs.physical.col(0) = init.values;
    for (Eigen::Index j = 1; j < nt; ++j) {
        const RVec prev = hs.physical.col(j - 1);
        RVec f0;
        const RVec* frozen = nullptr;
        if (problem.slice_rule == SliceRule::initial_slice && !problem.linear()) {
            f0 = init.values;
            frozen = &f0;
        }
        RVec next = implicit_step(problem, lap, der, prev, frozen);
        const double nrm = next.norm();
        if (!std::isfinite(nrm) || nrm < 1e-150 * init.norm || nrm > 1e150 * init.norm)
            throw InstabilityError("history state slice " + std::to_string(j) + " has degenerate norm");
        hs.physical.col(j) = next;
    }
    const CMat c = hs.physical.cast<cplx>();
    hs.state = from_slices(c);
    hs.state /= hs.state.norm();
    return hs;
}

// ---------------------------------------------------------------------------

EnergyEvaluator::EnergyEvaluator(PdeProblem problem) : problem_(std::move(problem)) {
    problem_.validate();
    const SampledProfile init = sample_profile(problem_.profile, problem_.grid);
    psi0_ = init.normalized();
    norm0_ = init.norm;
}

CVec EnergyEvaluator::laplacian(const CVec& u) const {
    const Eigen::Index n = u.size();
    const double inv = 1.0 / (problem_.grid.dx() * problem_.grid.dx());
    CVec out(n);
    for (Eigen::Index i = 0; i < n; ++i) out(i) = (u((i + n - 1) % n) - 2.0 * u(i) + u((i + 1) % n)) * inv;
    return out;
}

CVec EnergyEvaluator::derivative(const CVec& u) const {
    const Eigen::Index n = u.size();
    const double inv = 1.0 / problem_.grid.dx();
    CVec out(n);
    for (Eigen::Index i = 0; i < n; ++i) out(i) = (u((i + 1) % n) - u(i)) * inv;
    return out;
}

CVec EnergyEvaluator::derivative_adjoint(const CVec& v) const {
    const Eigen::Index n = v.size();
    const double inv = 1.0 / problem_.grid.dx();
    CVec out(n);
    for (Eigen::Index i = 0; i < n; ++i) out(i) = (v((i + n - 1) % n) - v(i)) * inv;
    return out;
}

CVec EnergyEvaluator::apply_generator(const CVec& u, const CVec& f) const {
    CVec out = problem_.diffusion * laplacian(u);
    if (problem_.nonlinearity != 0.0) out -= problem_.nonlinearity * f.cwiseProduct(derivative(u));
    return out;
}

CVec EnergyEvaluator::apply_generator_adjoint(const CVec& v, const CVec& f) const {
    CVec out = problem_.diffusion * laplacian(v);
    if (problem_.nonlinearity != 0.0) out -= problem_.nonlinearity * derivative_adjoint(f.conjugate().cwiseProduct(v));
    return out;
}

CVec EnergyEvaluator::apply_propagator(const CVec& u, const CVec& f) const {
    const double dt = problem_.grid.dt;
    const CVec lu = apply_generator(u, f);
    CVec out = u - dt * lu;
    if (problem_.taylor_order == 2) out += 0.5 * dt * dt * apply_generator(lu, f);
    return out;
}

CVec EnergyEvaluator::apply_propagator_adjoint(const CVec& v, const CVec& f) const {
    const double dt = problem_.grid.dt;
    const CVec lv = apply_generator_adjoint(v, f);
    CVec out = v - dt * lv;
    if (problem_.taylor_order == 2) out += 0.5 * dt * dt * apply_generator_adjoint(lv, f);
    return out;
}

CostReport EnergyEvaluator::evaluate(const CVec& psi, const Linearization& lin) const { return run(psi, lin, nullptr); }

CostReport EnergyEvaluator::evaluate_with_gradient(const CVec& psi, const Linearization& lin, CVec& g) const {
    return run(psi, lin, &g);
}

CostReport EnergyEvaluator::run(const CVec& psi, const Linearization& lin, CVec* g_out) const {
    const PdeProblem& p = problem_;
    const SpacetimeGrid& grid = p.grid;
    check_state(psi, grid);
    const auto nx = static_cast<Eigen::Index>(grid.space_points());
    const auto nt = static_cast<Eigen::Index>(grid.time_points());
    const double dt = grid.dt;
    const double beta = p.nonlinearity;
    const bool nonlinear = !p.linear();
    const bool self_consistent = nonlinear && lin.kind == Linearization::Kind::state;

    const CMat s = as_slices(psi, grid);
    const double p0 = s.col(0).squaredNorm();
    const cplx z0 = psi0_.dot(s.col(0));

    // Function values for the nonlinear term.
    CMat f;
    double rescale = 1.0;
    PhaseReference ref;
    if (nonlinear) {
        if (self_consistent) {
            if (!(p0 > kProbabilityFloor))
                throw ValidationError("state has no support on time index 0 (p0 = " + std::to_string(p0) + ")");
            rescale = norm0_ / std::sqrt(p0);
            if (p.amplitude_map == AmplitudeMap::complex_amplitude) {
                f = rescale * s;
            } else {
                ref = phase_reference(s, psi0_);
                f = (rescale * (std::polar(1.0, -ref.alpha) * s).real()).cast<cplx>();
            }
        } else {
            f = resolve_values(p, lin, nullptr);
        }
    } else {
        f = CMat::Zero(nx, 1);
    }
    auto fcol = [&](Eigen::Index j) -> CVec {
        if (!nonlinear) return f.col(0);
        return f.col(value_column(p, j));
    };

    CostReport rep;
    rep.rescale = rescale;
    rep.mode = self_consistent ? "self_consistent" : (nonlinear ? "frozen" : "linear");
    rep.c0_term = p.c0 * std::max(0.0, p0 - std::norm(z0));
    double residual = 0.0;
    double c1 = 0.0;
    cplx c2 = 0.0;
    CMat g;
    CMat kmat;
    if (g_out) {
        g = CMat::Zero(nx, nt);
        g.col(0) += p.c0 * (s.col(0) - psi0_ * z0);
        if (self_consistent) kmat = CMat::Zero(nx, nt);
    }
    for (Eigen::Index j = 0; j + 1 < nt; ++j) c1 += s.col(j).squaredNorm();
    for (Eigen::Index j = 1; j < nt; ++j) {
        const CVec u = s.col(j);
        const CVec fj = fcol(j);
        const CVec lu = apply_generator(u, fj);
        CVec tu = u - dt * lu;
        CVec llu;
        if (p.taylor_order == 2) {
            llu = apply_generator(lu, fj);
            tu += 0.5 * dt * dt * llu;
        }
        const CVec r = tu - s.col(j - 1);
        residual += r.squaredNorm();
        c1 += tu.squaredNorm();
        c2 += s.col(j - 1).dot(tu);
        if (!g_out) continue;
        g.col(j - 1) -= r;
        g.col(j) += apply_propagator_adjoint(r, fj);
        if (self_consistent) {
            // dC = 2 Re sum_x K_x df_x for the values entering this slice.
            const CVec du = derivative(u);
            CVec kx = dt * beta * r.conjugate().cwiseProduct(du);
            if (p.taylor_order == 2) {
                const CVec dlu = derivative(lu);
                const CVec ladj_r = apply_generator_adjoint(r, fj);
                kx -= 0.5 * dt * dt * beta *
                      (r.conjugate().cwiseProduct(dlu) + ladj_r.conjugate().cwiseProduct(du));
            }
            kmat.col(value_column(p, j)) += kx;
        }
    }
    rep.c1 = c1;
    rep.c2 = 2.0 * c2.real();
    if (p.c3 > 0.0) {
        const cplx sq = (psi.array() * psi.array()).sum();
        rep.c3_term = p.c3 * (1.0 - sq.real());
    }
    rep.total = rep.c0_term + residual + rep.c3_term;
    if (!std::isfinite(rep.total)) throw std::runtime_error("non-finite cost (check linearization values and state)");

    if (!g_out) return rep;

    if (self_consistent) {
        const double m = rescale;
        if (p.amplitude_map == AmplitudeMap::complex_amplitude) {
            g += m * kmat.conjugate();
            const double rr = 2.0 * (kmat.array() * s.array()).sum().real();
            g.col(0) += rr * (-m / (2.0 * p0)) * s.col(0);
        } else {
            const cplx rot = std::polar(1.0, -ref.alpha);
            const RMat gr = 2.0 * kmat.real();
            const CMat rs = rot * s;
            g += (0.5 * m * std::conj(rot)) * gr.cast<cplx>();
            const double sum_re = (gr.array() * rs.real().array()).sum();
            g.col(0) += sum_re * (-m / (2.0 * p0)) * s.col(0);
            const double sum_im = m * (gr.array() * rs.imag().array()).sum();
            const cplx dalpha = cplx(0.0, 0.5) / std::conj(ref.overlap);
            if (ref.use_profile) {
                g.col(0) += sum_im * dalpha * psi0_;
            } else {
                g(ref.slice_index, ref.column) += sum_im * dalpha;
            }
        }
    }
    CVec gv = from_slices(g);
    if (p.c3 > 0.0) gv -= p.c3 * psi.conjugate();
    *g_out = std::move(gv);
    return rep;
}

}  // namespace fkpde
