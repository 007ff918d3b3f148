// Copyright 2026 fkpde contributors
// SPDX-License-Identifier: Apache-2.0
#include "fkpde/reference.hpp"

#include <cmath>
#include <fstream>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "fkpde/spectral.hpp"

namespace fkpde {

namespace odeint = boost::numeric::odeint;

namespace {

using StateType = std::vector<double>;

struct Rhs {
    RMat lap;
    RMat der;
    double diffusion;
    double beta;

    void operator()(const StateType& f, StateType& dfdt, double /*t*/) const {
        const Eigen::Map<const RVec> u(f.data(), static_cast<Eigen::Index>(f.size()));
        Eigen::Map<RVec> out(dfdt.data(), static_cast<Eigen::Index>(dfdt.size()));
        out = diffusion * (lap * u);
        if (beta != 0.0) out -= beta * u.cwiseProduct(der * u);
    }
};

}  // namespace

ReferenceSolution integrate_reference(const PdeProblem& problem, const ReferenceOptions& options) {
    problem.validate();
    if (!(options.abs_tolerance > 0.0) || !(options.rel_tolerance > 0.0))
        throw ValidationError("reference tolerances must be positive");
    const SpacetimeGrid& g = problem.grid;
    const SampledProfile init = sample_profile(problem.profile, g);
    Rhs rhs{discrete_operator(OperatorKind::laplacian, g).matrix.real(),
            discrete_operator(OperatorKind::first_derivative, g).matrix.real(), problem.diffusion,
            problem.nonlinearity};

    ReferenceSolution out;
    out.grid = g;
    out.abs_tolerance = options.abs_tolerance;
    out.rel_tolerance = options.rel_tolerance;
    const auto nx = static_cast<Eigen::Index>(g.space_points());
    const auto nt = static_cast<Eigen::Index>(g.time_points());
    out.values = RMat::Zero(nx, nt);

    StateType f(init.values.data(), init.values.data() + nx);
    std::vector<double> times;
    for (Eigen::Index j = 0; j < nt; ++j) times.push_back(static_cast<double>(j) * g.dt);
    Eigen::Index col = 0;
    auto observer = [&](const StateType& x, double) {
        for (Eigen::Index i = 0; i < nx; ++i) out.values(i, col) = x[static_cast<std::size_t>(i)];
        ++col;
    };
    auto stepper = odeint::make_controlled(options.abs_tolerance, options.rel_tolerance,
                                           odeint::runge_kutta_dopri5<StateType>());
    try {
        out.steps = odeint::integrate_times(stepper, rhs, f, times.begin(), times.end(), g.dt / 16.0, observer,
                                            odeint::max_step_checker(static_cast<int>(options.max_steps_between_outputs)));
    } catch (const odeint::step_adjustment_error& e) {
        const double suggested = stability_check(problem.diffusion, problem.nonlinearity, g.dt, g.dx()).dt_max;
        throw std::runtime_error(std::string("reference integration stalled (stiff system): ") + e.what() +
                                 "; try dt <= " + std::to_string(suggested));
    } catch (const odeint::no_progress_error& e) {
        const double suggested = stability_check(problem.diffusion, problem.nonlinearity, g.dt, g.dx()).dt_max;
        throw std::runtime_error(std::string("reference integration stalled (stiff system): ") + e.what() +
                                 "; try dt <= " + std::to_string(suggested));
    }
    if (!out.values.allFinite()) throw std::runtime_error("reference solution blew up (non-finite values)");

    out.state = CVec::Zero(static_cast<Eigen::Index>(g.dimension()));
    for (Eigen::Index i = 0; i < nx; ++i)
        for (Eigen::Index j = 0; j < nt; ++j)
            out.state(static_cast<Eigen::Index>(g.index(static_cast<std::size_t>(i), static_cast<std::size_t>(j)))) =
                out.values(i, j);
    out.state.normalize();
    return out;
}

double infidelity(const CVec& a, const CVec& b) {
    if (a.size() != b.size()) throw ValidationError("infidelity: state lengths differ");
    const double na = a.norm();
    const double nb = b.norm();
    if (!(na > 0.0) || !(nb > 0.0)) throw ValidationError("infidelity: zero state");
    return 1.0 - std::abs(a.dot(b)) / (na * nb);
}

double infidelity(const CVec& state, const ReferenceSolution& reference) {
    if (state.size() != reference.state.size()) throw ValidationError("infidelity: grid mismatch");
    return infidelity(reference.state, state);
}

FineGridReport fine_grid_comparison(const PdeProblem& problem, int refinement, const RMat& solution,
                                    const ReferenceOptions& options) {
    if (refinement < 1 || (refinement & (refinement - 1)) != 0)
        throw ValidationError("refinement must be a power of two");
    int extra = 0;
    while ((1 << extra) < refinement) ++extra;

    const ReferenceSolution coarse = integrate_reference(problem, options);
    PdeProblem fine = problem;
    fine.grid = build_grid(problem.grid.n_x + extra, problem.grid.n_t, problem.grid.domain_length, problem.grid.dt);
    const ReferenceSolution fref = integrate_reference(fine, options);

    FineGridReport rep;
    rep.refinement = refinement;
    const Eigen::Index nx = coarse.values.rows();
    const Eigen::Index nt = coarse.values.cols();
    rep.discretization_by_time = RVec::Zero(nt);
    for (Eigen::Index j = 0; j < nt; ++j)
        for (Eigen::Index i = 0; i < nx; ++i)
            rep.discretization_by_time(j) = std::max(
                rep.discretization_by_time(j), std::abs(coarse.values(i, j) - fref.values(i * refinement, j)));
    rep.discretization_error = rep.discretization_by_time.maxCoeff();
    if (solution.size() > 0) {
        if (solution.rows() != nx || solution.cols() != nt)
            throw ValidationError("variational solution does not match the coarse grid");
        rep.has_variational = true;
        rep.variational_by_time = (solution - coarse.values).cwiseAbs().colwise().maxCoeff().transpose();
        rep.variational_error = rep.variational_by_time.maxCoeff();
    }
    return rep;
}

void write_matrix_csv(const std::string& path, const RMat& m, const SpacetimeGrid& grid) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out.precision(17);
    out << "x";
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << ",t=" << grid.t(static_cast<std::size_t>(j));
    out << '\n';
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        out << grid.x(static_cast<std::size_t>(i));
        for (Eigen::Index j = 0; j < m.cols(); ++j) out << ',' << m(i, j);
        out << '\n';
    }
}

}  // namespace fkpde
