// Copyright 2026 fkpde contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

// Independent dense constructions used as test references. Nothing here calls
// the library's stencil or kernel code.

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "fkpde/circuit.hpp"

namespace oracle {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

inline CMat kron(const CMat& a, const CMat& b) {
    CMat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

// |i> -> |i+1 mod n|
inline CMat cyclic_shift(int n) {
    CMat m = CMat::Zero(n, n);
    for (int i = 0; i < n; ++i) m((i + 1) % n, i) = 1.0;
    return m;
}

inline CMat laplacian(int n, double dx) {
    CMat m = CMat::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        m(i, i) = -2.0 / (dx * dx);
        m(i, (i + 1) % n) += 1.0 / (dx * dx);
        m(i, (i + n - 1) % n) += 1.0 / (dx * dx);
    }
    return m;
}

// (f_{i+1} - f_i) / dx
inline CMat forward_difference(int n, double dx) {
    CMat m = CMat::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        m(i, i) = -1.0 / dx;
        m(i, (i + 1) % n) += 1.0 / dx;
    }
    return m;
}

inline CMat projector(int n, int k) {
    CMat m = CMat::Zero(n, n);
    m(k, k) = 1.0;
    return m;
}

// |a><b| on an n-dim register
inline CMat ketbra(int n, int a, int b) {
    CMat m = CMat::Zero(n, n);
    m(a, b) = 1.0;
    return m;
}

// Clock Hamiltonian c0 C0 + C1 - C2 written as a sum of Kronecker products,
// space register (most significant) times time register. f[j] holds the
// physical values linearizing the propagator that acts on slice j.
inline CMat clock_hamiltonian(int n_x, int n_t, double dt, double dx, double diffusion, double beta, int order,
                              const std::vector<CVec>& f, const CVec& psi0, double c0) {
    const int nx = 1 << n_x;
    const int nt = 1 << n_t;
    const CMat ix = CMat::Identity(nx, nx);
    const CMat it = CMat::Identity(nt, nt);
    const CMat lap = laplacian(nx, dx);
    const CMat der = forward_difference(nx, dx);
    CMat h = c0 * kron(ix - psi0 * psi0.adjoint(), projector(nt, 0));
    h += kron(ix, it - projector(nt, nt - 1));
    for (int j = 1; j < nt; ++j) {
        CMat l = diffusion * lap;
        if (beta != 0.0) l -= beta * CMat(f[static_cast<std::size_t>(j)].asDiagonal()) * der;
        CMat t = ix - dt * l;
        if (order == 2) t += 0.5 * dt * dt * l * l;
        h += kron(t.adjoint() * t, projector(nt, j));
        const CMat hop = kron(t, ketbra(nt, j - 1, j));
        h -= hop + hop.adjoint();
    }
    return h;
}

inline CMat gate_on(const CMat& u, int wire, int n) {
    // wire w is bit w of the index; kron puts the highest bit first
    CMat out = CMat::Identity(1, 1);
    for (int b = n - 1; b >= 0; --b) out = kron(out, b == wire ? u : CMat(CMat::Identity(2, 2)));
    return out;
}

inline CMat cnot_on(int control, int target, int n) {
    const int dim = 1 << n;
    CMat m = CMat::Zero(dim, dim);
    for (int i = 0; i < dim; ++i) {
        const int j = ((i >> control) & 1) ? i ^ (1 << target) : i;
        m(j, i) = 1.0;
    }
    return m;
}

inline CMat rotation(fkpde::GateKind kind, double theta) {
    const cplx i(0.0, 1.0);
    CMat p(2, 2);
    switch (kind) {
        case fkpde::GateKind::Rx: p << 0, 1, 1, 0; break;
        case fkpde::GateKind::Ry: p << 0, -i, i, 0; break;
        default: p << 1, 0, 0, -1; break;
    }
    return std::cos(theta / 2) * CMat::Identity(2, 2) - i * std::sin(theta / 2) * p;
}

// Full circuit unitary as an ordered matrix product, wire order.
inline CMat circuit_unitary(const fkpde::Ansatz& a, const std::vector<double>& params) {
    const int n = a.n_qubits;
    CMat u = CMat::Identity(1 << n, 1 << n);
    for (const fkpde::Gate& g : a.gates) {
        CMat step;
        switch (g.kind) {
            case fkpde::GateKind::CNOT: step = cnot_on(g.wire, g.target, n); break;
            case fkpde::GateKind::H: {
                CMat h(2, 2);
                h << 1, 1, 1, -1;
                step = gate_on(h / std::sqrt(2.0), g.wire, n);
                break;
            }
            case fkpde::GateKind::X: {
                CMat x(2, 2);
                x << 0, 1, 1, 0;
                step = gate_on(x, g.wire, n);
                break;
            }
            default:
                step = gate_on(rotation(g.kind, g.parametric() ? params[static_cast<std::size_t>(g.slot)] : g.angle),
                               g.wire, n);
        }
        u = step * u;
    }
    return u;
}

inline CVec random_state(int dim, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> d;
    CVec v(dim);
    for (int i = 0; i < dim; ++i) v(i) = cplx(d(rng), d(rng));
    return v.normalized();
}

inline std::vector<double> random_params(int n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> d(0.0, 6.283185307179586);
    std::vector<double> p(static_cast<std::size_t>(n));
    for (double& x : p) x = d(rng);
    return p;
}

}  // namespace oracle
