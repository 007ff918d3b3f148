// Copyright 2026 fkpde contributors
// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <random>

#include "fkpde/harness.hpp"

namespace fkpde {

ShotSample shot_sample(const CVec& state, const SpacetimeGrid& grid, double initial_norm, long long shots,
                       std::uint64_t seed) {
    if (shots < 1) throw ValidationError("shots must be >= 1");
    if (state.size() != static_cast<Eigen::Index>(grid.dimension())) throw ValidationError("state does not match the grid");
    const double total = state.squaredNorm();
    if (!(total > 0.0)) throw ValidationError("cannot sample the zero state");

    ShotSample s;
    s.shots = shots;
    s.seed = seed;
    s.counts.assign(static_cast<std::size_t>(state.size()), 0);

    // Multinomial as a chain of conditional binomials.
    std::mt19937_64 rng(seed);
    long long left = shots;
    double mass = 1.0;
    for (Eigen::Index i = 0; i < state.size() && left > 0; ++i) {
        const double p = std::norm(state(i)) / total;
        const double q = mass > 0.0 ? std::min(1.0, p / mass) : 1.0;
        const long long k = i + 1 == state.size() ? left : std::binomial_distribution<long long>(left, q)(rng);
        s.counts[static_cast<std::size_t>(i)] = static_cast<std::uint64_t>(k);
        left -= k;
        mass -= p;
    }

    const auto nx = static_cast<Eigen::Index>(grid.space_points());
    const auto nt = static_cast<Eigen::Index>(grid.time_points());
    double p0 = 0.0;
    for (Eigen::Index i = 0; i < nx; ++i)
        p0 += static_cast<double>(s.counts[grid.index(static_cast<std::size_t>(i), 0)]) / static_cast<double>(shots);
    if (!(p0 > 0.0)) {
        // nothing landed on time 0: fall back to the state's own weight there
        for (Eigen::Index i = 0; i < nx; ++i) p0 += std::norm(state(static_cast<Eigen::Index>(grid.index(static_cast<std::size_t>(i), 0)))) / total;
        s.rescale_from_state = true;
    }
    s.rescale = initial_norm / std::sqrt(p0);
    s.profile = RMat::Zero(nx, nt);
    for (Eigen::Index i = 0; i < nx; ++i)
        for (Eigen::Index j = 0; j < nt; ++j)
            s.profile(i, j) =
                s.rescale * std::sqrt(static_cast<double>(s.counts[grid.index(static_cast<std::size_t>(i),
                                                                              static_cast<std::size_t>(j))]) /
                                      static_cast<double>(shots));
    return s;
}

}  // namespace fkpde
