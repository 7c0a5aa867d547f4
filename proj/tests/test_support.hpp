#pragma once

// Shared fixtures for the test suites: the two latent densities with equal
// branch asymmetry, and reproducible random law generators.

#include <cmath>
#include <cstdint>
#include <vector>

#include "votesig/latent_law.hpp"
#include "votesig/rng.hpp"

namespace votesig_test {

// f1(q) = 1 + (2q-1)/4: linear, so two nodes represent it exactly.
inline votesig::GridDensity make_f1() {
    return votesig::GridDensity{{0.0, 1.0}, {0.75, 1.25}};
}

// f2(q) = 1 + (2q-1)/4 + 4(q(1-q) - 1/6): quadratic with the same branch
// asymmetry as f1.  Sampled on a uniform symmetric grid; the interpolation
// error is branch-symmetric there, so it stays invisible to voting.
inline votesig::GridDensity make_f2(std::size_t segments = 4096) {
    std::vector<double> nodes(segments + 1), values(segments + 1);
    for (std::size_t i = 0; i <= segments; ++i) {
        const double q = static_cast<double>(i) / segments;
        nodes[i] = q;
        values[i] = 1.0 + 0.25 * (2.0 * q - 1.0) + 4.0 * (q * (1.0 - q) - 1.0 / 6.0);
    }
    nodes.front() = 0.0;
    nodes.back() = 1.0;
    votesig::GridDensity d{std::move(nodes), std::move(values)};
    const double total = d.pl().integral();
    for (double& v : d.values) v /= total;
    return d;
}

// Random discrete law with 1..max_atoms atoms, q kept away from the exact
// threshold so signature-side endpoint integrals stay well conditioned.
inline votesig::DiscreteLaw random_discrete_law(votesig::SplitMix64& rng,
                                                int max_atoms = 8) {
    const int k = 1 + static_cast<int>(rng.next_u64() % max_atoms);
    std::vector<votesig::LawAtom> atoms;
    double total = 0.0;
    for (int i = 0; i < k; ++i) {
        double q = 0.01 + 0.98 * rng.next_double();
        if (std::fabs(q - 0.5) < 1e-3) q += (q < 0.5 ? -2e-3 : 2e-3);
        const double w = 0.05 + rng.next_double();
        atoms.push_back({q, w});
        total += w;
    }
    for (auto& a : atoms) a.weight /= total;
    return votesig::make_discrete(std::move(atoms));
}

// Random valid grid density: random interior nodes and nonnegative values,
// normalized to mass one.
inline votesig::GridDensity random_grid_density(votesig::SplitMix64& rng,
                                                int max_interior = 12) {
    const int k = 1 + static_cast<int>(rng.next_u64() % max_interior);
    std::vector<double> nodes{0.0, 1.0};
    for (int i = 0; i < k; ++i) {
        const double q = 0.02 + 0.96 * rng.next_double();
        bool close = false;
        for (double n : nodes)
            if (std::fabs(n - q) < 1e-3) close = true;
        if (!close) nodes.push_back(q);
    }
    std::sort(nodes.begin(), nodes.end());
    std::vector<double> values(nodes.size());
    for (double& v : values) v = rng.next_double() * 2.0;
    votesig::GridDensity d{std::move(nodes), std::move(values)};
    double total = d.pl().integral();
    if (total <= 0.1) {
        for (double& v : d.values) v += 1.0;
        total = d.pl().integral();
    }
    for (double& v : d.values) v /= total;
    return d;
}

} // namespace votesig_test
