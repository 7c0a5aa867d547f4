#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "votesig/piecewise.hpp"

namespace votesig {

// One latent-probability atom of a discrete mixing law.
struct LawAtom {
    double q;
    double weight;
};

// Purely atomic law for Q.  Atoms are kept sorted by q with duplicates
// merged; weights sum to one.
struct DiscreteLaw {
    std::vector<LawAtom> atoms;
};

// Piecewise-linear latent density on [0,1].  Nodes must include both
// endpoints; the interpolant integrates to one.
struct GridDensity {
    std::vector<double> nodes;
    std::vector<double> values;

    PiecewiseLinear pl() const { return PiecewiseLinear{nodes, values}; }
};

// Atom + density mixture: with probability discrete_weight draw from the
// discrete part, otherwise from the density.  Both parts are normalized
// laws in their own right.
struct HybridLaw {
    DiscreteLaw discrete;
    GridDensity density;
    double discrete_weight = 0.0;
};

using LatentLaw = std::variant<DiscreteLaw, GridDensity, HybridLaw>;

// Named parametric constructions.
struct OscillationSpec {
    int j_max = 10;
};
struct MarginWorstCaseSpec {
    double C;
    double kappa;
    double t0;
};
enum class Figure1Curve { constant, fast_drop, dip_then_surpass, rise_then_fall, slow_rise };
struct Figure1Spec {
    Figure1Curve curve;
};
using NamedLaw = std::variant<OscillationSpec, MarginWorstCaseSpec, Figure1Spec>;

Figure1Curve figure1_curve_from_name(const std::string& name);
std::string figure1_curve_name(Figure1Curve curve);
std::vector<Figure1Curve> all_figure1_curves();

// Sorts, merges duplicate q's, validates.
DiscreteLaw make_discrete(std::vector<LawAtom> atoms);

void validate(const DiscreteLaw& law);
void validate(const GridDensity& density);
void validate(const HybridLaw& law);
void validate(const LatentLaw& law);

LatentLaw make_named(const NamedLaw& spec);

double mean(const LatentLaw& law);

// Pi(|Q - 1/2| <= t) for t in (0, 1/2].
double margin_mass(const LatentLaw& law, double t);

// Sampled branch coordinates of a latent density: the asymmetry
// g(r) = f(q_+(r)) - f(q_-(r)) and symmetric part s(r) = f(q_+) + f(q_-).
struct BranchDecomposition {
    std::vector<double> r_nodes;
    std::vector<double> g_values;
    std::vector<double> s_values;
};

// Samples g and s on an r-grid uniform in u = sqrt(1-4r), which resolves
// the slow-voting region near r = 1/4.
BranchDecomposition branch_decompose(const GridDensity& density,
                                     std::size_t r_grid_size = 1025);

// Exact branch asymmetry as a function of u = sqrt(1-4r): for a
// piecewise-linear latent density this profile is itself piecewise linear,
// with kinks at |2q - 1| of the density nodes.
PiecewiseLinear branch_asymmetry_u(const GridDensity& density);

inline constexpr std::size_t kDefaultRGridSize = 1025;
inline constexpr std::size_t kDefaultQuadraturePanels = 2048;

} // namespace votesig
