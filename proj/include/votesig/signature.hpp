#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "votesig/latent_law.hpp"
#include "votesig/piecewise.hpp"

namespace votesig {

struct SignatureAtom {
    double r;
    double weight; // signed
};

// Finite signed measure on [0, 1/4]: atoms plus an optional absolutely
// continuous part.  The density g(r) is stored as a piecewise-linear
// profile G(u) in u = sqrt(1-4r); pushforwards of piecewise-linear latent
// densities are exactly of this form, so the signed-moment identities hold
// to rounding rather than to grid error.
struct SignedSignature {
    std::vector<SignatureAtom> atoms; // sorted by r, merged
    PiecewiseLinear g_u;              // empty when purely atomic

    bool has_density() const { return !g_u.empty(); }
    double total_variation() const;
};

struct VotingCurve {
    std::vector<double> values;     // V_0 .. V_{n_max}
    std::optional<double> endpoint; // V_infinity when known analytically
};

// Sorts and merges atoms (radii within 1e-14 coincide), drops weights below
// 1e-15, checks ranges and the total-variation bound.
SignedSignature make_signature(std::vector<SignatureAtom> atoms,
                               PiecewiseLinear g_u = {});

// The signed voting signature of a latent law: each atom (q, w) maps to
// (q(1-q), w(2q-1)); densities map to their branch asymmetry.
SignedSignature pushforward(const LatentLaw& law);

// The odd-budget voting curve V_0..V_{n_max}.  Discrete laws use exact
// P_n summation; density laws use the moment/increment route.  The two
// redundant routes below are retained as cross-checks, not merged.
VotingCurve curve(const LatentLaw& law, std::int64_t n_max);
VotingCurve curve_by_quadrature(const LatentLaw& law, std::int64_t n_max);
VotingCurve curve_by_level_formula(const LatentLaw& law, std::int64_t n_max);

// Single V_n via the direct quadrature route; cheap for sparse budgets.
double curve_value(const LatentLaw& law, std::int64_t n);

// s_0 = 2 V_0 - 1 and s_k = (V_k - V_{k-1}) / C(2k-1, k).
std::vector<double> recover_moments(const VotingCurve& curve);

// int r^k w(dr) and the overflow-safe variant int (4r)^k w(dr).
double moment(const SignedSignature& sig, std::int64_t k);
double scaled_moment(const SignedSignature& sig, std::int64_t k);

// V_infinity: from the law as Pi((1/2,1]) + Pi({1/2})/2, or from the
// signature as 1/2 + (1/2) int (1-4r)^{-1/2} w(dr).
double endpoint(const LatentLaw& law);
double endpoint(const SignedSignature& sig);

struct RealizabilityReport {
    bool feasible;
    double slack;    // 1 - integral
    double integral; // int (1-4r)^{-1/2} |w|(dr)
    bool atom_at_quarter;
};
RealizabilityReport check_realizable(const SignedSignature& sig);

// A latent law whose pushforward is the given signature: branch atoms of
// weight |w|/sqrt(1-4r), slack at q = 1/2, density part via the realizing
// branch values.  Throws infeasibility_error when check_realizable fails.
LatentLaw realize(const SignedSignature& sig);

// A latent density with branch asymmetry g and branch-symmetric slack h,
// both given on a common r grid spanning [0, 1/4]:
//   f(q_+(r)) = (|g| + h + g)/2,   f(q_-(r)) = (|g| + h - g)/2.
GridDensity realize_density(const std::vector<double>& r_nodes,
                            const std::vector<double>& g_values,
                            const std::vector<double>& h_values);

} // namespace votesig
