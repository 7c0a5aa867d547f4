#pragma once

#include <cstdint>
#include <vector>

#include "votesig/latent_law.hpp"
#include "votesig/signature.hpp"

namespace votesig {

// Distribution-free bound on |V_m - V_n| from the signature's total
// variation: the partial increment-coefficient sum and its sqrt closed form,
// both clamped at one.  The sum form never exceeds the closed form.
struct VariationBound {
    double sum_form;
    double closed_form;
};
VariationBound variation_bound(double sig_tv, std::int64_t n, std::int64_t m);

// Exponential tail bound when supp(w) is confined to [0, a], a < 1/4:
// (2a/(1-4a)) * tv * (4a)^n dominates |V_m - V_n| for every m > n.
double near_zero_bound(double sig_tv, double a, std::int64_t n);

// Local margin condition Pi(|Q - 1/2| <= t) <= C t^kappa for t < t0.
struct MarginCondition {
    double C;
    double kappa;
    double t0;
};

// Endpoint-rate bounds for M = 2n+1 votes.
double bridge_bound(const MarginCondition& cond, std::int64_t n);
double gap_bridge_bound(double delta, std::int64_t n);
double density_bridge_bound(double bound_B, std::int64_t n);

struct RateProbePoint {
    std::int64_t n;
    std::int64_t votes;
    double gap;
};
struct RateProbeResult {
    double slope; // least-squares slope of log gap versus log votes
    std::vector<RateProbePoint> points; // the fitted contiguous block
    std::int64_t smallest_votes;        // empirical lower end of the fit
    bool polynomial_decay; // false when the gap collapses below noise early
};

// Fits the endpoint-gap decay of the worst-case margin law built from cond.
// The fit uses the largest contiguous block of budgets with gap > 1e-12;
// fewer than 3 usable points raises precision_error.
RateProbeResult rate_sharpness_probe(const MarginCondition& cond,
                                     const std::vector<std::int64_t>& n_list);

// Same fit for an arbitrary law (used to demonstrate non-polynomial decay
// of gap laws).
RateProbeResult rate_probe_law(const LatentLaw& law,
                               const std::vector<std::int64_t>& n_list);

enum class ShapeClass { monotone_up, monotone_down, mixed };
const char* shape_class_name(ShapeClass c);

// monotone_up iff w >= 0 (atoms and density up to 1e-12), monotone_down iff
// -w >= 0, else mixed.  The zero signature classifies as monotone_up.
ShapeClass classify_shape(const SignedSignature& sig);

struct OscillationSign {
    int j;
    std::int64_t k; // k_j = 3 j 2^j
    int sign;       // certified sign of the k_j-th signed moment
    double dominance_margin; // 1 - competing mass / dominant term
};

// Signs of the signed moments of the oscillation construction at the
// selected budgets k_j, certified by log-domain dominance of the j-th
// series term and cross-checked through the pushforward moment formula.
std::vector<OscillationSign> oscillation_signs(int j_max);

} // namespace votesig
