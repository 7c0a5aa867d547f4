#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "votesig/latent_law.hpp"
#include "votesig/signature.hpp"

namespace votesig {

// Grouped correctness counts C_i ~ Bin(J, Q_i) at fixed repeat depth J.
struct GroupedSample {
    int depth = 0;
    std::vector<int> counts;
};
void validate(const GroupedSample& sample);

// Identified signed-moment prefix s_0..s_L with L = floor((J-1)/2), plus
// the sampling covariance of the estimator (sample covariance of the
// per-example transformed vector, divided by N).
struct MomentPrefix {
    std::vector<double> s;
    std::vector<std::vector<double>> covariance;
    int depth = 0;
    std::size_t n_examples = 0;
};

// a_l estimate: mean of (C)_l / (J)_l over examples.
double factorial_moment(const GroupedSample& sample, int l);

MomentPrefix signed_prefix(const GroupedSample& sample);

// Population version, fed by an exact count pmf over {0..J}.  The
// covariance field holds the per-example population covariance.
MomentPrefix signed_prefix_from_pmf(const std::vector<double>& pmf, int depth);

// (k, V_k - V_{k-1}) = (k, C(2k-1, k) s_k) for k = 1..L.
std::vector<std::pair<int, double>> prefix_to_increments(const MomentPrefix& prefix);

// Empirical signed pushforward at q_hat_i = C_i / J.
SignedSignature plugin_signature(const GroupedSample& sample);

// Two latent laws with identical Bin(J, .) count distributions but
// different signed moments at k_witness = floor(J/2) + 1.
struct NonidentPair {
    DiscreteLaw law1;
    DiscreteLaw law2;
    int k_witness = 0;
    std::vector<double> support;
};
NonidentPair nonident_pair(int depth);

// Exact count pmf P(C = c), c = 0..J, for C ~ Bin(J, Q) with Q ~ law.
std::vector<double> count_pmf(const DiscreteLaw& law, int depth);

} // namespace votesig
