#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "votesig/latent_law.hpp"

namespace votesig {

// Categorical outcome probabilities; index 0 is the correct class.
struct CategoricalVector {
    std::vector<double> p;
};
void validate(const CategoricalVector& vec);

struct MonteCarloMode {
    std::uint64_t seed = 0;
    std::size_t reps = 100000;
};

struct PluralityResult {
    double accuracy = 0.0;
    double stderr_value = 0.0; // zero in exact mode
    bool exact = true;
    std::size_t reps = 0;
};

// P{correct class wins the tie-broken plurality among m iid draws}.
// Exact mode enumerates multinomial compositions and requires
// C(m+K-1, K-1) <= 1e7; Monte Carlo is unbiased with a reported
// standard error.
double plurality_accuracy_exact(const CategoricalVector& vec, int m);
PluralityResult plurality_accuracy_mc(const CategoricalVector& vec, int m,
                                      const MonteCarloMode& mc);
PluralityResult plurality_accuracy(const CategoricalVector& vec, int m,
                                   const std::optional<MonteCarloMode>& mc = {});

// Large-budget limit: 1{p_0 maximal} / #maximizers.
double plurality_endpoint(const CategoricalVector& vec);

// The concentrated/diffuse pair with equal correct-class probability but
// different three-vote accuracies (and different endpoints for
// q in (1/3, 1/2)).
struct QNotEnoughWitness {
    double a_conc;
    double a_diff;
    double endpoint_conc;
    double endpoint_diff;
};
QNotEnoughWitness q_not_enough_witness(double q, int k);

// Symmetric wrong-answer curve V^sym_{m,K} = E A_{m,K}(Q, (1-Q)/(K-1), ...).
std::vector<PluralityResult> symmetric_wrong_curve(
    const LatentLaw& law, int k, const std::vector<int>& m_list,
    const std::optional<MonteCarloMode>& mc = {});

} // namespace votesig
