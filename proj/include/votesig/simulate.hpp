#pragma once

#include <cstdint>
#include <vector>

#include "votesig/estimation.hpp"
#include "votesig/latent_law.hpp"

namespace votesig {

struct SimConfig {
    std::uint64_t seed = 0;
    std::size_t n_examples = 1;
    int repeat_depth = 1;
};
void validate(const SimConfig& cfg);

// Latent draw from the law at uniform coordinate u (stratified inversion:
// hybrid laws spend u on the discrete part below discrete_weight and on
// the density above it).
double latent_quantile(const LatentLaw& law, double u);

// N independent draws of Q, one substream per example: results do not
// depend on any worker partitioning.
std::vector<double> sample_latents(const LatentLaw& law, const SimConfig& cfg);

// Per example draw Q, then C ~ Bin(repeat_depth, Q).
GroupedSample simulate_counts(const LatentLaw& law, const SimConfig& cfg);

// Monte Carlo voting curve: running majority correctness at every odd
// prefix of 2 n_max + 1 votes, plus the rao-blackwellized variant that
// averages P_n(Q_i) analytically over the sampled latents.
struct McCurve {
    std::vector<double> values;
    std::vector<double> stderrs;
    std::vector<double> rb_values;
    std::vector<double> rb_stderrs;
    std::size_t n_examples = 0;
    std::uint64_t seed = 0;
};
McCurve mc_curve(const LatentLaw& law, std::int64_t n_max, const SimConfig& cfg);

} // namespace votesig
