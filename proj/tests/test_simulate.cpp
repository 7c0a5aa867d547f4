#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "test_support.hpp"
#include "votesig/errors.hpp"
#include "votesig/kernel.hpp"
#include "votesig/rng.hpp"
#include "votesig/signature.hpp"
#include "votesig/simulate.hpp"

using namespace votesig;
using namespace votesig_test;

TEST_CASE("sample_latents on point masses and mixtures") {
    const SimConfig cfg{123u, 2000, 1};
    const auto draws = sample_latents(LatentLaw{make_discrete({{0.75, 1.0}})}, cfg);
    for (double q : draws) CHECK(q == 0.75);

    const auto again = sample_latents(LatentLaw{make_discrete({{0.75, 1.0}})}, cfg);
    CHECK(draws == again);

    const SimConfig big{9u, 100000, 1};
    const auto mix = sample_latents(make_named(Figure1Spec{Figure1Curve::constant}), big);
    double ones = 0.0;
    for (double q : mix) ones += (q == 1.0) ? 1.0 : 0.0;
    const double frac = ones / static_cast<double>(mix.size());
    const double se = std::sqrt(0.75 * 0.25 / static_cast<double>(mix.size()));
    CHECK(std::fabs(frac - 0.75) <= 4.0 * se);
}

TEST_CASE("latent_quantile covers density and hybrid laws") {
    // Uniform density: the quantile is the identity.
    const LatentLaw uniform{GridDensity{{0.0, 1.0}, {1.0, 1.0}}};
    for (double u : {0.0, 0.25, 0.6, 1.0})
        CHECK(latent_quantile(uniform, u) == doctest::Approx(u).epsilon(1e-12));

    // Triangular density f(q) = 2q: quantile sqrt(u).
    const LatentLaw tri{GridDensity{{0.0, 1.0}, {0.0, 2.0}}};
    for (double u : {0.04, 0.25, 0.81})
        CHECK(latent_quantile(tri, u) == doctest::Approx(std::sqrt(u)).epsilon(1e-10));

    // Hybrid: below the discrete weight the atom, above it the density.
    const HybridLaw hybrid{make_discrete({{1.0, 1.0}}),
                           GridDensity{{0.0, 1.0}, {1.0, 1.0}}, 0.5};
    CHECK(latent_quantile(LatentLaw{hybrid}, 0.2) == 1.0);
    CHECK(latent_quantile(LatentLaw{hybrid}, 0.75) == doctest::Approx(0.5).epsilon(1e-12));

    // Empirical law of hybrid draws matches the mixture mean.
    const SimConfig cfg{77u, 200000, 1};
    const auto draws = sample_latents(LatentLaw{hybrid}, cfg);
    double acc = 0.0;
    for (double q : draws) acc += q;
    const double m = acc / static_cast<double>(draws.size());
    CHECK(std::fabs(m - (0.5 * 1.0 + 0.5 * 0.5)) <= 4.0 * 0.35 / std::sqrt(200000.0));
}

TEST_CASE("simulate_counts") {
    const SimConfig cfg{5u, 500, 7};
    const GroupedSample all = simulate_counts(LatentLaw{make_discrete({{1.0, 1.0}})}, cfg);
    for (int c : all.counts) CHECK(c == 7);
    const GroupedSample none = simulate_counts(LatentLaw{make_discrete({{0.0, 1.0}})}, cfg);
    for (int c : none.counts) CHECK(c == 0);

    const SimConfig big{6u, 1000000, 10};
    const GroupedSample coin =
        simulate_counts(LatentLaw{make_discrete({{0.5, 1.0}})}, big);
    double mean = 0.0;
    for (int c : coin.counts) mean += c;
    mean /= static_cast<double>(coin.counts.size());
    // 3 sigma of the Bin(10, 1/2) sample mean at N = 1e6.
    CHECK(std::fabs(mean - 5.0) <= 3.0 * std::sqrt(2.5) / 1000.0);

    const GroupedSample coin2 =
        simulate_counts(LatentLaw{make_discrete({{0.5, 1.0}})}, big);
    CHECK(coin.counts == coin2.counts);
}

TEST_CASE("mc_curve matches the kernel on a point mass") {
    const SimConfig cfg{17u, 1000000, 1};
    const McCurve mc = mc_curve(LatentLaw{make_discrete({{0.75, 1.0}})}, 2, cfg);
    const double expected[3] = {0.75, 0.84375, 0.896484375};
    for (int nidx = 0; nidx < 3; ++nidx) {
        CHECK(std::fabs(mc.values[static_cast<std::size_t>(nidx)] - expected[nidx]) <=
              4.0 * mc.stderrs[static_cast<std::size_t>(nidx)]);
        // Rao-Blackwellized values are exact for a point mass, with zero
        // sample variance: conditioning removes all of it.
        CHECK(mc.rb_values[static_cast<std::size_t>(nidx)] ==
              doctest::Approx(expected[nidx]).epsilon(1e-13));
        CHECK(mc.rb_stderrs[static_cast<std::size_t>(nidx)] <
              mc.stderrs[static_cast<std::size_t>(nidx)]);
    }
}

TEST_CASE("mc_curve tracks the analytic curve for figure1 laws") {
    for (Figure1Curve fc : all_figure1_curves()) {
        const LatentLaw law = make_named(Figure1Spec{fc});
        const SimConfig cfg{29u, 100000, 1};
        const McCurve mc = mc_curve(law, 12, cfg);
        const VotingCurve analytic = curve(law, 12);
        for (std::size_t n = 0; n <= 12; ++n) {
            const double se = std::max(mc.stderrs[n], 1e-9);
            CHECK(std::fabs(mc.values[n] - analytic.values[n]) <= 4.0 * se);
            const double rb_se = std::max(mc.rb_stderrs[n], 1e-9);
            CHECK(std::fabs(mc.rb_values[n] - analytic.values[n]) <= 4.0 * rb_se);
        }
    }
}

TEST_CASE("mc_curve is deterministic and seed-sensitive") {
    const LatentLaw law = make_named(Figure1Spec{Figure1Curve::slow_rise});
    const SimConfig cfg{31u, 20000, 1};
    const McCurve a = mc_curve(law, 5, cfg);
    const McCurve b = mc_curve(law, 5, cfg);
    CHECK(a.values == b.values);
    CHECK(a.rb_values == b.rb_values);
    const McCurve c = mc_curve(law, 5, SimConfig{32u, 20000, 1});
    CHECK(a.values != c.values);
}

TEST_CASE("even-budget simulation with a fair tie coin collapses") {
    // Empirical version of the even-collapse identity at 2n votes.
    const double q = 0.62;
    const int n = 4;
    const std::size_t reps = 400000;
    double wins = 0.0;
    for (std::size_t i = 0; i < reps; ++i) {
        SplitMix64 rng = substream(404u, i);
        int sum = 0;
        for (int v = 0; v < 2 * n; ++v) sum += rng.bernoulli(q) ? 1 : 0;
        if (sum > n)
            wins += 1.0;
        else if (sum == n)
            wins += rng.bernoulli(0.5) ? 1.0 : 0.0;
    }
    const double est = wins / static_cast<double>(reps);
    const double truth = majority_accuracy(q, n - 1);
    CHECK(std::fabs(est - truth) <=
          4.0 * std::sqrt(truth * (1.0 - truth) / static_cast<double>(reps)));
}

TEST_CASE("config validation") {
    CHECK_THROWS_AS(validate(SimConfig{0u, 0, 1}), validation_error);
    CHECK_THROWS_AS(validate(SimConfig{0u, 1, 0}), validation_error);
    CHECK_THROWS_AS(
        mc_curve(LatentLaw{make_discrete({{0.5, 1.0}})}, -1, SimConfig{0u, 1, 1}),
        validation_error);
}
