#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "test_support.hpp"
#include "votesig/errors.hpp"
#include "votesig/kernel.hpp"
#include "votesig/latent_law.hpp"

using namespace votesig;
using namespace votesig_test;

TEST_CASE("validate accepts and rejects per invariant") {
    CHECK_NOTHROW(validate(make_discrete({{0.0, 0.25}, {1.0, 0.75}})));
    CHECK_THROWS_WITH_AS(validate(DiscreteLaw{{{0.5, 0.5}}}),
                         doctest::Contains("weights sum to 0.5"), validation_error);
    CHECK_THROWS_WITH_AS(validate(GridDensity{{0.0, 0.5, 1.0}, {1.5, -0.1, 1.5}}),
                         doctest::Contains("negative density"), validation_error);
    CHECK_THROWS_AS(validate(DiscreteLaw{{}}), validation_error);
    CHECK_THROWS_AS(validate(DiscreteLaw{{{1.2, 1.0}}}), validation_error);
    CHECK_THROWS_AS(validate(GridDensity{{0.1, 1.0}, {1.1, 1.1}}), validation_error);
    // Integral off by more than 1e-10.
    CHECK_THROWS_AS(validate(GridDensity{{0.0, 1.0}, {1.1, 1.1}}), validation_error);
    // Duplicate atoms merge through make_discrete.
    const DiscreteLaw merged = make_discrete({{0.3, 0.5}, {0.3, 0.5}});
    CHECK(merged.atoms.size() == 1);
    CHECK(merged.atoms[0].weight == doctest::Approx(1.0));
}

TEST_CASE("figure1 gallery laws") {
    const LatentLaw constant = make_named(Figure1Spec{Figure1Curve::constant});
    const auto& cl = std::get<DiscreteLaw>(constant);
    REQUIRE(cl.atoms.size() == 2);
    CHECK(cl.atoms[0].q == 0.0);
    CHECK(cl.atoms[0].weight == 0.25);
    CHECK(cl.atoms[1].q == 1.0);
    CHECK(cl.atoms[1].weight == 0.75);

    const LatentLaw slow = make_named(Figure1Spec{Figure1Curve::slow_rise});
    const auto& sl = std::get<DiscreteLaw>(slow);
    REQUIRE(sl.atoms.size() == 2);
    CHECK(sl.atoms[0].q == 0.5095);
    CHECK(sl.atoms[0].weight == 0.509684);

    for (Figure1Curve c : all_figure1_curves()) {
        const LatentLaw law = make_named(Figure1Spec{c});
        CHECK_NOTHROW(validate(law));
        CHECK(mean(law) == doctest::Approx(0.75).epsilon(1e-6));
    }
    CHECK(figure1_curve_from_name("dip then surpass") == Figure1Curve::dip_then_surpass);
    CHECK(figure1_curve_name(Figure1Curve::fast_drop) == "fast drop");
    CHECK_THROWS_AS(figure1_curve_from_name("sideways"), validation_error);
}

TEST_CASE("oscillation law construction") {
    const LatentLaw law = make_named(OscillationSpec{3});
    const auto& dl = std::get<DiscreteLaw>(law);
    REQUIRE(dl.atoms.size() == 3);
    double sum = 0.0;
    for (const auto& a : dl.atoms) {
        CHECK(a.weight > 0.0);
        sum += a.weight;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));

    // Independent evaluation of the construction formulas.
    double total = 0.0;
    double w[4], b[4];
    for (int j = 1; j <= 3; ++j) {
        const double one_minus_4r = 1.0 - std::exp(-std::ldexp(1.0, -j));
        const double u = std::sqrt(one_minus_4r);
        w[j] = std::exp(-static_cast<double>(j * j)) / u;
        b[j] = (j % 2 == 0) ? 0.5 + 0.5 * u : 0.5 - 0.5 * u;
        total += w[j];
    }
    for (int j = 1; j <= 3; ++j) {
        bool found = false;
        for (const auto& a : dl.atoms) {
            if (std::fabs(a.q - b[j]) < 1e-12) {
                found = true;
                CHECK(a.weight == doctest::Approx(w[j] / total).epsilon(1e-12));
            }
        }
        CHECK(found);
    }
    CHECK_THROWS_AS(make_named(OscillationSpec{0}), validation_error);
    CHECK_THROWS_AS(make_named(OscillationSpec{15}), validation_error);
}

TEST_CASE("margin worst-case law") {
    for (double kappa : {1.0, 2.0}) {
        const MarginWorstCaseSpec spec{2.0, kappa, 0.5};
        const LatentLaw law = make_named(spec);
        CHECK_NOTHROW(validate(law));
        const auto& h = std::get<HybridLaw>(law);
        const double a = std::min(0.5, 0.5 * spec.C * std::pow(spec.t0, spec.kappa));
        CHECK(h.discrete_weight == doctest::Approx(1.0 - a).epsilon(1e-12));
        CHECK(h.discrete.atoms.size() == 1);
        CHECK(h.discrete.atoms[0].q == 1.0);
        // Margin condition Pi(|Q-1/2| <= t) = a (t/t0)^kappa <= C t^kappa.
        for (double t : {0.01, 0.05, 0.2, 0.45}) {
            const double m = margin_mass(law, t);
            const double expected = a * std::pow(t / spec.t0, spec.kappa);
            CHECK(m == doctest::Approx(expected).epsilon(1e-3));
            CHECK(m <= spec.C * std::pow(t, spec.kappa) * (1.0 + 1e-6) + 1e-9);
        }
    }
    CHECK_THROWS_AS(make_named(MarginWorstCaseSpec{-1.0, 1.0, 0.5}), validation_error);
    CHECK_THROWS_AS(make_named(MarginWorstCaseSpec{1.0, 1.0, 0.7}), validation_error);
}

TEST_CASE("mean") {
    CHECK(mean(make_named(Figure1Spec{Figure1Curve::constant})) == 0.75);
    CHECK(mean(LatentLaw{GridDensity{{0.0, 1.0}, {1.0, 1.0}}}) ==
          doctest::Approx(0.5).epsilon(1e-15));
    CHECK(mean(LatentLaw{make_discrete({{0.9, 1.0}})}) == 0.9);
}

TEST_CASE("margin_mass") {
    CHECK(margin_mass(make_named(Figure1Spec{Figure1Curve::constant}), 0.4) == 0.0);
    CHECK(margin_mass(LatentLaw{make_discrete({{0.5, 1.0}})}, 0.03) == 1.0);
    CHECK(margin_mass(LatentLaw{GridDensity{{0.0, 1.0}, {1.0, 1.0}}}, 0.1) ==
          doctest::Approx(0.2).epsilon(1e-14));
    CHECK_THROWS_AS(margin_mass(make_named(Figure1Spec{Figure1Curve::constant}), 0.0),
                    validation_error);
    CHECK_THROWS_AS(margin_mass(make_named(Figure1Spec{Figure1Curve::constant}), 0.6),
                    validation_error);
}

TEST_CASE("branch decomposition of symmetric and tilted densities") {
    // Uniform density: no asymmetry, symmetric part 2 everywhere.
    const GridDensity uniform{{0.0, 1.0}, {1.0, 1.0}};
    const BranchDecomposition bu = branch_decompose(uniform, 257);
    for (std::size_t i = 0; i < bu.r_nodes.size(); ++i) {
        CHECK(bu.g_values[i] == 0.0);
        CHECK(bu.s_values[i] == 2.0);
    }
    CHECK(bu.r_nodes.front() == 0.0);
    CHECK(bu.r_nodes.back() == 0.25);

    // f1 and f2 share the branch asymmetry g(r) = sqrt(1-4r)/2.
    const GridDensity f1 = make_f1();
    const GridDensity f2 = make_f2();
    const BranchDecomposition b1 = branch_decompose(f1, 513);
    const BranchDecomposition b2 = branch_decompose(f2, 513);
    for (std::size_t i = 0; i < b1.r_nodes.size(); ++i) {
        const double expected = 0.5 * std::sqrt(std::max(0.0, 1.0 - 4.0 * b1.r_nodes[i]));
        CHECK(std::fabs(b1.g_values[i] - expected) <= 1e-12);
    }
    for (std::size_t i = 0; i < b2.r_nodes.size(); ++i) {
        const double expected = 0.5 * std::sqrt(std::max(0.0, 1.0 - 4.0 * b2.r_nodes[i]));
        CHECK(std::fabs(b2.g_values[i] - expected) <= 3e-8);
    }
}

TEST_CASE("branch decomposition invariants on random densities") {
    SplitMix64 rng(20260809u);
    for (int trial = 0; trial < 50; ++trial) {
        const GridDensity d = random_grid_density(rng);
        const BranchDecomposition b = branch_decompose(d, 513);
        // |g| <= s pointwise and the symmetric part carries total mass one:
        // int s(r)/sqrt(1-4r) dr = int f = 1; the grid includes the kink
        // radii, so the u-trapezoid of the sampled values is exact.
        double mass = 0.0;
        for (std::size_t i = 0; i + 1 < b.r_nodes.size(); ++i) {
            CHECK(std::fabs(b.g_values[i]) <= b.s_values[i] + 1e-12);
            // u-substitution: dr/sqrt(1-4r) = du/2 on the sampling grid.
            const double u0 = std::sqrt(1.0 - 4.0 * b.r_nodes[i]);
            const double u1 = std::sqrt(std::max(0.0, 1.0 - 4.0 * b.r_nodes[i + 1]));
            mass += 0.25 * (b.s_values[i] + b.s_values[i + 1]) * (u0 - u1);
        }
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-8));

        // Realizability bound, computed exactly from the kink profile.
        const PiecewiseLinear g = branch_asymmetry_u(d);
        CHECK(0.5 * g.abs_integral() <= 1.0 + 1e-12);

        // Reconstruction from (g, s) with h = s - |g| reproduces f on both
        // branches.
        const PiecewiseLinear f = d.pl();
        for (std::size_t i = 0; i < b.r_nodes.size(); ++i) {
            const BranchPoints bp = branch_points(b.r_nodes[i]);
            const double gg = b.g_values[i];
            const double h = b.s_values[i] - std::fabs(gg);
            const double up = 0.5 * (std::fabs(gg) + h + gg);
            const double lo = 0.5 * (std::fabs(gg) + h - gg);
            CHECK(std::fabs(up - f(bp.upper)) <= 1e-8);
            CHECK(std::fabs(lo - f(bp.lower)) <= 1e-8);
        }
    }
}

TEST_CASE("branch asymmetry profile is exact for f1") {
    const PiecewiseLinear g = branch_asymmetry_u(make_f1());
    for (double u : {0.0, 0.25, 0.5, 0.9, 1.0}) {
        CHECK(g(u) == doctest::Approx(0.5 * u).epsilon(1e-14));
    }
}
