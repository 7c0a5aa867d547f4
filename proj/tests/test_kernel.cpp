#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <bit>
#include <cmath>
#include <cstdint>

#include "votesig/errors.hpp"
#include "votesig/kernel.hpp"

using namespace votesig;

namespace {

// Independent oracle: enumerate every outcome vector of 2n+1 votes and add
// up the probability of the patterns with a correct majority.
double enumerate_majority(double q, int n) {
    const int bits = 2 * n + 1;
    double total = 0.0;
    for (std::uint32_t mask = 0; mask < (1u << bits); ++mask) {
        const int ones = std::popcount(mask);
        if (ones >= n + 1)
            total += std::pow(q, ones) * std::pow(1.0 - q, bits - ones);
    }
    return total;
}

// Even-budget oracle with a fair coin on exact ties.
double enumerate_even_majority(double q, int n) {
    const int bits = 2 * n;
    double total = 0.0;
    for (std::uint32_t mask = 0; mask < (1u << bits); ++mask) {
        const int ones = std::popcount(mask);
        const double p = std::pow(q, ones) * std::pow(1.0 - q, bits - ones);
        if (ones > n)
            total += p;
        else if (ones == n)
            total += 0.5 * p;
    }
    return total;
}

} // namespace

TEST_CASE("majority_accuracy matches exhaustive enumeration for n <= 6") {
    for (int n = 0; n <= 6; ++n) {
        for (int i = 0; i <= 20; ++i) {
            const double q = i / 20.0;
            const double oracle = enumerate_majority(q, n);
            CHECK(std::fabs(majority_accuracy(q, n) - oracle) <= 1e-12);
        }
    }
}

TEST_CASE("majority_accuracy spec values") {
    CHECK(majority_accuracy(0.5, 7) == 0.5);
    CHECK(majority_accuracy(0.75, 1) == doctest::Approx(0.84375).epsilon(1e-13));
    CHECK(majority_accuracy(0.75, 2) == doctest::Approx(0.896484375).epsilon(1e-13));
    CHECK(majority_accuracy(0.0, 12) == 0.0);
    CHECK(majority_accuracy(1.0, 12) == 1.0);
}

TEST_CASE("reflection holds at machine precision") {
    // Dyadic grid: q and 1-q are both exact, so the identity is tight.
    for (int n : {0, 1, 2, 3, 7, 16, 33, 64, 100, 500}) {
        for (int i = 0; i <= 128; ++i) {
            const double q = i / 128.0;
            const double s = majority_accuracy(q, n) + majority_accuracy(1.0 - q, n);
            CHECK(std::fabs(s - 1.0) <= 5e-16);
        }
        // 101-point grid: 1-q itself rounds, which P' can amplify slightly.
        for (int i = 0; i <= 100; ++i) {
            const double q = i / 100.0;
            const double s = majority_accuracy(q, n) + majority_accuracy(1.0 - q, n);
            CHECK(std::fabs(s - 1.0) <= 1e-14);
        }
    }
}

TEST_CASE("increment identity and telescoping") {
    for (int i = 0; i <= 100; ++i) {
        const double q = i / 100.0;
        double acc = q;
        for (int n = 0; n <= 64; ++n) {
            const double inc = majority_increment(q, n);
            CHECK(std::fabs(inc - (majority_accuracy(q, n + 1) - majority_accuracy(q, n))) <=
                  1e-12);
            CHECK(std::fabs(acc - majority_accuracy(q, n)) <= 1e-10);
            acc += inc;
        }
    }
}

TEST_CASE("majority_increment spec values") {
    CHECK(majority_increment(0.75, 0) == doctest::Approx(0.09375).epsilon(1e-13));
    CHECK(majority_increment(0.5, 5) == 0.0);
    CHECK(majority_increment(0.25, 0) == doctest::Approx(-0.09375).epsilon(1e-13));
}

TEST_CASE("fixed-q monotonicity and discrete curvature") {
    for (double q : {0.55, 0.7, 0.92}) {
        double prev_inc = majority_increment(q, 0);
        CHECK(prev_inc > 0.0);
        for (int n = 1; n <= 64; ++n) {
            const double inc = majority_increment(q, n);
            CHECK(inc >= 0.0);
            CHECK(inc <= prev_inc + 1e-15);
            prev_inc = inc;
        }
    }
    for (double q : {0.45, 0.3, 0.08}) {
        double prev_inc = majority_increment(q, 0);
        CHECK(prev_inc < 0.0);
        for (int n = 1; n <= 64; ++n) {
            const double inc = majority_increment(q, n);
            CHECK(inc <= 0.0);
            CHECK(inc >= prev_inc - 1e-15);
            prev_inc = inc;
        }
    }
    for (double q : {0.0, 0.5, 1.0}) {
        for (int n = 0; n <= 20; ++n) CHECK(majority_increment(q, n) == 0.0);
    }
}

TEST_CASE("even collapse") {
    CHECK(even_majority_accuracy(0.6, 1) == doctest::Approx(0.6).epsilon(1e-13));
    CHECK(even_majority_accuracy(0.75, 2) ==
          doctest::Approx(enumerate_even_majority(0.75, 2)).epsilon(1e-13));
    CHECK(even_majority_accuracy(0.5, 3) == 0.5);
    for (int n = 1; n <= 32; ++n) {
        for (int i = 0; i <= 50; ++i) {
            const double q = i / 50.0;
            CHECK(std::fabs(even_majority_accuracy(q, n) - majority_accuracy(q, n - 1)) <=
                  1e-12);
        }
    }
    // Against the exhaustive fair-tie enumeration for small n.
    for (int n = 1; n <= 6; ++n) {
        for (int i = 1; i < 10; ++i) {
            const double q = i / 10.0;
            CHECK(std::fabs(even_majority_accuracy(q, n) - enumerate_even_majority(q, n)) <=
                  1e-12);
        }
    }
}

TEST_CASE("tail sum and continued fraction agree on the overlap band") {
    for (std::int64_t n : {32, 50, 64, 65, 80, 128, 1000, 20000}) {
        for (int i = 1; i < 50; ++i) {
            const double q = i / 100.0;
            const double a = detail::majority_tail_sum(q, n);
            const double b = detail::majority_beta_cf(q, n);
            CHECK(std::fabs(a - b) <= 1e-12 * std::max({a, b, 1e-300}));
        }
    }
}

TEST_CASE("large-n accuracy sanity") {
    // P_n(q) for q > 1/2 tends to 1 at Hoeffding speed.
    const double p = majority_accuracy(0.6, 1000);
    CHECK(p > 1.0 - std::exp(-2.0 * 2001.0 * 0.01) - 1e-12);
    CHECK(p <= 1.0);
    const double big = majority_accuracy(0.499999, 1000000);
    CHECK(big > 0.49);
    CHECK(big < 0.5);
}

TEST_CASE("kernel_derivative") {
    CHECK(kernel_derivative(0.5, 1) == doctest::Approx(1.5).epsilon(1e-13));
    CHECK(kernel_derivative(0.0, 1) == 0.0);
    CHECK(kernel_derivative(0.5, 0) == 1.0);
    // Central finite differences as an independent check.
    const double h = 1e-6;
    for (std::int64_t n : {1, 2, 5, 17}) {
        for (double q : {0.2, 0.45, 0.5, 0.77}) {
            const double fd =
                (majority_accuracy(q + h, n) - majority_accuracy(q - h, n)) / (2.0 * h);
            CHECK(kernel_derivative(q, n) == doctest::Approx(fd).epsilon(1e-7));
        }
    }
}

TEST_CASE("branch_points") {
    auto bp = branch_points(0.0);
    CHECK(bp.upper == 1.0);
    CHECK(bp.lower == 0.0);
    bp = branch_points(0.25);
    CHECK(bp.upper == 0.5);
    CHECK(bp.lower == 0.5);
    bp = branch_points(3.0 / 16.0);
    CHECK(bp.upper == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(bp.lower == doctest::Approx(0.25).epsilon(1e-14));
    for (int i = 0; i <= 40; ++i) {
        const double r = 0.25 * i / 40.0;
        bp = branch_points(r);
        CHECK(bp.upper * (1.0 - bp.upper) == doctest::Approx(r).epsilon(1e-12));
        CHECK(bp.upper + bp.lower == doctest::Approx(1.0).epsilon(1e-15));
    }
}

TEST_CASE("psi_kernel values and continuity") {
    CHECK(psi_kernel(0.0, 3) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(psi_kernel(0.25, 1) == doctest::Approx(1.5).epsilon(1e-13));
    CHECK(psi_kernel(0.25, 0) == 1.0);
    CHECK(psi_kernel(0.25, 2) == doctest::Approx(kernel_derivative(0.5, 2)).epsilon(1e-13));

    // The series and quotient routes agree on a wide band around the
    // switch point n*(1-4r) = 1, so psi is continuous across it.
    for (std::int64_t n : {8, 64, 1024, 100000}) {
        const double a_switch = 1.0 / static_cast<double>(n);
        for (double f : {0.3, 0.7, 1.0, 1.4, 2.0}) {
            const double a = a_switch * f;
            const double s = detail::psi_series(a, n);
            const double c = detail::psi_quotient(a, n);
            CHECK(s == doctest::Approx(c).epsilon(1e-11));
        }
    }
    // Against the quotient definition where it is well conditioned.
    for (std::int64_t n : {0, 1, 5, 40}) {
        for (int i = 0; i <= 20; ++i) {
            const double r = 0.24 * i / 20.0;
            const double u = std::sqrt(1.0 - 4.0 * r);
            const double direct = (2.0 * majority_accuracy(0.5 + 0.5 * u, n) - 1.0) / u;
            CHECK(psi_kernel(r, n) == doctest::Approx(direct).epsilon(1e-11));
        }
    }
}

TEST_CASE("binomial helpers") {
    CHECK(binomial(1, 1) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(binomial(3, 2) == doctest::Approx(3.0).epsilon(1e-13));
    CHECK(binomial(40, 20) == doctest::Approx(137846528820.0).epsilon(1e-12));
    CHECK(scaled_increment_coeff(0) == doctest::Approx(0.25).epsilon(1e-13));
    CHECK(scaled_increment_coeff(1) == doctest::Approx(3.0 / 16.0).epsilon(1e-13));
    // No overflow far beyond the 64-bit factorial range.
    CHECK(scaled_increment_coeff(1000000) > 0.0);
    CHECK(scaled_increment_coeff(1000000) < 0.001);
}

TEST_CASE("invalid inputs are rejected") {
    CHECK_THROWS_AS(majority_accuracy(-0.1, 3), validation_error);
    CHECK_THROWS_AS(majority_accuracy(1.5, 3), validation_error);
    CHECK_THROWS_AS(majority_accuracy(std::nan(""), 3), validation_error);
    CHECK_THROWS_AS(majority_accuracy(0.5, -1), validation_error);
    CHECK_THROWS_AS(even_majority_accuracy(0.5, 0), validation_error);
    CHECK_THROWS_AS(branch_points(0.3), validation_error);
    CHECK_THROWS_AS(psi_kernel(-0.1, 3), validation_error);
    CHECK_THROWS_AS(log_binomial(3, 5), validation_error);
}
