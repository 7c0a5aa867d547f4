#pragma once

#include <cstdint>

namespace votesig {

// log C(n, k) via log-gamma differences.  Binomial coefficients are never
// formed as integer factorials: C(2n+1, n+1) overflows 64-bit near n = 31.
double log_binomial(std::int64_t n, std::int64_t k);
double binomial(std::int64_t n, std::int64_t k);

// C(2n+1, n+1) * 4^-(n+1): the scaled increment coefficient.  Lies in
// (0, 1/4] for every n, so increment sums can be formed without overflow.
double scaled_increment_coeff(std::int64_t n);

// P_n(q) = P{Bin(2n+1, q) >= n+1}, the fixed-q majority accuracy for odd
// budget 2n+1.  Canonicalized to the q < 1/2 branch so that the reflection
// P_n(q) + P_n(1-q) = 1 holds at machine precision.
double majority_accuracy(double q, std::int64_t n);

// P_{n+1}(q) - P_n(q) = C(2n+1, n+1) q^{n+1} (1-q)^{n+1} (2q-1) in closed form.
double majority_increment(double q, std::int64_t n);

// Even budget 2n with fair tie-breaking:
// P{Bin(2n,q) > n} + (1/2) P{Bin(2n,q) = n}.  Collapses to P_{n-1}(q).
double even_majority_accuracy(double q, std::int64_t n); // n >= 1

// P_n'(q) = (2n+1) C(2n, n) q^n (1-q)^n.
double kernel_derivative(double q, std::int64_t n);

// The two preimages of r under q -> q(1-q): q_+(r) = (1+sqrt(1-4r))/2 and
// q_-(r) = 1 - q_+(r).
struct BranchPoints {
    double upper;
    double lower;
};
BranchPoints branch_points(double r);

// psi_n(r) = (2 P_n(q_+(r)) - 1) / sqrt(1-4r), extended continuously to
// r = 1/4 where the value is P_n'(1/2).
double psi_kernel(double r, std::int64_t n);

namespace detail {

// The two evaluation routes behind majority_accuracy, both restricted to
// q in (0, 1/2).  Exposed so tests can pin the overlap band.
double majority_tail_sum(double q, std::int64_t n);
double majority_beta_cf(double q, std::int64_t n);
double psi_series(double a, std::int64_t n);
double psi_quotient(double a, std::int64_t n);

} // namespace detail

} // namespace votesig
