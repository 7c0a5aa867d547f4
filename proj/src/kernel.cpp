#include "votesig/kernel.hpp"

#include <cmath>
#include <string>

#include "votesig/errors.hpp"

namespace votesig {

namespace {

constexpr double kLogPi = 1.1447298858494002; // log(pi)

void require_prob(double q, const char* name) {
    if (!(q >= 0.0 && q <= 1.0))
        throw validation_error(std::string(name) + " must lie in [0,1], got " +
                               std::to_string(q));
}

void require_budget(std::int64_t n) {
    if (n < 0)
        throw validation_error("budget index must be >= 0, got " + std::to_string(n));
}

// stirlerr(n) = log(n!) - [log(sqrt(2 pi n)) + n log(n) - n].
// Loader's scheme: exact small-n values, truncated asymptotic series above.
// Keeps log C(2n, n) - n log 4 accurate in absolute terms for huge n, where
// raw lgamma differences drift at ~|lgamma| * eps.
double stirlerr(std::int64_t n) {
    static const double table[16] = {
        0.0,
        0.08106146679532733046,
        0.04134069595540923459,
        0.0276779256849986055,
        0.02079067210376406294,
        0.01664469118982303542,
        0.01387612882307198703,
        0.01189670994589242525,
        0.0104112652619718915,
        0.009255462182711227115,
        0.008330563433357696113,
        0.00757367548795429002,
        0.006942840107203807065,
        0.006408994188003447334,
        0.005951370112764919895,
        0.005554733551960566729};
    constexpr double S0 = 1.0 / 12.0;
    constexpr double S1 = 1.0 / 360.0;
    constexpr double S2 = 1.0 / 1260.0;
    constexpr double S3 = 1.0 / 1680.0;
    constexpr double S4 = 1.0 / 1188.0;
    if (n < 16) return table[n];
    const double nn = static_cast<double>(n);
    const double n1 = 1.0 / nn;
    const double n2 = n1 * n1;
    if (n > 500) return (S0 - S1 * n2) * n1;
    if (n > 80) return (S0 - (S1 - S2 * n2) * n2) * n1;
    if (n > 35) return (S0 - (S1 - (S2 - S3 * n2) * n2) * n2) * n1;
    return (S0 - (S1 - (S2 - (S3 - S4 * n2) * n2) * n2) * n2) * n1;
}

// log( C(2n, n) * 4^-n ) = -log(pi n)/2 + stirlerr(2n) - 2 stirlerr(n).
double log_central_coeff(std::int64_t n) {
    if (n == 0) return 0.0;
    return -0.5 * (kLogPi + std::log(static_cast<double>(n))) + stirlerr(2 * n) -
           2.0 * stirlerr(n);
}

// log( (4 q (1-q))^1 ) = log1p(-(2q-1)^2); 2q-1 is exact for q >= 1/4, and
// for q < 1/4 the relative error is harmless because |2q-1| is large.
double log_4r(double q) {
    const double d = 2.0 * q - 1.0;
    return std::log1p(-d * d);
}

// Modified Lentz continued fraction for the regularized incomplete beta
// (Numerical Recipes form).  Used with x strictly below (a+1)/(a+b+2).
double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 20000;
    constexpr double kEps = 3e-16;
    constexpr double kFpMin = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) <= kEps) return h;
    }
    throw precision_error("incomplete beta continued fraction did not converge");
}

} // namespace

double log_binomial(std::int64_t n, std::int64_t k) {
    if (k < 0 || k > n)
        throw validation_error("log_binomial: need 0 <= k <= n, got k=" +
                               std::to_string(k) + " n=" + std::to_string(n));
    return std::lgamma(static_cast<double>(n) + 1.0) -
           std::lgamma(static_cast<double>(k) + 1.0) -
           std::lgamma(static_cast<double>(n - k) + 1.0);
}

double binomial(std::int64_t n, std::int64_t k) { return std::exp(log_binomial(n, k)); }

double scaled_increment_coeff(std::int64_t n) {
    require_budget(n);
    // C(2n+1, n+1) 4^-(n+1) = [C(2n, n) 4^-n] * (2n+1) / (4 (n+1)).
    return std::exp(log_central_coeff(n)) * (2.0 * static_cast<double>(n) + 1.0) /
           (4.0 * (static_cast<double>(n) + 1.0));
}

namespace detail {

// Upper binomial tail by direct summation from the dominant term.
// For q < 1/2 the terms decay monotonically, so there is no cancellation.
double majority_tail_sum(double q, std::int64_t n) {
    const std::int64_t total = 2 * n + 1;
    // Leading term C(2n+1, n+1) q^{n+1} (1-q)^n, written through the scaled
    // central coefficient so that absolute log precision survives large n.
    double term = scaled_increment_coeff(n) *
                  std::exp(static_cast<double>(n + 1) * log_4r(q)) / (1.0 - q);
    double sum = term;
    const double ratio = q / (1.0 - q);
    for (std::int64_t j = n + 2; j <= total; ++j) {
        term *= ratio * static_cast<double>(total - j + 1) / static_cast<double>(j);
        sum += term;
        if (term < sum * 1e-18) break;
    }
    return sum;
}

// P{Bin(2n+1, q) >= n+1} = I_q(n+1, n+1); continued-fraction route,
// stable for large n where direct summation loses accuracy.
double majority_beta_cf(double q, std::int64_t n) {
    const double a = static_cast<double>(n) + 1.0;
    // x^a (1-x)^a / (a B(a,a)) = (2n+1)/4 * [C(2n,n) 4^-n] * (4q(1-q))^{n+1} / a
    const double front = 0.25 * (2.0 * static_cast<double>(n) + 1.0) *
                         std::exp(log_central_coeff(n) +
                                  static_cast<double>(n + 1) * log_4r(q));
    return front * betacf(a, a, q) / a;
}

double psi_series(double a, std::int64_t n) {
    // psi_n = (2n+1) C(2n,n) 4^-n * sum_k C(n,k) (-a)^k / (2k+1).
    // Intended for n*a <= ~1 where the alternating terms decay like 1/k!.
    const double coeff =
        (2.0 * static_cast<double>(n) + 1.0) * std::exp(log_central_coeff(n));
    double term = 1.0;
    double sum = 1.0;
    for (std::int64_t k = 1; k <= n; ++k) {
        term *= -a * static_cast<double>(n - k + 1) / static_cast<double>(k);
        sum += term / static_cast<double>(2 * k + 1);
        if (std::fabs(term) < 1e-18 * std::fabs(sum)) break;
    }
    return coeff * sum;
}

double psi_quotient(double a, std::int64_t n) {
    const double u = std::sqrt(a);
    // 2 P_n(q_+) - 1 = 1 - 2 P_n(q_-); the lower-branch tail is the small
    // quantity, so the subtraction does not cancel.
    const double lower = majority_accuracy(0.5 - 0.5 * u, n);
    return (1.0 - 2.0 * lower) / u;
}

} // namespace detail

double majority_accuracy(double q, std::int64_t n) {
    require_prob(q, "q");
    require_budget(n);
    if (q == 0.0) return 0.0;
    if (q == 1.0) return 1.0;
    if (q == 0.5) return 0.5;
    const bool flip = q > 0.5;
    const double qq = flip ? 1.0 - q : q;
    const double p =
        (n <= 64) ? detail::majority_tail_sum(qq, n) : detail::majority_beta_cf(qq, n);
    return flip ? 1.0 - p : p;
}

double majority_increment(double q, std::int64_t n) {
    require_prob(q, "q");
    require_budget(n);
    if (q == 0.0 || q == 1.0 || q == 0.5) return 0.0;
    const double orientation = 2.0 * q - 1.0;
    return scaled_increment_coeff(n) *
           std::exp(static_cast<double>(n + 1) * log_4r(q)) * orientation;
}

double even_majority_accuracy(double q, std::int64_t n) {
    require_prob(q, "q");
    if (n < 1)
        throw validation_error("even budget index must be >= 1, got " +
                               std::to_string(n));
    if (q == 0.0) return 0.0;
    if (q == 1.0) return 1.0;
    if (q == 0.5) return 0.5;
    const bool flip = q > 0.5;
    const double qq = flip ? 1.0 - q : q;
    // Sum P{Bin(2n, qq) = j} for j = n..2n, the tie term at half weight.
    double term = std::exp(log_central_coeff(n) + static_cast<double>(n) * log_4r(qq));
    double sum = 0.5 * term;
    const double ratio = qq / (1.0 - qq);
    for (std::int64_t j = n + 1; j <= 2 * n; ++j) {
        term *= ratio * static_cast<double>(2 * n - j + 1) / static_cast<double>(j);
        sum += term;
        if (term < sum * 1e-18) break;
    }
    return flip ? 1.0 - sum : sum;
}

double kernel_derivative(double q, std::int64_t n) {
    require_prob(q, "q");
    require_budget(n);
    if (n == 0) return 1.0;
    if (q == 0.0 || q == 1.0) return 0.0;
    // (2n+1) C(2n,n) (q(1-q))^n = (2n+1) [C(2n,n) 4^-n] (4q(1-q))^n.
    return (2.0 * static_cast<double>(n) + 1.0) *
           std::exp(log_central_coeff(n) + static_cast<double>(n) * log_4r(q));
}

BranchPoints branch_points(double r) {
    if (!(r >= -1e-15 && r <= 0.25 + 1e-15))
        throw validation_error("radius must lie in [0, 1/4], got " + std::to_string(r));
    // Clamp round-off before the square root.
    const double a = std::max(0.0, std::min(1.0, 1.0 - 4.0 * r));
    const double s = std::sqrt(a);
    return BranchPoints{0.5 + 0.5 * s, 0.5 - 0.5 * s};
}

double psi_kernel(double r, std::int64_t n) {
    require_budget(n);
    if (!(r >= -1e-15 && r <= 0.25 + 1e-15))
        throw validation_error("radius must lie in [0, 1/4], got " + std::to_string(r));
    const double a = std::max(0.0, std::min(1.0, 1.0 - 4.0 * r));
    if (static_cast<double>(n) * a <= 1.0) return detail::psi_series(a, n);
    return detail::psi_quotient(a, n);
}

} // namespace votesig
