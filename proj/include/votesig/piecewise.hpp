#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace votesig {

// Piecewise-linear function on a strictly increasing node grid.
// The workhorse representation for latent densities (in q) and
// branch-asymmetry profiles (in u = sqrt(1-4r)).  Integrals of the
// interpolant, with or without polynomial weights, are exact.
struct PiecewiseLinear {
    std::vector<double> x; // strictly increasing
    std::vector<double> y;

    bool empty() const { return x.empty(); }
    std::size_t size() const { return x.size(); }

    // Interpolated value; clamps outside [x.front(), x.back()].
    double operator()(double t) const;

    double integral() const;                   // int pl dx
    double integral(double a, double b) const; // int_a^b pl dx
    double integral_times_x() const;           // int pl(x) * x dx
    double abs_integral() const;               // int |pl| dx, split at roots
    double abs_integral_times_x() const;       // int |pl(x)| * x dx

    // int pl(x) * phi(x) dx by per-segment Gauss-Legendre(5) panels of
    // width at most panel_cap.  Exact for phi polynomial of degree <= 8
    // on each panel; callers shrink panel_cap when phi has fine structure.
    double integrate_against(const std::function<double(double)>& phi,
                             double panel_cap) const;

    // Quantile of pl viewed as an (unnormalized) nonnegative density:
    // smallest t with int_{x0}^{t} pl = p * integral().  Requires pl >= 0.
    double quantile(double p) const;

    // Throws validation_error unless nodes are finite, strictly
    // increasing, and values finite.
    void check_grid(const char* what) const;
};

} // namespace votesig
