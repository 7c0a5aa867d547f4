#include "votesig/piecewise.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "votesig/errors.hpp"

namespace votesig {

namespace {

// Gauss-Legendre 5-point rule on [-1, 1]; exact for degree <= 9.
constexpr double kGlNode[5] = {
    -0.9061798459386640, -0.5384693101056831, 0.0,
    0.5384693101056831, 0.9061798459386640};
constexpr double kGlWeight[5] = {
    0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
    0.4786286704993665, 0.2369268850561891};

// Exact integral of the chord through (x0,y0)-(x1,y1) over [a,b] subset.
double chord_integral(double x0, double y0, double x1, double y1, double a, double b) {
    const double slope = (y1 - y0) / (x1 - x0);
    const double ya = y0 + slope * (a - x0);
    const double yb = y0 + slope * (b - x0);
    return 0.5 * (ya + yb) * (b - a);
}

// Exact integral of x * chord over [a,b].
double chord_integral_times_x(double x0, double y0, double x1, double y1, double a,
                              double b) {
    const double slope = (y1 - y0) / (x1 - x0);
    const double c0 = y0 - slope * x0; // chord = c0 + slope * x
    const double f2 = 0.5 * (b * b - a * a);
    const double f3 = (b * b * b - a * a * a) / 3.0;
    return c0 * f2 + slope * f3;
}

} // namespace

double PiecewiseLinear::operator()(double t) const {
    if (x.empty()) return 0.0;
    if (t <= x.front()) return y.front();
    if (t >= x.back()) return y.back();
    const auto it = std::upper_bound(x.begin(), x.end(), t);
    const std::size_t i = static_cast<std::size_t>(it - x.begin());
    const double w = (t - x[i - 1]) / (x[i] - x[i - 1]);
    return y[i - 1] + w * (y[i] - y[i - 1]);
}

double PiecewiseLinear::integral() const {
    double s = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i)
        s += 0.5 * (y[i - 1] + y[i]) * (x[i] - x[i - 1]);
    return s;
}

double PiecewiseLinear::integral(double a, double b) const {
    if (x.size() < 2 || b <= a) return 0.0;
    a = std::max(a, x.front());
    b = std::min(b, x.back());
    if (b <= a) return 0.0;
    double s = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) {
        const double lo = std::max(a, x[i - 1]);
        const double hi = std::min(b, x[i]);
        if (hi > lo) s += chord_integral(x[i - 1], y[i - 1], x[i], y[i], lo, hi);
    }
    return s;
}

double PiecewiseLinear::integral_times_x() const {
    double s = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i)
        s += chord_integral_times_x(x[i - 1], y[i - 1], x[i], y[i], x[i - 1], x[i]);
    return s;
}

double PiecewiseLinear::abs_integral() const {
    double s = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) {
        const double y0 = y[i - 1], y1 = y[i];
        const double h = x[i] - x[i - 1];
        if ((y0 >= 0.0 && y1 >= 0.0) || (y0 <= 0.0 && y1 <= 0.0)) {
            s += 0.5 * std::fabs(y0 + y1) * h; // no sign change
        } else {
            const double xr = x[i - 1] + h * y0 / (y0 - y1); // root of the chord
            s += 0.5 * std::fabs(y0) * (xr - x[i - 1]);
            s += 0.5 * std::fabs(y1) * (x[i] - xr);
        }
    }
    return s;
}

double PiecewiseLinear::abs_integral_times_x() const {
    double s = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) {
        const double y0 = y[i - 1], y1 = y[i];
        const double h = x[i] - x[i - 1];
        if ((y0 >= 0.0 && y1 >= 0.0) || (y0 <= 0.0 && y1 <= 0.0)) {
            s += std::fabs(chord_integral_times_x(x[i - 1], y0, x[i], y1, x[i - 1], x[i]));
        } else {
            const double xr = x[i - 1] + h * y0 / (y0 - y1);
            s += std::fabs(chord_integral_times_x(x[i - 1], y0, x[i], y1, x[i - 1], xr));
            s += std::fabs(chord_integral_times_x(x[i - 1], y0, x[i], y1, xr, x[i]));
        }
    }
    return s;
}

double PiecewiseLinear::integrate_against(const std::function<double(double)>& phi,
                                          double panel_cap) const {
    double s = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) {
        const double x0 = x[i - 1], x1 = x[i];
        const double len = x1 - x0;
        if (len <= 0.0) continue;
        const int panels = std::max(1, static_cast<int>(std::ceil(len / panel_cap)));
        const double w = len / panels;
        const double slope = (y[i] - y[i - 1]) / len;
        for (int p = 0; p < panels; ++p) {
            const double a = x0 + p * w;
            const double mid = a + 0.5 * w;
            const double half = 0.5 * w;
            double acc = 0.0;
            for (int g = 0; g < 5; ++g) {
                const double t = mid + half * kGlNode[g];
                const double pl = y[i - 1] + slope * (t - x0);
                acc += kGlWeight[g] * pl * phi(t);
            }
            s += acc * half;
        }
    }
    return s;
}

double PiecewiseLinear::quantile(double p) const {
    const double total = integral();
    if (!(total > 0.0)) throw validation_error("quantile of a zero-mass density");
    double target = p * total;
    if (target <= 0.0) return x.front();
    for (std::size_t i = 1; i < x.size(); ++i) {
        const double seg = 0.5 * (y[i - 1] + y[i]) * (x[i] - x[i - 1]);
        if (target > seg) {
            target -= seg;
            continue;
        }
        // Solve the piecewise-quadratic CDF on this segment.
        const double h = x[i] - x[i - 1];
        const double y0 = y[i - 1], y1 = y[i];
        const double b = (y1 - y0) / h;
        if (std::fabs(b) < 1e-300) {
            return x[i - 1] + (y0 > 0.0 ? target / y0 : 0.0);
        }
        // y0*t + b*t^2/2 = target, t in [0, h]; stable root.
        const double disc = std::max(0.0, y0 * y0 + 2.0 * b * target);
        const double sq = std::sqrt(disc);
        double t;
        if (b > 0.0) {
            t = 2.0 * target / (y0 + sq);
        } else {
            t = (y0 - sq) / (-b);
        }
        t = std::min(std::max(t, 0.0), h);
        return x[i - 1] + t;
    }
    return x.back();
}

void PiecewiseLinear::check_grid(const char* what) const {
    if (x.size() != y.size())
        throw validation_error(std::string(what) + ": node/value count mismatch");
    if (x.size() < 2) throw validation_error(std::string(what) + ": needs >= 2 nodes");
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i]) || !std::isfinite(y[i]))
            throw validation_error(std::string(what) + ": non-finite entry at index " +
                                   std::to_string(i));
        if (i > 0 && !(x[i] > x[i - 1]))
            throw validation_error(std::string(what) +
                                   ": nodes not strictly increasing at index " +
                                   std::to_string(i));
    }
}

} // namespace votesig
