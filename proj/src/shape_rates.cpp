#include "votesig/shape_rates.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <string>

#include "votesig/errors.hpp"
#include "votesig/kernel.hpp"

namespace votesig {

namespace {

constexpr double kSqrtPi = 1.7724538509055160;
constexpr double kGapFloor = 1e-12;
constexpr double kSeriesCutoffNats = 80.0;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

RateProbeResult fit_gap_decay(const LatentLaw& law,
                              const std::vector<std::int64_t>& n_list) {
    std::vector<std::int64_t> ns = n_list;
    std::sort(ns.begin(), ns.end());
    ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
    if (ns.size() < 3)
        throw validation_error("rate probe needs at least 3 budgets");
    if (ns.front() < 0) throw validation_error("rate probe budgets must be >= 0");
    const double m_lo = static_cast<double>(2 * ns.front() + 1);
    const double m_hi = static_cast<double>(2 * ns.back() + 1);
    if (std::log10(m_hi / m_lo) < 2.0)
        throw validation_error("rate probe budget list must span >= 2 decades of votes");

    const double v_inf = endpoint(law);
    std::vector<RateProbePoint> pts;
    pts.reserve(ns.size());
    for (std::int64_t n : ns)
        pts.push_back({n, 2 * n + 1, std::fabs(v_inf - curve_value(law, n))});

    // Largest contiguous block with gap above the quadrature noise floor.
    std::size_t best_lo = 0, best_len = 0;
    std::size_t i = 0;
    while (i < pts.size()) {
        if (pts[i].gap <= kGapFloor) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < pts.size() && pts[j].gap > kGapFloor) ++j;
        if (j - i > best_len) {
            best_len = j - i;
            best_lo = i;
        }
        i = j;
    }
    if (best_len < 3)
        throw precision_error("rate probe fit degenerate: only " +
                              std::to_string(best_len) + " budgets with gap > 1e-12");

    RateProbeResult out;
    out.points.assign(pts.begin() + best_lo, pts.begin() + best_lo + best_len);
    out.smallest_votes = out.points.front().votes;
    out.polynomial_decay = best_lo + best_len == pts.size();

    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (const RateProbePoint& p : out.points) {
        const double x = std::log(static_cast<double>(p.votes));
        const double y = std::log(p.gap);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double k = static_cast<double>(out.points.size());
    out.slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
    return out;
}

} // namespace

VariationBound variation_bound(double sig_tv, std::int64_t n, std::int64_t m) {
    if (!(sig_tv >= 0.0 && sig_tv <= 1.0 + 1e-10))
        throw validation_error("signature total variation must lie in [0,1], got " +
                               fmt(sig_tv));
    if (!(m > n && n >= 0))
        throw validation_error("variation bound needs m > n >= 0");
    if (m > 10000000)
        throw validation_error("variation bound sum capped at m <= 1e7");
    double sum = 0.0;
    for (std::int64_t k = n; k < m; ++k) sum += scaled_increment_coeff(k);
    const double sqrt_form = sig_tv *
                             (std::sqrt(static_cast<double>(m)) -
                              std::sqrt(static_cast<double>(n))) /
                             kSqrtPi;
    return VariationBound{std::min(1.0, sig_tv * sum), std::min(1.0, sqrt_form)};
}

double near_zero_bound(double sig_tv, double a, std::int64_t n) {
    if (!(a > 0.0 && a < 0.25))
        throw validation_error("near-zero bound needs a in (0, 1/4), got " + fmt(a));
    if (!(sig_tv >= 0.0)) throw validation_error("negative total variation");
    if (n < 0) throw validation_error("budget index must be >= 0");
    return 2.0 * a / (1.0 - 4.0 * a) * sig_tv *
           std::pow(4.0 * a, static_cast<double>(n));
}

double bridge_bound(const MarginCondition& cond, std::int64_t n) {
    if (!(cond.C > 0.0 && cond.kappa > 0.0 && cond.t0 > 0.0 && cond.t0 <= 0.5))
        throw validation_error("margin condition needs C > 0, kappa > 0, t0 in (0,1/2]");
    if (n < 0) throw validation_error("budget index must be >= 0");
    const double m = 2.0 * static_cast<double>(n) + 1.0;
    return std::exp(-2.0 * m * cond.t0 * cond.t0) +
           cond.C * std::tgamma(1.0 + 0.5 * cond.kappa) *
               std::pow(2.0 * m, -0.5 * cond.kappa);
}

double gap_bridge_bound(double delta, std::int64_t n) {
    if (!(delta > 0.0 && delta <= 0.5))
        throw validation_error("gap bridge needs delta in (0, 1/2], got " + fmt(delta));
    if (n < 0) throw validation_error("budget index must be >= 0");
    const double m = 2.0 * static_cast<double>(n) + 1.0;
    return std::exp(-2.0 * m * delta * delta);
}

double density_bridge_bound(double bound_B, std::int64_t n) {
    if (!(bound_B > 0.0))
        throw validation_error("density bridge needs B > 0, got " + fmt(bound_B));
    if (n < 0) throw validation_error("budget index must be >= 0");
    const double m = 2.0 * static_cast<double>(n) + 1.0;
    return std::exp(-0.5 * m) + bound_B * std::sqrt(M_PI / (2.0 * m));
}

RateProbeResult rate_sharpness_probe(const MarginCondition& cond,
                                     const std::vector<std::int64_t>& n_list) {
    const LatentLaw law =
        make_named(MarginWorstCaseSpec{cond.C, cond.kappa, cond.t0});
    return fit_gap_decay(law, n_list);
}

RateProbeResult rate_probe_law(const LatentLaw& law,
                               const std::vector<std::int64_t>& n_list) {
    return fit_gap_decay(law, n_list);
}

const char* shape_class_name(ShapeClass c) {
    switch (c) {
        case ShapeClass::monotone_up: return "monotone_up";
        case ShapeClass::monotone_down: return "monotone_down";
        case ShapeClass::mixed: return "mixed";
    }
    return "mixed";
}

ShapeClass classify_shape(const SignedSignature& sig) {
    constexpr double tol = 1e-12;
    bool up = true, down = true;
    for (const SignatureAtom& a : sig.atoms) {
        if (a.weight < -tol) up = false;
        if (a.weight > tol) down = false;
    }
    if (sig.has_density()) {
        for (double v : sig.g_u.y) {
            if (v < -tol) up = false;
            if (v > tol) down = false;
        }
    }
    if (up) return ShapeClass::monotone_up;
    if (down) return ShapeClass::monotone_down;
    return ShapeClass::mixed;
}

std::vector<OscillationSign> oscillation_signs(int j_max) {
    if (j_max < 2 || j_max > 14)
        throw validation_error("oscillation_signs needs j_max in [2, 14], got " +
                               std::to_string(j_max));

    // Pushforward atoms of the truncated oscillation law: the moment-formula
    // cross-check route.  A generous truncation keeps the series route and
    // the law route comparable at every requested j.
    const int law_j_max = std::min(14, j_max + 2);
    const SignedSignature sig =
        pushforward(make_named(OscillationSpec{law_j_max}));

    std::vector<OscillationSign> out;
    for (int j = 2; j <= j_max; ++j) {
        const std::int64_t k = 3ll * j * (1ll << j);

        // Series route: phi_l = l^2 + k 2^-l; terms more than 80 nats above
        // the minimum are negligible at double precision.
        std::vector<double> phi;
        double phi_min = DBL_MAX;
        int dominant = -1;
        for (int l = 1;; ++l) {
            const double p = static_cast<double>(l) * l +
                             static_cast<double>(k) * std::ldexp(1.0, -l);
            phi.push_back(p);
            if (p < phi_min) {
                phi_min = p;
                dominant = l;
            }
            if (l > j && p - phi_min > kSeriesCutoffNats) break;
        }
        double competing = 0.0;
        double signed_sum = 0.0;
        for (std::size_t idx = 0; idx < phi.size(); ++idx) {
            const int l = static_cast<int>(idx) + 1;
            const double rel = std::exp(-(phi[idx] - phi_min));
            signed_sum += (l % 2 == 0 ? rel : -rel);
            if (l != dominant) competing += rel;
        }
        const double margin = 1.0 - competing;
        if (margin < 1e3 * DBL_EPSILON)
            throw precision_error("oscillation sign at j=" + std::to_string(j) +
                                  " cannot be certified: dominance margin " +
                                  fmt(margin));
        const int sign = signed_sum > 0.0 ? 1 : -1;

        // Moment-formula route through the realized law's signature atoms:
        // sign of sum_i w_i (4 r_i)^k, evaluated relative to its largest term.
        double best_log = -DBL_MAX;
        for (const SignatureAtom& a : sig.atoms) {
            const double lg = std::log(std::fabs(a.weight)) +
                              static_cast<double>(k) * std::log(4.0 * a.r);
            best_log = std::max(best_log, lg);
        }
        double moment_sum = 0.0;
        for (const SignatureAtom& a : sig.atoms) {
            const double lg = std::log(std::fabs(a.weight)) +
                              static_cast<double>(k) * std::log(4.0 * a.r);
            moment_sum += std::copysign(std::exp(lg - best_log), a.weight);
        }
        const int moment_sign = moment_sum > 0.0 ? 1 : -1;
        if (moment_sign != sign)
            throw precision_error("oscillation sign mismatch at j=" +
                                  std::to_string(j) +
                                  ": series and moment routes disagree");

        out.push_back({j, k, sign, margin});
    }
    return out;
}

} // namespace votesig
