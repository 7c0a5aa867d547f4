#include "votesig/signature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>

#include "votesig/errors.hpp"
#include "votesig/kernel.hpp"

namespace votesig {

namespace {

constexpr double kRMergeTol = 1e-14;   // q and 1-q map to identical r
constexpr double kWeightDropTol = 1e-15;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Panel cap for integrands carrying (1-u^2)^k structure: resolution scale
// is 1/sqrt(k) near u = 0.
double power_panel_cap(std::int64_t k) {
    return std::min(1.0 / 16.0, 0.25 / std::sqrt(static_cast<double>(k) + 1.0));
}

// (1-u^2)^k without overflow for any k; u in [0,1].
double one_minus_u2_pow(double u, std::int64_t k) {
    if (k == 0) return 1.0;
    if (u >= 1.0) return 0.0;
    return std::exp(static_cast<double>(k) * std::log1p(-u * u));
}

PiecewiseLinear scale_values(PiecewiseLinear pl, double factor) {
    for (double& v : pl.y) v *= factor;
    return pl;
}

} // namespace

double SignedSignature::total_variation() const {
    double tv = 0.0;
    for (const SignatureAtom& a : atoms) tv += std::fabs(a.weight);
    // int |g(r)| dr = (1/2) int |G(u)| u du.
    if (has_density()) tv += 0.5 * g_u.abs_integral_times_x();
    return tv;
}

SignedSignature make_signature(std::vector<SignatureAtom> atoms, PiecewiseLinear g_u) {
    for (const SignatureAtom& a : atoms) {
        if (!std::isfinite(a.weight))
            throw validation_error("signature atom weight is not finite");
        if (!(a.r >= -1e-15 && a.r <= 0.25 + 1e-15))
            throw validation_error("signature atom radius out of [0, 1/4]: " + fmt(a.r));
    }
    std::sort(atoms.begin(), atoms.end(),
              [](const SignatureAtom& a, const SignatureAtom& b) { return a.r < b.r; });
    // Merge coincident radii; drop what is left only when it is negligible
    // against the mass that met there (cancellation residue of q / 1-q
    // pairs).  An intentionally tiny atom never merges, so it survives.
    std::vector<SignatureAtom> merged;
    std::vector<double> merged_abs;
    for (const SignatureAtom& a : atoms) {
        if (!merged.empty() && a.r - merged.back().r <= kRMergeTol) {
            merged.back().weight += a.weight;
            merged_abs.back() += std::fabs(a.weight);
        } else {
            merged.push_back(a);
            merged_abs.push_back(std::fabs(a.weight));
        }
    }
    std::vector<SignatureAtom> kept;
    for (std::size_t i = 0; i < merged.size(); ++i) {
        if (merged[i].weight == 0.0) continue;
        if (std::fabs(merged[i].weight) <= kWeightDropTol * merged_abs[i]) continue;
        kept.push_back(merged[i]);
    }
    merged = std::move(kept);
    for (SignatureAtom& a : merged) a.r = std::min(std::max(a.r, 0.0), 0.25);
    if (!g_u.empty()) {
        g_u.check_grid("signature density");
        if (g_u.x.front() < -1e-12 || g_u.x.back() > 1.0 + 1e-12)
            throw validation_error("signature density u-grid must lie in [0,1]");
    }
    SignedSignature sig{std::move(merged), std::move(g_u)};
    const double tv = sig.total_variation();
    if (tv > 1.0 + 1e-10)
        throw validation_error("signature total variation " + fmt(tv) + " exceeds 1");
    return sig;
}

SignedSignature pushforward(const LatentLaw& law) {
    struct Visitor {
        SignedSignature operator()(const DiscreteLaw& l) const {
            std::vector<SignatureAtom> atoms;
            atoms.reserve(l.atoms.size());
            for (const LawAtom& a : l.atoms)
                atoms.push_back({a.q * (1.0 - a.q), a.weight * (2.0 * a.q - 1.0)});
            return make_signature(std::move(atoms));
        }
        SignedSignature operator()(const GridDensity& d) const {
            return make_signature({}, branch_asymmetry_u(d));
        }
        SignedSignature operator()(const HybridLaw& h) const {
            SignedSignature disc = (*this)(h.discrete);
            for (SignatureAtom& a : disc.atoms) a.weight *= h.discrete_weight;
            PiecewiseLinear g =
                scale_values(branch_asymmetry_u(h.density), 1.0 - h.discrete_weight);
            return make_signature(std::move(disc.atoms), std::move(g));
        }
    };
    return std::visit(Visitor{}, law);
}

namespace {

VotingCurve curve_discrete(const DiscreteLaw& l, std::int64_t n_max) {
    VotingCurve out;
    out.values.assign(static_cast<std::size_t>(n_max) + 1, 0.0);
    for (const LawAtom& a : l.atoms) {
        for (std::int64_t n = 0; n <= n_max; ++n)
            out.values[static_cast<std::size_t>(n)] +=
                a.weight * majority_accuracy(a.q, n);
    }
    return out;
}

// Increment route for a density part given as G(u):
// V_{n+1} - V_n = [C(2n+1,n+1) 4^-(n+1)] int (1-u^2)^{n+1} G(u) (u/2) du.
VotingCurve curve_density(const GridDensity& d, std::int64_t n_max) {
    const PiecewiseLinear g = branch_asymmetry_u(d);
    VotingCurve out;
    out.values.reserve(static_cast<std::size_t>(n_max) + 1);
    double v = mean(LatentLaw{d});
    out.values.push_back(v);
    for (std::int64_t n = 0; n < n_max; ++n) {
        const std::int64_t k = n + 1;
        const double integral = g.integrate_against(
            [k](double u) { return one_minus_u2_pow(u, k) * 0.5 * u; },
            power_panel_cap(k));
        v += scaled_increment_coeff(n) * integral;
        out.values.push_back(v);
    }
    return out;
}

} // namespace

VotingCurve curve(const LatentLaw& law, std::int64_t n_max) {
    if (n_max < 0 || n_max > 1000000)
        throw validation_error("n_max must lie in [0, 1e6], got " +
                               std::to_string(n_max));
    validate(law);
    struct Visitor {
        std::int64_t n_max;
        VotingCurve operator()(const DiscreteLaw& l) const {
            return curve_discrete(l, n_max);
        }
        VotingCurve operator()(const GridDensity& d) const {
            return curve_density(d, n_max);
        }
        VotingCurve operator()(const HybridLaw& h) const {
            VotingCurve disc = curve_discrete(h.discrete, n_max);
            VotingCurve dens = curve_density(h.density, n_max);
            VotingCurve out;
            out.values.resize(disc.values.size());
            for (std::size_t i = 0; i < out.values.size(); ++i)
                out.values[i] = h.discrete_weight * disc.values[i] +
                                (1.0 - h.discrete_weight) * dens.values[i];
            return out;
        }
    };
    VotingCurve out = std::visit(Visitor{n_max}, law);
    out.endpoint = endpoint(law);
    return out;
}

VotingCurve curve_by_quadrature(const LatentLaw& law, std::int64_t n_max) {
    if (n_max < 0 || n_max > 1000000)
        throw validation_error("n_max must lie in [0, 1e6], got " +
                               std::to_string(n_max));
    validate(law);
    struct Visitor {
        std::int64_t n_max;
        VotingCurve operator()(const DiscreteLaw& l) const {
            return curve_discrete(l, n_max);
        }
        VotingCurve operator()(const GridDensity& d) const {
            const PiecewiseLinear f = d.pl();
            VotingCurve out;
            out.values.reserve(static_cast<std::size_t>(n_max) + 1);
            for (std::int64_t n = 0; n <= n_max; ++n) {
                out.values.push_back(f.integrate_against(
                    [n](double q) { return majority_accuracy(q, n); },
                    power_panel_cap(n)));
            }
            return out;
        }
        VotingCurve operator()(const HybridLaw& h) const {
            VotingCurve disc = curve_discrete(h.discrete, n_max);
            VotingCurve dens = (*this)(h.density);
            VotingCurve out;
            out.values.resize(disc.values.size());
            for (std::size_t i = 0; i < out.values.size(); ++i)
                out.values[i] = h.discrete_weight * disc.values[i] +
                                (1.0 - h.discrete_weight) * dens.values[i];
            return out;
        }
    };
    VotingCurve out = std::visit(Visitor{n_max}, law);
    out.endpoint = endpoint(law);
    return out;
}

double curve_value(const LatentLaw& law, std::int64_t n) {
    if (n < 0 || n > 1000000)
        throw validation_error("budget index must lie in [0, 1e6], got " +
                               std::to_string(n));
    struct Visitor {
        std::int64_t n;
        double operator()(const DiscreteLaw& l) const {
            double v = 0.0;
            for (const LawAtom& a : l.atoms) v += a.weight * majority_accuracy(a.q, n);
            return v;
        }
        double operator()(const GridDensity& d) const {
            const std::int64_t n_local = n;
            return d.pl().integrate_against(
                [n_local](double q) { return majority_accuracy(q, n_local); },
                power_panel_cap(n_local));
        }
        double operator()(const HybridLaw& h) const {
            return h.discrete_weight * (*this)(h.discrete) +
                   (1.0 - h.discrete_weight) * (*this)(h.density);
        }
    };
    return std::visit(Visitor{n}, law);
}

VotingCurve curve_by_level_formula(const LatentLaw& law, std::int64_t n_max) {
    if (n_max < 0 || n_max > 1000000)
        throw validation_error("n_max must lie in [0, 1e6], got " +
                               std::to_string(n_max));
    validate(law);
    const SignedSignature sig = pushforward(law);
    VotingCurve out;
    out.values.reserve(static_cast<std::size_t>(n_max) + 1);
    for (std::int64_t n = 0; n <= n_max; ++n) {
        double level = 0.0;
        for (const SignatureAtom& a : sig.atoms) level += a.weight * psi_kernel(a.r, n);
        if (sig.has_density()) {
            // psi_n(r(u)) (u/2) du = (2 P_n((1+u)/2) - 1) / 2 du: the
            // substituted integrand is bounded, the 1/sqrt(1-4r) kernel
            // cancels against the Jacobian.
            level += sig.g_u.integrate_against(
                [n](double u) {
                    return 0.5 * (2.0 * majority_accuracy(0.5 + 0.5 * u, n) - 1.0);
                },
                power_panel_cap(n));
        }
        out.values.push_back(0.5 + 0.5 * level);
    }
    out.endpoint = endpoint(law);
    return out;
}

std::vector<double> recover_moments(const VotingCurve& c) {
    if (c.values.empty()) throw validation_error("curve has no values");
    std::vector<double> s;
    s.reserve(c.values.size());
    s.push_back(2.0 * c.values[0] - 1.0);
    for (std::size_t k = 1; k < c.values.size(); ++k) {
        const double dv = c.values[k] - c.values[k - 1];
        if (dv == 0.0) {
            s.push_back(0.0);
            continue;
        }
        const double logc = log_binomial(2 * static_cast<std::int64_t>(k) - 1,
                                         static_cast<std::int64_t>(k));
        s.push_back(std::copysign(std::exp(std::log(std::fabs(dv)) - logc), dv));
    }
    return s;
}

double moment(const SignedSignature& sig, std::int64_t k) {
    if (k < 0) throw validation_error("moment order must be >= 0");
    double m = 0.0;
    for (const SignatureAtom& a : sig.atoms)
        m += a.weight * (k == 0 ? 1.0 : std::pow(a.r, static_cast<double>(k)));
    if (sig.has_density()) {
        const double scale = std::pow(0.25, static_cast<double>(k));
        m += scale * sig.g_u.integrate_against(
                         [k](double u) { return one_minus_u2_pow(u, k) * 0.5 * u; },
                         power_panel_cap(k));
    }
    return m;
}

double scaled_moment(const SignedSignature& sig, std::int64_t k) {
    if (k < 0) throw validation_error("moment order must be >= 0");
    double m = 0.0;
    for (const SignatureAtom& a : sig.atoms) {
        if (k == 0)
            m += a.weight;
        else if (a.r > 0.0)
            m += a.weight * std::exp(static_cast<double>(k) * std::log(4.0 * a.r));
    }
    if (sig.has_density())
        m += sig.g_u.integrate_against(
            [k](double u) { return one_minus_u2_pow(u, k) * 0.5 * u; },
            power_panel_cap(k));
    return m;
}

double endpoint(const LatentLaw& law) {
    struct Visitor {
        double operator()(const DiscreteLaw& l) const {
            double e = 0.0;
            for (const LawAtom& a : l.atoms) {
                if (std::fabs(a.q - 0.5) <= 1e-12)
                    e += 0.5 * a.weight;
                else if (a.q > 0.5)
                    e += a.weight;
            }
            return e;
        }
        double operator()(const GridDensity& d) const {
            return d.pl().integral(0.5, 1.0);
        }
        double operator()(const HybridLaw& h) const {
            return h.discrete_weight * (*this)(h.discrete) +
                   (1.0 - h.discrete_weight) * (*this)(h.density);
        }
    };
    return std::visit(Visitor{}, law);
}

double endpoint(const SignedSignature& sig) {
    double integral = 0.0;
    for (const SignatureAtom& a : sig.atoms) {
        const double u = std::sqrt(std::max(0.0, 1.0 - 4.0 * a.r));
        if (u == 0.0)
            throw infeasibility_error(
                "endpoint integral diverges: signature atom at r = 1/4 with weight " +
                fmt(a.weight));
        integral += a.weight / u;
    }
    // int g(r)/sqrt(1-4r) dr = (1/2) int G(u) du.
    if (sig.has_density()) integral += 0.5 * sig.g_u.integral();
    return 0.5 + 0.5 * integral;
}

RealizabilityReport check_realizable(const SignedSignature& sig) {
    RealizabilityReport rep{true, 0.0, 0.0, false};
    for (const SignatureAtom& a : sig.atoms) {
        const double u = std::sqrt(std::max(0.0, 1.0 - 4.0 * a.r));
        if (u == 0.0) {
            rep.atom_at_quarter = true;
            continue;
        }
        rep.integral += std::fabs(a.weight) / u;
    }
    if (sig.has_density()) rep.integral += 0.5 * sig.g_u.abs_integral();
    if (rep.atom_at_quarter) {
        rep.feasible = false;
        rep.integral = std::numeric_limits<double>::infinity();
        rep.slack = -std::numeric_limits<double>::infinity();
        return rep;
    }
    rep.slack = 1.0 - rep.integral;
    rep.feasible = rep.integral <= 1.0 + 1e-10;
    return rep;
}

LatentLaw realize(const SignedSignature& sig) {
    const RealizabilityReport rep = check_realizable(sig);
    if (!rep.feasible) {
        if (rep.atom_at_quarter)
            throw infeasibility_error("signature not realizable: atom at r = 1/4");
        throw infeasibility_error("signature not realizable: integral " +
                                  fmt(rep.integral) + " exceeds 1");
    }

    std::vector<LawAtom> atoms;
    for (const SignatureAtom& a : sig.atoms) {
        const double u = std::sqrt(std::max(0.0, 1.0 - 4.0 * a.r));
        const double q = a.weight > 0.0 ? 0.5 + 0.5 * u : 0.5 - 0.5 * u;
        atoms.push_back({q, std::fabs(a.weight) / u});
    }
    const double slack = std::max(0.0, rep.slack);
    if (slack > kWeightDropTol) atoms.push_back({0.5, slack});

    if (!sig.has_density()) {
        if (atoms.empty())
            throw infeasibility_error("signature realizes to an empty law");
        return make_discrete(std::move(atoms));
    }

    // Saturated branch values from the density part: f(q_+) = g^+, f(q_-) = g^-.
    std::set<double> us(sig.g_u.x.begin(), sig.g_u.x.end());
    us.insert(0.0);
    us.insert(1.0);
    for (std::size_t i = 1; i < sig.g_u.x.size(); ++i) {
        const double y0 = sig.g_u.y[i - 1], y1 = sig.g_u.y[i];
        if ((y0 > 0.0 && y1 < 0.0) || (y0 < 0.0 && y1 > 0.0))
            us.insert(sig.g_u.x[i - 1] +
                      (sig.g_u.x[i] - sig.g_u.x[i - 1]) * y0 / (y0 - y1));
    }
    std::vector<double> nodes;
    std::vector<double> values;
    for (auto it = us.rbegin(); it != us.rend(); ++it) { // lower branch, q ascending
        const double g = sig.g_u(*it);
        nodes.push_back(0.5 - 0.5 * *it);
        values.push_back(std::max(0.0, -g));
    }
    for (auto it = ++us.begin(); it != us.end(); ++it) { // upper branch, skip u = 0
        const double g = sig.g_u(*it);
        nodes.push_back(0.5 + 0.5 * *it);
        values.push_back(std::max(0.0, g));
    }
    GridDensity density{std::move(nodes), std::move(values)};
    const double density_mass = density.pl().integral();
    if (density_mass <= kWeightDropTol) {
        if (atoms.empty())
            throw infeasibility_error("signature realizes to an empty law");
        return make_discrete(std::move(atoms));
    }
    for (double& v : density.values) v /= density_mass;
    if (atoms.empty()) return LatentLaw{std::move(density)};
    double atom_mass = 0.0;
    for (const LawAtom& a : atoms) atom_mass += a.weight;
    for (LawAtom& a : atoms) a.weight /= atom_mass;
    // atom_mass + density_mass = 1 up to rounding by construction.
    HybridLaw hybrid{make_discrete(std::move(atoms)), std::move(density),
                     atom_mass / (atom_mass + density_mass)};
    validate(hybrid);
    return LatentLaw{std::move(hybrid)};
}

GridDensity realize_density(const std::vector<double>& r_nodes,
                            const std::vector<double>& g_values,
                            const std::vector<double>& h_values) {
    if (r_nodes.size() != g_values.size() || r_nodes.size() != h_values.size())
        throw validation_error("realize_density: node/value count mismatch");
    if (r_nodes.size() < 2) throw validation_error("realize_density: needs >= 2 nodes");
    if (!(r_nodes.front() <= 1e-12) || !(r_nodes.back() >= 0.25 - 1e-12))
        throw validation_error("realize_density: r grid must span [0, 1/4]");
    for (double h : h_values)
        if (!(h >= -1e-12))
            throw validation_error("realize_density: slack h must be nonnegative, got " +
                                   fmt(h));

    // Convert to ascending u; the input r grid is ascending in r.
    const std::size_t n = r_nodes.size();
    PiecewiseLinear g, h;
    g.x.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = n - 1 - i;
        const double u = std::sqrt(std::max(0.0, 1.0 - 4.0 * r_nodes[j]));
        g.x.push_back(u);
        g.y.push_back(g_values[j]);
        h.x.push_back(u);
        h.y.push_back(std::max(0.0, h_values[j]));
    }
    g.check_grid("realize_density g");

    const double g_integral = 0.5 * g.abs_integral();
    if (g_integral > 1.0 + 1e-8)
        throw infeasibility_error("branch asymmetry not realizable: integral " +
                                  fmt(g_integral) + " exceeds 1");
    const double h_integral = 0.5 * h.integral();
    if (std::fabs(h_integral - (1.0 - g_integral)) > 1e-8)
        throw infeasibility_error("slack integral " + fmt(h_integral) +
                                  " does not match 1 - " + fmt(g_integral));

    std::set<double> us(g.x.begin(), g.x.end());
    us.insert(0.0);
    us.insert(1.0);
    for (std::size_t i = 1; i < g.x.size(); ++i) {
        const double y0 = g.y[i - 1], y1 = g.y[i];
        if ((y0 > 0.0 && y1 < 0.0) || (y0 < 0.0 && y1 > 0.0))
            us.insert(g.x[i - 1] + (g.x[i] - g.x[i - 1]) * y0 / (y0 - y1));
    }

    std::vector<double> nodes;
    std::vector<double> values;
    for (auto it = us.rbegin(); it != us.rend(); ++it) {
        const double u = *it;
        const double gg = g(u), hh = h(u);
        nodes.push_back(0.5 - 0.5 * u);
        values.push_back(u == 0.0 ? 0.5 * (std::fabs(gg) + hh)
                                  : 0.5 * (std::fabs(gg) + hh - gg));
    }
    for (auto it = ++us.begin(); it != us.end(); ++it) {
        const double u = *it;
        const double gg = g(u), hh = h(u);
        nodes.push_back(0.5 + 0.5 * u);
        values.push_back(0.5 * (std::fabs(gg) + hh + gg));
    }
    nodes.front() = 0.0;
    nodes.back() = 1.0;
    GridDensity out{std::move(nodes), std::move(values)};
    const double total = out.pl().integral();
    if (!(total > 0.0))
        throw infeasibility_error("realized density has zero mass");
    for (double& v : out.values) v /= total;
    validate(out);
    return out;
}

} // namespace votesig
