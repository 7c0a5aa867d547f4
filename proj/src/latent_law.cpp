#include "votesig/latent_law.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "votesig/errors.hpp"
#include "votesig/kernel.hpp"

namespace votesig {

namespace {

constexpr double kAtomMergeTol = 1e-15;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

Figure1Curve figure1_curve_from_name(const std::string& name) {
    if (name == "constant") return Figure1Curve::constant;
    if (name == "fast drop") return Figure1Curve::fast_drop;
    if (name == "dip then surpass") return Figure1Curve::dip_then_surpass;
    if (name == "rise then fall") return Figure1Curve::rise_then_fall;
    if (name == "slow rise") return Figure1Curve::slow_rise;
    throw validation_error("unknown figure1 curve name: \"" + name +
                           "\" (expected constant|fast drop|dip then surpass|"
                           "rise then fall|slow rise)");
}

std::string figure1_curve_name(Figure1Curve curve) {
    switch (curve) {
        case Figure1Curve::constant: return "constant";
        case Figure1Curve::fast_drop: return "fast drop";
        case Figure1Curve::dip_then_surpass: return "dip then surpass";
        case Figure1Curve::rise_then_fall: return "rise then fall";
        case Figure1Curve::slow_rise: return "slow rise";
    }
    throw validation_error("invalid figure1 curve enum");
}

std::vector<Figure1Curve> all_figure1_curves() {
    return {Figure1Curve::constant, Figure1Curve::fast_drop,
            Figure1Curve::dip_then_surpass, Figure1Curve::rise_then_fall,
            Figure1Curve::slow_rise};
}

DiscreteLaw make_discrete(std::vector<LawAtom> atoms) {
    std::sort(atoms.begin(), atoms.end(),
              [](const LawAtom& a, const LawAtom& b) { return a.q < b.q; });
    std::vector<LawAtom> merged;
    for (const LawAtom& a : atoms) {
        if (!merged.empty() && std::fabs(a.q - merged.back().q) <= kAtomMergeTol)
            merged.back().weight += a.weight;
        else
            merged.push_back(a);
    }
    DiscreteLaw law{std::move(merged)};
    validate(law);
    return law;
}

void validate(const DiscreteLaw& law) {
    if (law.atoms.empty()) throw validation_error("discrete law has no atoms");
    double sum = 0.0;
    double prev_q = -1.0;
    for (const LawAtom& a : law.atoms) {
        if (!(a.q >= 0.0 && a.q <= 1.0))
            throw validation_error("atom q out of [0,1]: " + fmt(a.q));
        if (!(a.weight > 0.0))
            throw validation_error("atom weight must be positive, got " + fmt(a.weight) +
                                   " at q=" + fmt(a.q));
        if (prev_q >= 0.0 && a.q - prev_q <= kAtomMergeTol)
            throw validation_error("duplicate atom at q=" + fmt(a.q));
        prev_q = a.q;
        sum += a.weight;
    }
    if (std::fabs(sum - 1.0) > 1e-12)
        throw validation_error("weights sum to " + fmt(sum) + ", expected 1");
}

void validate(const GridDensity& density) {
    const PiecewiseLinear pl = density.pl();
    pl.check_grid("grid density");
    if (density.nodes.front() != 0.0 || density.nodes.back() != 1.0)
        throw validation_error("density nodes must span [0,1] exactly, got [" +
                               fmt(density.nodes.front()) + ", " +
                               fmt(density.nodes.back()) + "]");
    for (std::size_t i = 0; i < density.values.size(); ++i) {
        if (density.values[i] < 0.0)
            throw validation_error("negative density " + fmt(density.values[i]) +
                                   " at q=" + fmt(density.nodes[i]));
    }
    const double total = pl.integral();
    if (std::fabs(total - 1.0) > 1e-10)
        throw validation_error("density integrates to " + fmt(total) + ", expected 1");
}

void validate(const HybridLaw& law) {
    if (!(law.discrete_weight >= 0.0 && law.discrete_weight <= 1.0))
        throw validation_error("hybrid discrete_weight out of [0,1]: " +
                               fmt(law.discrete_weight));
    validate(law.discrete);
    validate(law.density);
}

void validate(const LatentLaw& law) {
    std::visit([](const auto& l) { validate(l); }, law);
}

namespace {

DiscreteLaw figure1_law(Figure1Curve curve) {
    // Appendix-level gallery mixtures; every curve starts from V_0 = 3/4.
    switch (curve) {
        case Figure1Curve::constant:
            return make_discrete({{0.0, 0.25}, {1.0, 0.75}});
        case Figure1Curve::fast_drop:
            return make_discrete({{0.3488, 0.3839066}, {1.0, 0.6160934}});
        case Figure1Curve::dip_then_surpass:
            return make_discrete(
                {{0.1690, 0.2072827}, {0.6043333, 0.1964989}, {1.0, 0.5962184}});
        case Figure1Curve::rise_then_fall:
            return make_discrete({{0.38, 0.315067}, {0.92, 0.683229}, {1.0, 0.001704}});
        case Figure1Curve::slow_rise:
            return make_discrete({{0.5095, 0.509684}, {1.0, 0.490316}});
    }
    throw validation_error("invalid figure1 curve enum");
}

DiscreteLaw oscillation_law(int j_max) {
    if (j_max < 1 || j_max > 14)
        throw validation_error("oscillation j_max must lie in [1,14], got " +
                               std::to_string(j_max));
    // Atoms b_j on alternating branches of r_j = exp(-2^-j)/4 with weights
    // proportional to exp(-j^2)/sqrt(1-4 r_j), renormalized after truncation.
    std::vector<LawAtom> atoms;
    double total = 0.0;
    for (int j = 1; j <= j_max; ++j) {
        const double tp = std::ldexp(1.0, -j); // 2^-j
        const double one_minus_4r = -std::expm1(-tp);
        const double u = std::sqrt(one_minus_4r);
        const double w = std::exp(-static_cast<double>(j) * j) / u;
        const double b = (j % 2 == 0) ? 0.5 + 0.5 * u : 0.5 - 0.5 * u;
        atoms.push_back({b, w});
        total += w;
    }
    for (LawAtom& a : atoms) a.weight /= total;
    return make_discrete(std::move(atoms));
}

LatentLaw margin_worst_case_law(const MarginWorstCaseSpec& spec) {
    if (!(spec.C > 0.0))
        throw validation_error("margin law needs C > 0, got " + fmt(spec.C));
    if (!(spec.kappa > 0.0))
        throw validation_error("margin law needs kappa > 0, got " + fmt(spec.kappa));
    if (!(spec.t0 > 0.0 && spec.t0 <= 0.5))
        throw validation_error("margin law needs t0 in (0, 1/2], got " + fmt(spec.t0));

    const double a = std::min(0.5, 0.5 * spec.C * std::pow(spec.t0, spec.kappa));

    // Density of 1/2 + X with P(X <= t) = (t/t0)^kappa, sampled on a grid
    // that is uniform in y = (t/t0)^(kappa/2).  For kappa in {1,2} the pdf
    // is exactly piecewise linear on this grid.
    const std::size_t k_nodes = 2048;
    std::vector<double> nodes;
    std::vector<double> values;
    nodes.reserve(k_nodes + 8);
    values.reserve(k_nodes + 8);

    const auto pdf = [&](double t) {
        return spec.kappa * std::pow(t / spec.t0, spec.kappa - 1.0) / spec.t0;
    };

    nodes.push_back(0.0);
    values.push_back(0.0);
    const double ramp = 1e-9;
    nodes.push_back(0.5 - ramp);
    values.push_back(0.0);
    nodes.push_back(0.5);
    // One-sided limit of the pdf at the threshold; for kappa < 1 the pdf is
    // unbounded there, so fall back to the first positive grid value.
    if (spec.kappa > 1.0)
        values.push_back(0.0);
    else if (spec.kappa == 1.0)
        values.push_back(1.0 / spec.t0);
    else
        values.push_back(pdf(spec.t0 * std::pow(1.0 / k_nodes, 2.0 / spec.kappa)));
    for (std::size_t k = 1; k <= k_nodes; ++k) {
        const double y = static_cast<double>(k) / k_nodes;
        const double t = spec.t0 * std::pow(y, 2.0 / spec.kappa);
        nodes.push_back(0.5 + t);
        values.push_back(pdf(t));
    }
    if (nodes.back() < 1.0) {
        if (nodes.back() + ramp < 1.0) {
            nodes.push_back(nodes.back() + ramp);
            values.push_back(0.0);
        }
        nodes.push_back(1.0);
        values.push_back(0.0);
    }

    GridDensity density{std::move(nodes), std::move(values)};
    const double total = density.pl().integral();
    for (double& v : density.values) v /= total;

    HybridLaw law{make_discrete({{1.0, 1.0}}), std::move(density), 1.0 - a};
    validate(law);
    return law;
}

} // namespace

LatentLaw make_named(const NamedLaw& spec) {
    return std::visit(
        [](const auto& s) -> LatentLaw {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, OscillationSpec>)
                return oscillation_law(s.j_max);
            else if constexpr (std::is_same_v<T, MarginWorstCaseSpec>)
                return margin_worst_case_law(s);
            else
                return figure1_law(s.curve);
        },
        spec);
}

double mean(const LatentLaw& law) {
    struct Visitor {
        double operator()(const DiscreteLaw& l) const {
            double m = 0.0;
            for (const LawAtom& a : l.atoms) m += a.weight * a.q;
            return m;
        }
        double operator()(const GridDensity& d) const {
            return d.pl().integral_times_x();
        }
        double operator()(const HybridLaw& h) const {
            return h.discrete_weight * (*this)(h.discrete) +
                   (1.0 - h.discrete_weight) * (*this)(h.density);
        }
    };
    return std::visit(Visitor{}, law);
}

double margin_mass(const LatentLaw& law, double t) {
    if (!(t > 0.0 && t <= 0.5))
        throw validation_error("margin threshold t must lie in (0, 1/2], got " + fmt(t));
    struct Visitor {
        double t;
        double operator()(const DiscreteLaw& l) const {
            double m = 0.0;
            for (const LawAtom& a : l.atoms)
                if (std::fabs(a.q - 0.5) <= t) m += a.weight;
            return m;
        }
        double operator()(const GridDensity& d) const {
            return d.pl().integral(0.5 - t, 0.5 + t);
        }
        double operator()(const HybridLaw& h) const {
            return h.discrete_weight * (*this)(h.discrete) +
                   (1.0 - h.discrete_weight) * (*this)(h.density);
        }
    };
    return std::visit(Visitor{t}, law);
}

PiecewiseLinear branch_asymmetry_u(const GridDensity& density) {
    const PiecewiseLinear f = density.pl();
    std::set<double> kinks{0.0, 1.0};
    for (double q : density.nodes) kinks.insert(std::fabs(2.0 * q - 1.0));
    PiecewiseLinear g;
    g.x.assign(kinks.begin(), kinks.end());
    g.y.reserve(g.x.size());
    for (double u : g.x) g.y.push_back(f(0.5 + 0.5 * u) - f(0.5 - 0.5 * u));
    return g;
}

BranchDecomposition branch_decompose(const GridDensity& density,
                                     std::size_t r_grid_size) {
    if (r_grid_size < 2)
        throw validation_error("r grid needs at least 2 nodes");
    validate(density);
    const PiecewiseLinear f = density.pl();
    // Uniform in u = sqrt(1-4r), merged with the density's own kink
    // coordinates |2q - 1| so that g and s are piecewise linear in u
    // between consecutive grid nodes (their integrals are then exact).
    std::set<double> us;
    for (std::size_t i = 0; i < r_grid_size; ++i)
        us.insert(static_cast<double>(i) / static_cast<double>(r_grid_size - 1));
    for (double q : density.nodes) us.insert(std::fabs(2.0 * q - 1.0));
    BranchDecomposition out;
    out.r_nodes.reserve(us.size());
    out.g_values.reserve(us.size());
    out.s_values.reserve(us.size());
    // u descending <=> r ascending.
    for (auto it = us.rbegin(); it != us.rend(); ++it) {
        const double u = *it;
        const double r = 0.25 * (1.0 - u * u);
        const double up = f(0.5 + 0.5 * u);
        const double lo = f(0.5 - 0.5 * u);
        out.r_nodes.push_back(r);
        out.g_values.push_back(up - lo);
        out.s_values.push_back(up + lo);
    }
    return out;
}

} // namespace votesig
