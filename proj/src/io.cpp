#include "votesig/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "votesig/errors.hpp"
#include "votesig/rng.hpp"
#include "votesig/version.hpp"

namespace votesig {

namespace {

using nlohmann::json;

std::vector<double> real_array(const json& j, const char* field) {
    if (!j.contains(field)) return {};
    if (!j.at(field).is_array())
        throw validation_error(std::string("field \"") + field + "\" must be an array");
    std::vector<double> out;
    for (const auto& v : j.at(field)) {
        if (!v.is_number())
            throw validation_error(std::string("field \"") + field +
                                   "\" must contain numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

double real_field(const json& j, const char* field) {
    if (!j.contains(field) || !j.at(field).is_number())
        throw validation_error(std::string("missing numeric field \"") + field + "\"");
    return j.at(field).get<double>();
}

DiscreteLaw discrete_from_json(const json& j) {
    if (!j.contains("atoms") || !j.at("atoms").is_array())
        throw validation_error("discrete law needs an \"atoms\" array");
    std::vector<LawAtom> atoms;
    for (const auto& a : j.at("atoms"))
        atoms.push_back({real_field(a, "q"), real_field(a, "weight")});
    return make_discrete(std::move(atoms));
}

GridDensity density_from_json(const json& j) {
    GridDensity d{real_array(j, "nodes"), real_array(j, "values")};
    validate(d);
    return d;
}

json discrete_to_json(const DiscreteLaw& law) {
    json atoms = json::array();
    for (const LawAtom& a : law.atoms) atoms.push_back({{"q", a.q}, {"weight", a.weight}});
    return {{"kind", "discrete"}, {"atoms", atoms}};
}

json density_to_json(const GridDensity& d) {
    return {{"kind", "grid_density"}, {"nodes", d.nodes}, {"values", d.values}};
}

// Splits one CSV line; no quoting, the formats here never need it.
std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t");
    std::size_t e = s.find_last_not_of(" \t");
    if (b == std::string::npos) return "";
    return s.substr(b, e - b + 1);
}

double parse_real(const std::string& s, std::size_t line_no) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size())
            throw validation_error("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw validation_error("line " + std::to_string(line_no) +
                               ": cannot parse number \"" + s + "\"");
    }
}

long parse_int(const std::string& s, std::size_t line_no) {
    try {
        std::size_t used = 0;
        const long v = std::stol(s, &used);
        if (used != s.size())
            throw validation_error("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw validation_error("line " + std::to_string(line_no) +
                               ": cannot parse integer \"" + s + "\"");
    }
}

} // namespace

std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

LatentLaw law_from_json(const json& j) {
    if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
        throw validation_error("law JSON needs a string \"kind\" field");
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "discrete") return LatentLaw{discrete_from_json(j)};
    if (kind == "grid_density") return LatentLaw{density_from_json(j)};
    if (kind == "hybrid") {
        if (!j.contains("discrete") || !j.contains("density"))
            throw validation_error("hybrid law needs \"discrete\" and \"density\"");
        HybridLaw h{discrete_from_json(j.at("discrete")),
                    density_from_json(j.at("density")),
                    real_field(j, "discrete_weight")};
        validate(h);
        return LatentLaw{h};
    }
    if (kind == "oscillation") {
        if (!j.contains("j_max") || !j.at("j_max").is_number_integer())
            throw validation_error("oscillation law needs integer \"j_max\"");
        return make_named(OscillationSpec{j.at("j_max").get<int>()});
    }
    if (kind == "margin_worst_case")
        return make_named(MarginWorstCaseSpec{real_field(j, "C"), real_field(j, "kappa"),
                                              real_field(j, "t0")});
    if (kind == "figure1") {
        if (!j.contains("name") || !j.at("name").is_string())
            throw validation_error("figure1 law needs a string \"name\"");
        return make_named(
            Figure1Spec{figure1_curve_from_name(j.at("name").get<std::string>())});
    }
    throw validation_error("unknown law kind \"" + kind + "\"");
}

json law_to_json(const LatentLaw& law) {
    struct Visitor {
        json operator()(const DiscreteLaw& l) const { return discrete_to_json(l); }
        json operator()(const GridDensity& d) const { return density_to_json(d); }
        json operator()(const HybridLaw& h) const {
            json jd = discrete_to_json(h.discrete);
            jd.erase("kind");
            json jf = density_to_json(h.density);
            jf.erase("kind");
            return {{"kind", "hybrid"},
                    {"discrete", jd},
                    {"density", jf},
                    {"discrete_weight", h.discrete_weight}};
        }
    };
    return std::visit(Visitor{}, law);
}

LatentLaw load_law_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("cannot open law file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw validation_error("invalid JSON in " + path + ": " + e.what());
    }
    return law_from_json(j);
}

SignedSignature signature_from_json(const json& j) {
    if (!j.is_object()) throw validation_error("signature JSON must be an object");
    std::vector<SignatureAtom> atoms;
    if (j.contains("atoms")) {
        if (!j.at("atoms").is_array())
            throw validation_error("signature \"atoms\" must be an array");
        for (const auto& a : j.at("atoms"))
            atoms.push_back({real_field(a, "r"), real_field(a, "weight")});
    }
    const std::vector<double> g_nodes = real_array(j, "g_nodes");
    const std::vector<double> g_values = real_array(j, "g_values");
    if (g_nodes.size() != g_values.size())
        throw validation_error("g_nodes and g_values must have equal length");
    PiecewiseLinear g_u;
    if (!g_nodes.empty()) {
        if (g_nodes.size() < 2)
            throw validation_error("signature density needs >= 2 grid nodes");
        for (std::size_t i = g_nodes.size(); i-- > 0;) {
            const double r = g_nodes[i];
            if (!(r >= -1e-15 && r <= 0.25 + 1e-15))
                throw validation_error("g_nodes entry out of [0, 1/4]: " +
                                       format_real(r));
            g_u.x.push_back(std::sqrt(std::max(0.0, 1.0 - 4.0 * r)));
            g_u.y.push_back(g_values[i]);
        }
    }
    return make_signature(std::move(atoms), std::move(g_u));
}

json signature_to_json(const SignedSignature& sig) {
    json atoms = json::array();
    for (const SignatureAtom& a : sig.atoms)
        atoms.push_back({{"r", a.r}, {"weight", a.weight}});
    json g_nodes = json::array();
    json g_values = json::array();
    if (sig.has_density()) {
        for (std::size_t i = sig.g_u.x.size(); i-- > 0;) {
            const double u = sig.g_u.x[i];
            g_nodes.push_back(0.25 * (1.0 - u * u));
            g_values.push_back(sig.g_u.y[i]);
        }
    }
    return {{"atoms", atoms}, {"g_nodes", g_nodes}, {"g_values", g_values}};
}

SignedSignature load_signature_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("cannot open signature file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw validation_error("invalid JSON in " + path + ": " + e.what());
    }
    return signature_from_json(j);
}

void write_curve_csv(std::ostream& out, const VotingCurve& curve) {
    out << "n,votes,V\n";
    for (std::size_t n = 0; n < curve.values.size(); ++n)
        out << n << ',' << (2 * n + 1) << ',' << format_real(curve.values[n]) << '\n';
}

VotingCurve read_curve_csv(std::istream& in) {
    VotingCurve curve;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const std::vector<std::string> cells = split_csv(line);
        if (!header_seen) {
            if (cells.size() < 3 || trim(cells[0]) != "n" || trim(cells[1]) != "votes" ||
                trim(cells[2]) != "V")
                throw validation_error("curve CSV must start with header n,votes,V");
            header_seen = true;
            continue;
        }
        if (cells.size() < 3)
            throw validation_error("line " + std::to_string(line_no) +
                                   ": expected n,votes,V");
        const long n = parse_int(trim(cells[0]), line_no);
        const long votes = parse_int(trim(cells[1]), line_no);
        const double v = parse_real(trim(cells[2]), line_no);
        if (n != static_cast<long>(curve.values.size()))
            throw validation_error("line " + std::to_string(line_no) +
                                   ": budget indices must run 0,1,2,...");
        if (votes != 2 * n + 1)
            throw validation_error("line " + std::to_string(line_no) +
                                   ": votes must equal 2n+1");
        curve.values.push_back(v);
    }
    if (!header_seen) throw validation_error("curve CSV is empty");
    if (curve.values.empty()) throw validation_error("curve CSV has no data rows");
    return curve;
}

void write_mc_curve_csv(std::ostream& out, const McCurve& curve) {
    out << "n,votes,V,stderr,n_examples,seed\n";
    for (std::size_t n = 0; n < curve.values.size(); ++n)
        out << n << ',' << (2 * n + 1) << ',' << format_real(curve.values[n]) << ','
            << format_real(curve.stderrs[n]) << ',' << curve.n_examples << ','
            << curve.seed << '\n';
}

GroupedSample read_counts_csv(std::istream& in, int depth) {
    GroupedSample sample;
    sample.depth = depth;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const std::vector<std::string> cells = split_csv(line);
        if (!header_seen) {
            if (cells.size() < 2 || trim(cells[0]) != "example_id" ||
                trim(cells[1]) != "count")
                throw validation_error(
                    "counts CSV must start with header example_id,count");
            header_seen = true;
            continue;
        }
        if (cells.size() != 2)
            throw validation_error("line " + std::to_string(line_no) +
                                   ": expected example_id,count");
        const long c = parse_int(trim(cells[1]), line_no);
        if (c < 0 || c > depth)
            throw validation_error("line " + std::to_string(line_no) + ": count " +
                                   std::to_string(c) + " outside [0, depth=" +
                                   std::to_string(depth) + "]");
        sample.counts.push_back(static_cast<int>(c));
    }
    if (!header_seen) throw validation_error("counts CSV is empty");
    validate(sample);
    return sample;
}

void write_counts_csv(std::ostream& out, const GroupedSample& sample) {
    out << "example_id,count\n";
    for (std::size_t i = 0; i < sample.counts.size(); ++i)
        out << i << ',' << sample.counts[i] << '\n';
}

json meta_json(std::optional<std::uint64_t> seed) {
    json meta{{"tool", kToolName},
              {"version", kVersion},
              {"rng", kRngAlgorithm},
              {"quadrature",
               {{"r_grid_size", kDefaultRGridSize},
                {"panels", kDefaultQuadraturePanels}}}};
    if (seed) meta["seed"] = *seed;
    return meta;
}

} // namespace votesig
