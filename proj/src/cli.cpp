#include "votesig/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "votesig/errors.hpp"
#include "votesig/estimation.hpp"
#include "votesig/io.hpp"
#include "votesig/kernel.hpp"
#include "votesig/latent_law.hpp"
#include "votesig/plurality.hpp"
#include "votesig/shape_rates.hpp"
#include "votesig/signature.hpp"
#include "votesig/simulate.hpp"

namespace votesig {

namespace {

using nlohmann::json;

// Destination for a single text payload: --out file or the given stream.
void deliver(const std::string& out_path, std::ostream& fallback,
             const std::string& payload) {
    if (out_path.empty()) {
        fallback << payload;
        return;
    }
    std::ofstream f(out_path);
    if (!f) throw validation_error("cannot write output file: " + out_path);
    f << payload;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::vector<double> parse_real_list(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw validation_error("cannot parse probability \"" + item + "\"");
        }
    }
    if (out.empty()) throw validation_error("empty probability list");
    return out;
}

struct CliOptions {
    std::string law_path;
    std::string signature_path;
    std::string curve_path;
    std::string counts_path;
    std::string out_path;
    std::string bound_kind;
    std::string p_list;
    long long n_max = 60;
    long long n = 0;
    long long m = 1;
    int depth = 0;
    int j_max = 10;
    long long examples = 10000;
    std::uint64_t seed = 0;
    long long mc_curve_nmax = -1;
    long long plurality_m = 3;
    long long mc_reps = 0;
    double margin_C = 0.0;
    double margin_kappa = 0.0;
    double margin_t0 = 0.0;
    double support_a = 0.0;
    double gap_delta = 0.0;
    double density_B = 0.0;
    bool plugin = false;
};

int cmd_curve(const CliOptions& o, std::ostream& out) {
    const LatentLaw law = load_law_file(o.law_path);
    const VotingCurve c = curve(law, o.n_max);
    std::ostringstream s;
    write_curve_csv(s, c);
    deliver(o.out_path, out, s.str());
    return 0;
}

int cmd_signature(const CliOptions& o, std::ostream& out) {
    const LatentLaw law = load_law_file(o.law_path);
    json j = signature_to_json(pushforward(law));
    j["meta"] = meta_json();
    deliver(o.out_path, out, dump(j));
    return 0;
}

int cmd_recover(const CliOptions& o, std::ostream& out) {
    std::ifstream in(o.curve_path);
    if (!in) throw validation_error("cannot open curve file: " + o.curve_path);
    const VotingCurve c = read_curve_csv(in);
    json j{{"meta", meta_json()}, {"s", recover_moments(c)}};
    deliver(o.out_path, out, dump(j));
    return 0;
}

int cmd_endpoint(const CliOptions& o, std::ostream& out) {
    if (o.law_path.empty() == o.signature_path.empty())
        throw validation_error("endpoint needs exactly one of --law or --signature");
    json j{{"meta", meta_json()}};
    if (!o.law_path.empty()) {
        const LatentLaw law = load_law_file(o.law_path);
        const double from_law = endpoint(law);
        const double from_sig = endpoint(pushforward(law));
        j["endpoint_law"] = from_law;
        j["endpoint_signature"] = from_sig;
        j["difference"] = from_law - from_sig;
    } else {
        j["endpoint_signature"] = endpoint(load_signature_file(o.signature_path));
    }
    deliver(o.out_path, out, dump(j));
    return 0;
}

int cmd_bounds(const CliOptions& o, std::ostream& out) {
    json j{{"meta", meta_json()}, {"kind", o.bound_kind}};
    const LatentLaw law = load_law_file(o.law_path);
    const double tv = pushforward(law).total_variation();
    j["signature_tv"] = tv;
    if (o.bound_kind == "variation") {
        const VariationBound b = variation_bound(tv, o.n, o.m);
        j["n"] = o.n;
        j["m"] = o.m;
        j["sum_form"] = b.sum_form;
        j["closed_form"] = b.closed_form;
    } else if (o.bound_kind == "near-zero") {
        j["n"] = o.n;
        j["a"] = o.support_a;
        j["bound"] = near_zero_bound(tv, o.support_a, o.n);
    } else if (o.bound_kind == "bridge") {
        j["n"] = o.n;
        const MarginCondition cond{o.margin_C, o.margin_kappa, o.margin_t0};
        j["C"] = cond.C;
        j["kappa"] = cond.kappa;
        j["t0"] = cond.t0;
        j["bound"] = bridge_bound(cond, o.n);
        if (o.gap_delta > 0.0) j["gap_bound"] = gap_bridge_bound(o.gap_delta, o.n);
        if (o.density_B > 0.0)
            j["density_bound"] = density_bridge_bound(o.density_B, o.n);
    } else {
        throw validation_error("unknown bound kind \"" + o.bound_kind +
                               "\" (expected variation|near-zero|bridge)");
    }
    deliver(o.out_path, out, dump(j));
    return 0;
}

int cmd_shape(const CliOptions& o, std::ostream& out) {
    const LatentLaw law = load_law_file(o.law_path);
    json j{{"meta", meta_json()},
           {"classification", shape_class_name(classify_shape(pushforward(law)))}};
    deliver(o.out_path, out, dump(j));
    return 0;
}

int cmd_oscillate(const CliOptions& o, std::ostream& out) {
    json arr = json::array();
    for (const OscillationSign& s : oscillation_signs(o.j_max))
        arr.push_back({{"j", s.j},
                       {"k", s.k},
                       {"sign", s.sign},
                       {"dominance_margin", s.dominance_margin}});
    json j{{"meta", meta_json()}, {"signs", arr}};
    deliver(o.out_path, out, dump(j));
    return 0;
}

int cmd_estimate(const CliOptions& o, std::ostream& out) {
    std::ifstream in(o.counts_path);
    if (!in) throw validation_error("cannot open counts file: " + o.counts_path);
    const GroupedSample sample = read_counts_csv(in, o.depth);
    const MomentPrefix prefix = signed_prefix(sample);
    json j{{"meta", meta_json()},
           {"depth", prefix.depth},
           {"n_examples", prefix.n_examples},
           {"s", prefix.s},
           {"covariance", prefix.covariance}};
    if (prefix.s.size() >= 2) {
        json inc = json::array();
        for (const auto& [k, v] : prefix_to_increments(prefix))
            inc.push_back({{"k", k}, {"increment", v}});
        j["increments"] = inc;
    }
    if (o.plugin) j["plugin_signature"] = signature_to_json(plugin_signature(sample));
    deliver(o.out_path, out, dump(j));
    return 0;
}

int cmd_simulate(const CliOptions& o, std::ostream& out) {
    const LatentLaw law = load_law_file(o.law_path);
    const SimConfig cfg{o.seed, static_cast<std::size_t>(o.examples), o.depth};
    std::ostringstream s;
    if (o.mc_curve_nmax >= 0) {
        write_mc_curve_csv(s, mc_curve(law, o.mc_curve_nmax, cfg));
    } else {
        write_counts_csv(s, simulate_counts(law, cfg));
    }
    deliver(o.out_path, out, s.str());
    return 0;
}

int cmd_nonident(const CliOptions& o, std::ostream& out) {
    const NonidentPair pair = nonident_pair(o.depth);
    const std::vector<double> pmf1 = count_pmf(pair.law1, o.depth);
    const std::vector<double> pmf2 = count_pmf(pair.law2, o.depth);
    double max_diff = 0.0;
    for (std::size_t c = 0; c < pmf1.size(); ++c)
        max_diff = std::max(max_diff, std::fabs(pmf1[c] - pmf2[c]));
    const double w1 = moment(pushforward(LatentLaw{pair.law1}), pair.k_witness);
    const double w2 = moment(pushforward(LatentLaw{pair.law2}), pair.k_witness);
    json j{{"meta", meta_json()},
           {"depth", o.depth},
           {"k_witness", pair.k_witness},
           {"support", pair.support},
           {"law1", law_to_json(LatentLaw{pair.law1})},
           {"law2", law_to_json(LatentLaw{pair.law2})},
           {"count_pmf1", pmf1},
           {"count_pmf2", pmf2},
           {"max_pmf_diff", max_diff},
           {"witness_moment1", w1},
           {"witness_moment2", w2},
           {"witness_moment_diff", w1 - w2}};
    deliver(o.out_path, out, dump(j));
    return 0;
}

int cmd_plurality(const CliOptions& o, std::ostream& out) {
    const CategoricalVector vec{parse_real_list(o.p_list)};
    std::optional<MonteCarloMode> mc;
    if (o.mc_reps > 0)
        mc = MonteCarloMode{o.seed, static_cast<std::size_t>(o.mc_reps)};
    const PluralityResult r =
        plurality_accuracy(vec, static_cast<int>(o.plurality_m), mc);
    json j{{"meta", meta_json(mc ? std::optional<std::uint64_t>(o.seed)
                                 : std::optional<std::uint64_t>{})},
           {"m", o.plurality_m},
           {"accuracy", r.accuracy},
           {"mode", r.exact ? "exact" : "monte_carlo"},
           {"endpoint", plurality_endpoint(vec)}};
    if (!r.exact) {
        j["stderr"] = r.stderr_value;
        j["reps"] = r.reps;
    }
    deliver(o.out_path, out, dump(j));
    return 0;
}

int cmd_figure1(const CliOptions& o, std::ostream& out) {
    const std::filesystem::path dir = o.out_path.empty() ? "." : o.out_path;
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw validation_error("cannot create output directory: " + dir.string());
    json files = json::array();
    for (Figure1Curve fc : all_figure1_curves()) {
        const std::string name = figure1_curve_name(fc);
        std::string stem = name;
        for (char& c : stem)
            if (c == ' ') c = '_';
        const LatentLaw law = make_named(Figure1Spec{fc});
        const VotingCurve c = curve(law, o.n_max);

        const std::filesystem::path curve_path = dir / (stem + ".csv");
        std::ofstream cf(curve_path);
        if (!cf) throw validation_error("cannot write " + curve_path.string());
        write_curve_csv(cf, c);

        const std::filesystem::path law_path = dir / (stem + ".law.json");
        std::ofstream lf(law_path);
        if (!lf) throw validation_error("cannot write " + law_path.string());
        lf << dump(law_to_json(law));

        files.push_back({{"name", name},
                         {"curve_csv", curve_path.string()},
                         {"law_json", law_path.string()},
                         {"V0", c.values.front()},
                         {"endpoint", c.endpoint ? json(*c.endpoint) : json()}});
    }
    out << dump(json{{"meta", meta_json()}, {"files", files}});
    return 0;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
    CLI::App app{"voting-curve and signed-signature toolkit"};
    app.require_subcommand(1);
    CliOptions o;

    CLI::App* curve_cmd = app.add_subcommand("curve", "odd-budget voting curve of a law");
    curve_cmd->add_option("--law", o.law_path, "law JSON file")->required();
    curve_cmd->add_option("--n-max", o.n_max, "largest budget index")->required();
    curve_cmd->add_option("--out", o.out_path, "output CSV path");

    CLI::App* sig_cmd = app.add_subcommand("signature", "signed voting signature of a law");
    sig_cmd->add_option("--law", o.law_path, "law JSON file")->required();
    sig_cmd->add_option("--out", o.out_path, "output JSON path");

    CLI::App* recover_cmd =
        app.add_subcommand("recover", "signed moments from a curve CSV");
    recover_cmd->add_option("--curve", o.curve_path, "curve CSV file")->required();
    recover_cmd->add_option("--out", o.out_path, "output JSON path");

    CLI::App* endpoint_cmd =
        app.add_subcommand("endpoint", "limiting accuracy from a law or signature");
    endpoint_cmd->add_option("--law", o.law_path, "law JSON file");
    endpoint_cmd->add_option("--signature", o.signature_path, "signature JSON file");
    endpoint_cmd->add_option("--out", o.out_path, "output JSON path");

    CLI::App* bounds_cmd = app.add_subcommand("bounds", "movement and endpoint bounds");
    bounds_cmd->add_option("--law", o.law_path, "law JSON file")->required();
    bounds_cmd->add_option("--kind", o.bound_kind, "variation|near-zero|bridge")
        ->required();
    bounds_cmd->add_option("--n", o.n, "budget index n");
    bounds_cmd->add_option("--m", o.m, "larger budget index m (variation)");
    bounds_cmd->add_option("--a", o.support_a, "support bound a (near-zero)");
    bounds_cmd->add_option("--C", o.margin_C, "margin constant C (bridge)");
    bounds_cmd->add_option("--kappa", o.margin_kappa, "margin exponent (bridge)");
    bounds_cmd->add_option("--t0", o.margin_t0, "margin range t0 (bridge)");
    bounds_cmd->add_option("--delta", o.gap_delta, "threshold gap (bridge sibling)");
    bounds_cmd->add_option("--B", o.density_B, "density bound (bridge sibling)");
    bounds_cmd->add_option("--out", o.out_path, "output JSON path");

    CLI::App* shape_cmd = app.add_subcommand("shape", "classify the curve shape");
    shape_cmd->add_option("--law", o.law_path, "law JSON file")->required();
    shape_cmd->add_option("--out", o.out_path, "output JSON path");

    CLI::App* osc_cmd = app.add_subcommand("oscillate", "oscillation sign certificates");
    osc_cmd->add_option("--j-max", o.j_max, "largest oscillation index");
    osc_cmd->add_option("--out", o.out_path, "output JSON path");

    CLI::App* est_cmd =
        app.add_subcommand("estimate", "signed-moment prefix from grouped counts");
    est_cmd->add_option("--counts", o.counts_path, "counts CSV file")->required();
    est_cmd->add_option("--depth", o.depth, "repeat depth J")->required();
    est_cmd->add_flag("--plugin", o.plugin, "also emit the plug-in signature");
    est_cmd->add_option("--out", o.out_path, "output JSON path");

    CLI::App* sim_cmd = app.add_subcommand("simulate", "exchangeable sampling oracle");
    sim_cmd->add_option("--law", o.law_path, "law JSON file")->required();
    sim_cmd->add_option("--depth", o.depth, "repeat depth J")->required();
    sim_cmd->add_option("--examples", o.examples, "number of examples")->required();
    sim_cmd->add_option("--seed", o.seed, "RNG seed")->required();
    sim_cmd->add_option("--curve", o.mc_curve_nmax,
                        "emit a Monte Carlo curve up to this budget index");
    sim_cmd->add_option("--out", o.out_path, "output CSV path");

    CLI::App* non_cmd =
        app.add_subcommand("nonident", "moment-matched nonidentifiable law pair");
    non_cmd->add_option("--depth", o.depth, "repeat depth J")->required();
    non_cmd->add_option("--out", o.out_path, "output JSON path");

    CLI::App* plu_cmd = app.add_subcommand("plurality", "multiclass plurality accuracy");
    plu_cmd->add_option("--p", o.p_list, "comma-separated class probabilities")
        ->required();
    plu_cmd->add_option("--m", o.plurality_m, "number of votes")->required();
    plu_cmd->add_option("--mc", o.mc_reps, "Monte Carlo replicates (0 = exact)");
    plu_cmd->add_option("--seed", o.seed, "RNG seed for Monte Carlo");
    plu_cmd->add_option("--out", o.out_path, "output JSON path");

    CLI::App* fig_cmd =
        app.add_subcommand("figure1", "emit the gallery laws and their curves");
    fig_cmd->add_option("--out", o.out_path, "output directory");
    fig_cmd->add_option("--n-max", o.n_max, "largest budget index");

    try {
        std::vector<std::string> argv{"votesig"};
        argv.insert(argv.end(), args.begin(), args.end());
        std::vector<const char*> raw;
        raw.reserve(argv.size());
        for (const std::string& a : argv) raw.push_back(a.c_str());
        app.parse(static_cast<int>(raw.size()), raw.data());

        if (curve_cmd->parsed()) return cmd_curve(o, out);
        if (sig_cmd->parsed()) return cmd_signature(o, out);
        if (recover_cmd->parsed()) return cmd_recover(o, out);
        if (endpoint_cmd->parsed()) return cmd_endpoint(o, out);
        if (bounds_cmd->parsed()) return cmd_bounds(o, out);
        if (shape_cmd->parsed()) return cmd_shape(o, out);
        if (osc_cmd->parsed()) return cmd_oscillate(o, out);
        if (est_cmd->parsed()) return cmd_estimate(o, out);
        if (sim_cmd->parsed()) return cmd_simulate(o, out);
        if (non_cmd->parsed()) return cmd_nonident(o, out);
        if (plu_cmd->parsed()) return cmd_plurality(o, out);
        if (fig_cmd->parsed()) return cmd_figure1(o, out);
        err << "error: no subcommand selected\n";
        return 2;
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const validation_error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const infeasibility_error& e) {
        err << "infeasible: " << e.what() << "\n";
        return 3;
    } catch (const precision_error& e) {
        err << "precision: " << e.what() << "\n";
        return 3;
    }
}

} // namespace votesig
