#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

#include "votesig/estimation.hpp"
#include "votesig/latent_law.hpp"
#include "votesig/signature.hpp"
#include "votesig/simulate.hpp"

namespace votesig {

// Lossless decimal formatting shared by every CSV writer.
std::string format_real(double v);

// Law JSON: {"kind":"discrete"|"grid_density"|"hybrid"|"oscillation"|
// "margin_worst_case"|"figure1", ...}.  Named kinds materialize into
// concrete laws on load.
LatentLaw law_from_json(const nlohmann::json& j);
nlohmann::json law_to_json(const LatentLaw& law);
LatentLaw load_law_file(const std::string& path);

// Signature JSON: {"atoms":[{"r":..,"weight":..}],"g_nodes":[..],
// "g_values":[..]} with empty fields allowed.  g_nodes are radii in
// ascending order; interpolation is linear in u = sqrt(1-4r).
SignedSignature signature_from_json(const nlohmann::json& j);
nlohmann::json signature_to_json(const SignedSignature& sig);
SignedSignature load_signature_file(const std::string& path);

// Curve CSV: header "n,votes,V", votes = 2n+1.  The reader tolerates
// extra columns after V (the simulation writer appends its own).
void write_curve_csv(std::ostream& out, const VotingCurve& curve);
VotingCurve read_curve_csv(std::istream& in);
void write_mc_curve_csv(std::ostream& out, const McCurve& curve);

// Counts CSV: header "example_id,count"; blank lines skipped; malformed
// rows are hard errors.
GroupedSample read_counts_csv(std::istream& in, int depth);
void write_counts_csv(std::ostream& out, const GroupedSample& sample);

// Reproducibility block attached to JSON outputs.
nlohmann::json meta_json(std::optional<std::uint64_t> seed = {});

} // namespace votesig
