#pragma once
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "etalab/decay.hpp"
#include "etalab/eta.hpp"
#include "etalab/growth.hpp"

namespace etalab {

using ordered_json = nlohmann::ordered_json;

// Canonical numeric literal (shared by JSON and CSV so the two agree bytewise).
std::string num_str(double x);

// {schema, tool, config, result, diagnostics{warnings, flagged, wall_ms}}
ordered_json make_envelope(ordered_json config, ordered_json result,
                           const std::vector<std::string>& warnings, bool flagged,
                           double wall_ms);

// Write via a temp file in the same directory plus rename, so a crash never
// leaves a half-written output behind.
void atomic_write_text(const std::string& path, const std::string& content);

ordered_json eta_json(const EtaResult& r);
ordered_json convergence_json(const ConvergenceReport& rep);
ordered_json decay_json(const DecayReport& rep);
ordered_json growth_json(const GrowthConstants& gc);

// Header: n, eta_n, quad_err, tail_bound, trunc_bound, eta_line, abs_diff
// Numeric cells use num_str; line columns are empty when no line value exists.
std::string convergence_csv(const ConvergenceReport& rep);

}  // namespace etalab
