#pragma once

// Subcommand bodies of the kcoupler tool. Each writes deterministic text (or
// binary) output for a resolved Scenario; argument parsing lives in main.cpp.

#include <optional>
#include <ostream>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "kcoupler_cli/scenario.hpp"

namespace kcoupler::cli {

enum class Format { csv, json, bin };

Format parse_format(const std::string& text);

/// %.17g, the shortest form that round-trips every double.
std::string fmt17(double v);

void cmd_squeeze(const Scenario& s, Format format, std::ostream& out, unsigned threads = 0);

/// For Format::bin the grid goes to `out` and its JSON header to `header`.
void cmd_wigner(const Scenario& s, Format format, std::ostream& out, std::ostream* header,
                unsigned threads = 0);

void cmd_purity(const Scenario& s, Format format, std::ostream& out, unsigned threads = 0);

/// Without `spec`: amplitudes, photon numbers and first/second moments per
/// mode. With `spec`: that single moment over the time grid.
void cmd_moments(const Scenario& s, Format format, std::ostream& out,
                 const std::optional<MomentSpec>& spec);

void cmd_classify(const Scenario& s, Format format, std::ostream& out, double d_threshold);

void cmd_disentangle(const Scenario& s, double t_max, double tol, std::ostream& out);

/// Analytic-versus-oracle comparison. Returns the JSON report; its "pass"
/// member is true iff every quantity is within tolerance.
nlohmann::ordered_json run_compare(const Scenario& s, unsigned threads = 0,
                           const std::optional<std::string>& dump_state = std::nullopt);

/// "n1,n2,n3:m1,m2,m3".
MomentSpec parse_moment_spec(const std::string& text);

}  // namespace kcoupler::cli
