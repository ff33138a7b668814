#pragma once

// Scenario model of the command-line tool: parameters, input, time grid and
// task settings, with named built-ins for the published figures and a JSON
// configuration format whose keys mirror the struct fields.

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "kcoupler/core.hpp"
#include "kcoupler/fock_oracle.hpp"
#include "kcoupler/phasespace.hpp"
#include "kcoupler/purity.hpp"

namespace kcoupler::cli {

/// Bad flags, malformed configuration or an empty scenario (exit code 2).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Scenario {
  std::string name;
  std::string description;
  std::string task = "squeeze";  // squeeze | wigner | purity

  double chi = 0.5;
  double lambda1 = 1.0;
  double lambda2 = 1.0;
  std::array<cplx, 3> alpha{};
  /// Independent Kerr constants for the oracle; absent means compensated.
  std::optional<OracleParams> oracle;

  double t0 = 0.0;
  double t1 = 0.0;
  int steps = 1;

  /// Quadrature selections for squeeze, e.g. {{1}, {1, 2}}.
  std::vector<std::vector<int>> selections{{1}};
  int mode = 1;
  GridSpec grid;
  SeriesControl series;
  std::optional<int> cutoff;
  std::string purity_method = "series";
  /// Window (samples) for revival-collapse detection; 0 disables it.
  int collapse_window = 0;

  CouplerParams params() const { return {chi, lambda1, lambda2}; }
  InputAmplitudes input() const { return {alpha[0], alpha[1], alpha[2]}; }
  OracleParams oracle_params() const { return oracle.value_or(OracleParams::from(params())); }
  FockCutoff fock_cutoff() const;
  /// steps + 1 samples from t0 to t1, or the single time t0 when t1 == t0.
  std::vector<double> times() const;
  /// Throws UsageError on violated invariants.
  void validate() const;
};

struct BuiltinInfo {
  std::string name;
  std::string description;
};

std::vector<BuiltinInfo> builtin_list();
/// Throws UsageError for unknown names.
Scenario builtin(std::string_view name);

/// Overlays the keys present in `doc` onto `base`. Unknown keys and wrong
/// types raise UsageError naming the field.
void apply_json(Scenario& base, const nlohmann::json& doc);
/// Parses configuration text; syntax errors report line and column.
nlohmann::json parse_config(const std::string& text, const std::string& source);
nlohmann::json to_json(const Scenario& s);

/// "re" or "re,im".
cplx parse_complex(const std::string& text);
/// "1", "1,2" or several selections separated by ';' ("1;2,3").
std::vector<std::vector<int>> parse_selections(const std::string& text);

}  // namespace kcoupler::cli
