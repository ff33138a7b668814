// kcoupler: command-line front end for the three-mode Kerr coupler library.
//
// Exit codes: 0 success, 1 numerical non-convergence or failed comparison,
// 2 usage or configuration error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <nlohmann/json.hpp>

#include "kcoupler_cli/commands.hpp"
#include "kcoupler_cli/scenario.hpp"

namespace {

using namespace kcoupler;
using namespace kcoupler::cli;

struct CommonOptions {
  std::string scenario;
  std::string config;
  std::optional<double> chi, lambda1, lambda2, t0, t1, rel_tol, extent;
  std::optional<std::string> alpha1, alpha2, alpha3, modes, chi_self, chi_cross;
  std::optional<int> steps, mode, max_terms, cutoff, points;
  std::string out;
  std::string format = "csv";
  unsigned threads = 0;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--scenario", o.scenario, "Built-in scenario name (see 'scenario list')");
  cmd->add_option("--config", o.config, "JSON scenario file; keys mirror the scenario fields");
  cmd->add_option("--chi", o.chi, "Kerr constant chi (1/s)");
  cmd->add_option("--lambda1", o.lambda1, "Linear coupling between modes 1 and 2 (1/s)");
  cmd->add_option("--lambda2", o.lambda2, "Linear coupling between modes 1 and 3 (1/s)");
  cmd->add_option("--alpha1", o.alpha1, "Input amplitude of mode 1: \"re\" or \"re,im\"");
  cmd->add_option("--alpha2", o.alpha2, "Input amplitude of mode 2");
  cmd->add_option("--alpha3", o.alpha3, "Input amplitude of mode 3");
  cmd->add_option("--t0", o.t0, "First time (s)");
  cmd->add_option("--t1", o.t1, "Last time (s)");
  cmd->add_option("--steps", o.steps, "Number of time steps between t0 and t1");
  cmd->add_option("--mode", o.mode, "Mode 1, 2 or 3 for single-mode quantities");
  cmd->add_option("--modes", o.modes, "Quadrature selections, e.g. \"1\", \"1,2\" or \"1;2,3\"");
  cmd->add_option("--out", o.out, "Output file (default: standard output)");
  cmd->add_option("--format", o.format, "csv, json or bin")->check(CLI::IsMember({"csv", "json", "bin"}));
  cmd->add_option("--rel-tol", o.rel_tol, "Relative truncation tolerance of the series");
  cmd->add_option("--max-terms", o.max_terms, "Cap on each series summation index");
  cmd->add_option("--cutoff", o.cutoff, "Oracle Fock cutoff (maximum total photon number)");
  cmd->add_option("--extent", o.extent, "Wigner grid half-width: the square [-R, R]^2");
  cmd->add_option("--points", o.points, "Wigner grid points per axis");
  cmd->add_option("--chi-self", o.chi_self, "Oracle self-Kerr constants \"c1,c2,c3\"");
  cmd->add_option("--chi-cross", o.chi_cross, "Oracle cross-Kerr constants \"c12,c13,c23\"");
  cmd->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::array<double, 3> parse_triple(const std::string& text, const std::string& flag) {
  std::array<double, 3> out{};
  std::stringstream ss(text);
  std::string item;
  std::size_t i = 0;
  while (std::getline(ss, item, ',')) {
    if (i >= 3) throw UsageError(flag + " expects three comma-separated numbers");
    try {
      out[i++] = std::stod(item);
    } catch (const std::exception&) {
      throw UsageError(flag + " expects three comma-separated numbers");
    }
  }
  if (i != 3) throw UsageError(flag + " expects three comma-separated numbers");
  return out;
}

// Precedence: flag > config file > built-in scenario.
Scenario resolve(const CommonOptions& o) {
  if (o.scenario.empty() && o.config.empty())
    throw UsageError("empty scenario: give --scenario NAME or --config FILE");
  Scenario s;
  s.name = "custom";
  std::optional<nlohmann::json> doc;
  if (!o.config.empty()) {
    doc = parse_config(read_file(o.config), o.config);
    if (doc->is_object() && doc->contains("base")) {
      if (!(*doc)["base"].is_string()) throw UsageError("config field 'base': expected a string");
      s = builtin((*doc)["base"].get<std::string>());
    }
  }
  if (!o.scenario.empty()) s = builtin(o.scenario);
  if (doc) apply_json(s, *doc);

  if (o.chi) s.chi = *o.chi;
  if (o.lambda1) s.lambda1 = *o.lambda1;
  if (o.lambda2) s.lambda2 = *o.lambda2;
  if (o.alpha1) s.alpha[0] = parse_complex(*o.alpha1);
  if (o.alpha2) s.alpha[1] = parse_complex(*o.alpha2);
  if (o.alpha3) s.alpha[2] = parse_complex(*o.alpha3);
  if (o.t0) {
    s.t0 = *o.t0;
    if (!o.t1 && s.t1 < s.t0) s.t1 = s.t0;
  }
  if (o.t1) s.t1 = *o.t1;
  if (o.steps) s.steps = *o.steps;
  if (o.mode) s.mode = *o.mode;
  if (o.modes) s.selections = parse_selections(*o.modes);
  if (o.rel_tol) s.series.rel_tol = *o.rel_tol;
  if (o.max_terms) s.series.max_terms = *o.max_terms;
  if (o.cutoff) s.cutoff = *o.cutoff;
  if (o.extent) {
    s.grid.x_min = s.grid.y_min = -*o.extent;
    s.grid.x_max = s.grid.y_max = *o.extent;
  }
  if (o.points) {
    if (*o.points < 2) throw UsageError("--points must be at least 2");
    s.grid.nx = s.grid.ny = static_cast<std::size_t>(*o.points);
  }
  if (o.chi_self || o.chi_cross) {
    OracleParams op = s.oracle_params();
    if (o.chi_self) op.chi_self = parse_triple(*o.chi_self, "--chi-self");
    if (o.chi_cross) op.chi_cross = parse_triple(*o.chi_cross, "--chi-cross");
    s.oracle = op;
  }
  s.validate();
  return s;
}

// Runs `body` with the requested output stream.
template <class Body>
void with_output(const CommonOptions& o, bool binary, Body&& body) {
  if (o.out.empty()) {
    if (binary) throw UsageError("binary output needs --out FILE");
    body(std::cout, nullptr);
    return;
  }
  std::ofstream out(o.out, binary ? std::ios::binary : std::ios::out);
  if (!out) throw UsageError("cannot write '" + o.out + "'");
  if (binary) {
    std::ofstream header(o.out + ".json");
    if (!header) throw UsageError("cannot write '" + o.out + ".json'");
    body(out, &header);
  } else {
    body(out, nullptr);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Three-mode Kerr nonlinear coupler: squeezing, Wigner function, purity"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "kcoupler 0.1.0");

  CommonOptions o;
  auto* squeeze = app.add_subcommand("squeeze", "Quadrature squeezing factors S and Q over time");
  add_common(squeeze, o);
  auto* wigner = app.add_subcommand("wigner", "Wigner function of one mode on a grid at t0");
  add_common(wigner, o);
  auto* purity = app.add_subcommand("purity", "Purity of one mode over time");
  add_common(purity, o);
  std::string method;
  purity->add_option("--method", method, "series, quadrature or oracle")
      ->check(CLI::IsMember({"series", "quadrature", "oracle"}));
  auto* moments = app.add_subcommand("moments", "Amplitudes and normally ordered moments");
  add_common(moments, o);
  std::string spec_text;
  moments->add_option("--spec", spec_text, "Single moment \"n1,n2,n3:m1,m2,m3\"");
  auto* classify = app.add_subcommand("classify", "Cat-state classification of every mode");
  add_common(classify, o);
  double d_threshold = 0.1;
  classify->add_option("--d-threshold", d_threshold, "Threshold on D_j for a Yurke-Stoler state");
  auto* disentangle = app.add_subcommand("disentangle", "Disentanglement and revival times up to t1");
  add_common(disentangle, o);
  double tol = 1e-9;
  disentangle->add_option("--tol", tol, "Tolerance of the rational mu/chi detection");
  auto* compare = app.add_subcommand("compare", "Analytic results against the Fock-space oracle");
  add_common(compare, o);
  std::string dump_state;
  compare->add_option("--dump-state", dump_state, "Write the last oracle state to PREFIX.json/.bin");
  auto* scenario = app.add_subcommand("scenario", "Built-in scenarios");
  scenario->require_subcommand(1);
  auto* list = scenario->add_subcommand("list", "List built-in scenarios");
  auto* show = scenario->add_subcommand("show", "Print a scenario as a JSON config");
  std::string show_name;
  show->add_option("name", show_name, "Scenario name")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (list->parsed()) {
      for (const auto& b : builtin_list()) std::cout << b.name << "\t" << b.description << '\n';
      return 0;
    }
    if (show->parsed()) {
      std::cout << to_json(builtin(show_name)).dump(2) << '\n';
      return 0;
    }
    Scenario s = resolve(o);
    const Format format = parse_format(o.format);
    const bool binary = format == Format::bin;
    if (squeeze->parsed()) {
      with_output(o, binary, [&](std::ostream& out, std::ostream*) {
        cmd_squeeze(s, format, out, o.threads);
      });
    } else if (wigner->parsed()) {
      with_output(o, binary, [&](std::ostream& out, std::ostream* header) {
        cmd_wigner(s, format, out, header, o.threads);
      });
    } else if (purity->parsed()) {
      if (!method.empty()) s.purity_method = method;
      with_output(o, binary, [&](std::ostream& out, std::ostream*) {
        cmd_purity(s, format, out, o.threads);
      });
    } else if (moments->parsed()) {
      std::optional<MomentSpec> spec;
      if (!spec_text.empty()) spec = parse_moment_spec(spec_text);
      with_output(o, binary, [&](std::ostream& out, std::ostream*) {
        cmd_moments(s, format, out, spec);
      });
    } else if (classify->parsed()) {
      with_output(o, binary, [&](std::ostream& out, std::ostream*) {
        cmd_classify(s, format, out, d_threshold);
      });
    } else if (disentangle->parsed()) {
      with_output(o, false, [&](std::ostream& out, std::ostream*) {
        cmd_disentangle(s, s.t1, tol, out);
      });
    } else if (compare->parsed()) {
      std::optional<std::string> dump;
      if (!dump_state.empty()) dump = dump_state;
      const auto report = run_compare(s, o.threads, dump);
      with_output(o, false, [&](std::ostream& out, std::ostream*) { out << report.dump(2) << '\n'; });
      return report["pass"].get<bool>() ? 0 : 1;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const PreconditionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const SeriesNotConverged& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
