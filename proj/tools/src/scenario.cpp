#include "kcoupler_cli/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

namespace kcoupler::cli {

namespace {

using nlohmann::json;

constexpr double pi = std::numbers::pi;
const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
const double inv_2sqrt2 = 1.0 / (2.0 * std::sqrt(2.0));

// Symmetric square grid reaching ceil(sqrt(eps)) + 3, enough for the
// normalization to hold within 1e-3 on every built-in.
GridSpec square_grid(const std::array<cplx, 3>& alpha, std::size_t points) {
  double eps = 0.0;
  for (const cplx& a : alpha) eps += std::norm(a);
  const double r = std::ceil(std::sqrt(eps)) + 3.0;
  return {-r, r, -r, r, points, points};
}

Scenario squeeze(std::string name, std::string description, double l1, double l2,
                 std::array<cplx, 3> alpha, std::vector<std::vector<int>> sel, int steps) {
  Scenario s;
  s.name = std::move(name);
  s.description = std::move(description);
  s.task = "squeeze";
  s.lambda1 = l1;
  s.lambda2 = l2;
  s.alpha = alpha;
  s.t0 = 0.0;
  s.t1 = 20.0;
  s.steps = steps;
  s.selections = std::move(sel);
  return s;
}

Scenario wigner(std::string name, std::string description, double l1, double l2,
                std::array<cplx, 3> alpha, double t, int mode) {
  Scenario s;
  s.name = std::move(name);
  s.description = std::move(description);
  s.task = "wigner";
  s.lambda1 = l1;
  s.lambda2 = l2;
  s.alpha = alpha;
  s.t0 = s.t1 = t;
  s.steps = 1;
  s.mode = mode;
  s.grid = square_grid(alpha, 121);
  return s;
}

Scenario purity(std::string name, std::string description, std::array<cplx, 3> alpha, int mode) {
  Scenario s;
  s.name = std::move(name);
  s.description = std::move(description);
  s.task = "purity";
  s.lambda1 = 1.0;
  s.lambda2 = 1.0;
  s.alpha = alpha;
  s.t0 = 0.0;
  s.t1 = 4.0 * pi;  // chi t = 2 pi
  s.steps = 400;
  s.mode = mode;
  return s;
}

// Fig. 2(a) and 3(a) compare against the two-mode coupler with the same
// total photon number: all of it enters mode 2, |alpha_2|^2 = 2 (0.3)^2.
const double knc_alpha2 = 0.3 * std::sqrt(2.0);

std::vector<Scenario> make_builtins() {
  std::vector<Scenario> v;
  v.push_back(squeeze("fig2a", "single-mode S/Q of modes 1 and 2, alpha = (0, 0.3, 0.3)", 1, 1,
                      {0.0, 0.3, 0.3}, {{1}, {2}}, 2000));
  v.push_back(squeeze("fig2a-knc", "two-mode coupler reference for fig2a (lambda2 = 0)", 1, 0,
                      {0.0, knc_alpha2, 0.0}, {{1}}, 2000));
  {
    Scenario s = squeeze("fig2b", "S/Q of mode 1 under strong switching, lambda = (1, 50)", 1, 50,
                         {0.3, 0.3, 0.3}, {{1}}, 20000);
    s.collapse_window = 100;
    v.push_back(s);
  }
  {
    Scenario s = squeeze("fig2c", "S/Q of mode 2 under strong switching, lambda = (1, 50)", 1, 50,
                         {0.3, 0.3, 0.3}, {{2}}, 20000);
    s.collapse_window = 100;
    v.push_back(s);
  }
  v.push_back(squeeze("fig3a", "two-mode S/Q for pairs (1,2) and (2,3), alpha = (0, 0.3, 0.3)", 1,
                      1, {0.0, 0.3, 0.3}, {{1, 2}, {2, 3}}, 2000));
  v.push_back(squeeze("fig3a-knc", "two-mode coupler reference for fig3a (lambda2 = 0)", 1, 0,
                      {0.0, knc_alpha2, 0.0}, {{1, 2}}, 2000));
  {
    Scenario s = squeeze("fig3b", "two-mode S/Q for pair (2,3), lambda = (50, 1)", 50, 1,
                         {0.0, 0.3, 0.3}, {{2, 3}}, 20000);
    s.collapse_window = 100;
    v.push_back(s);
  }
  v.push_back(wigner("fig4a", "Wigner of mode 1 at t = pi, alpha_j = 0.9, lambda = 1/(2 sqrt 2)",
                     inv_2sqrt2, inv_2sqrt2, {0.9, 0.9, 0.9}, pi, 1));
  v.push_back(wigner("fig4b", "Wigner of mode 2 at t = pi, alpha_j = 0.9, lambda = 1/(2 sqrt 2)",
                     inv_2sqrt2, inv_2sqrt2, {0.9, 0.9, 0.9}, pi, 2));
  v.push_back(wigner("fig4c", "Wigner of mode 1 at t = pi, alpha = (2, 0, 0): Yurke-Stoler cat",
                     inv_sqrt2, inv_sqrt2, {2.0, 0.0, 0.0}, pi, 1));
  v.push_back(wigner("fig4c-mode2", "fig4c parameters, mode 2 (vacuum)",
                     inv_sqrt2, inv_sqrt2, {2.0, 0.0, 0.0}, pi, 2));
  v.push_back(wigner("fig5a", "Wigner of mode 1 at t = 12.38, alpha_j = 1, lambda = (1, 1)", 1, 1,
                     {1.0, 1.0, 1.0}, 12.38, 1));
  v.push_back(wigner("fig5b", "Wigner of mode 2 at t = 12.38, alpha_j = 1, lambda = (1, 1)", 1, 1,
                     {1.0, 1.0, 1.0}, 12.38, 2));
  v.push_back(wigner("fig5c", "Wigner of mode 1 at t = 12.38, alpha_j = 1, lambda = (50, 1)", 50,
                     1, {1.0, 1.0, 1.0}, 12.38, 1));
  v.push_back(purity("fig6a", "purity of mode 1, alpha = (0.3, 0.3, 0.3)", {0.3, 0.3, 0.3}, 1));
  v.push_back(purity("fig6b", "purity of mode 2, alpha = (0.3, 0.3, 0.3)", {0.3, 0.3, 0.3}, 2));
  v.push_back(purity("fig6-text", "purity of mode 1 with a strong fundamental, alpha = (2, 0.3, 0.3)",
                     {2.0, 0.3, 0.3}, 1));
  return v;
}

const std::vector<Scenario>& builtins() {
  static const std::vector<Scenario> all = make_builtins();
  return all;
}

std::string field_error(const std::string& field, const std::string& what) {
  return "config field '" + field + "': " + what;
}

double get_number(const json& doc, const std::string& field) {
  if (!doc.is_number()) throw UsageError(field_error(field, "expected a number"));
  return doc.get<double>();
}

int get_int(const json& doc, const std::string& field) {
  if (!doc.is_number_integer()) throw UsageError(field_error(field, "expected an integer"));
  return doc.get<int>();
}

std::array<double, 3> get_triple(const json& doc, const std::string& field) {
  if (!doc.is_array() || doc.size() != 3)
    throw UsageError(field_error(field, "expected an array of 3 numbers"));
  std::array<double, 3> out{};
  for (std::size_t i = 0; i < 3; ++i) out[i] = get_number(doc[i], field);
  return out;
}

cplx get_complex(const json& doc, const std::string& field) {
  if (doc.is_number()) return {doc.get<double>(), 0.0};
  if (doc.is_array() && doc.size() == 2)
    return {get_number(doc[0], field), get_number(doc[1], field)};
  throw UsageError(field_error(field, "expected a number or [re, im]"));
}

}  // namespace

FockCutoff Scenario::fock_cutoff() const {
  if (cutoff) return FockCutoff(*cutoff);
  // Truncated coherences rho_mn, n > n_tot, are of order sqrt(tail); a 1e-16
  // tail keeps their effect on Wigner values near 1e-8.
  return FockCutoff::for_epsilon(input().epsilon(), 1e-16);
}

std::vector<double> Scenario::times() const {
  if (t1 == t0) return {t0};
  std::vector<double> out(static_cast<std::size_t>(steps) + 1);
  for (int k = 0; k <= steps; ++k)
    out[static_cast<std::size_t>(k)] = t0 + (t1 - t0) * static_cast<double>(k) / steps;
  return out;
}

void Scenario::validate() const {
  if (task != "squeeze" && task != "wigner" && task != "purity")
    throw UsageError("task must be squeeze, wigner or purity");
  if (steps < 1) throw UsageError("steps must be at least 1");
  if (!(t1 >= t0)) throw UsageError("t1 must not be smaller than t0");
  if (mode < 1 || mode > 3) throw UsageError("mode must be 1, 2 or 3");
  if (selections.empty()) throw UsageError("at least one mode selection is required");
  for (const auto& sel : selections) {
    if (sel.empty()) throw UsageError("empty mode selection");
    for (int m : sel)
      if (m < 1 || m > 3) throw UsageError("selection modes must be 1, 2 or 3");
  }
  if (purity_method != "series" && purity_method != "quadrature" && purity_method != "oracle")
    throw UsageError("purity method must be series, quadrature or oracle");
  if (collapse_window < 0) throw UsageError("collapse window must be non-negative");
  try {
    (void)params();
    grid.validate();
    series.validate();
    if (cutoff) (void)FockCutoff(*cutoff);
  } catch (const PreconditionError& e) {
    throw UsageError(e.what());
  }
}

std::vector<BuiltinInfo> builtin_list() {
  std::vector<BuiltinInfo> out;
  for (const auto& s : builtins()) out.push_back({s.name, s.description});
  return out;
}

Scenario builtin(std::string_view name) {
  for (const auto& s : builtins())
    if (s.name == name) return s;
  throw UsageError("unknown scenario '" + std::string(name) + "' (see 'kcoupler scenario list')");
}

json parse_config(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // Convert the byte offset into a line and column.
    const std::size_t pos = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i < pos; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::ostringstream msg;
    msg << source << ':' << line << ':' << col << ": JSON syntax error";
    throw UsageError(msg.str());
  }
}

void apply_json(Scenario& s, const json& doc) {
  if (!doc.is_object()) throw UsageError("configuration must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (key == "name") {
      if (!value.is_string()) throw UsageError(field_error(key, "expected a string"));
      s.name = value.get<std::string>();
    } else if (key == "base") {
      // Resolved by the caller before the overlay.
    } else if (key == "description") {
      if (!value.is_string()) throw UsageError(field_error(key, "expected a string"));
      s.description = value.get<std::string>();
    } else if (key == "task") {
      if (!value.is_string()) throw UsageError(field_error(key, "expected a string"));
      s.task = value.get<std::string>();
    } else if (key == "chi") {
      s.chi = get_number(value, key);
    } else if (key == "lambda1") {
      s.lambda1 = get_number(value, key);
    } else if (key == "lambda2") {
      s.lambda2 = get_number(value, key);
    } else if (key == "alpha") {
      if (!value.is_array() || value.size() != 3)
        throw UsageError(field_error(key, "expected an array of 3 amplitudes"));
      for (std::size_t i = 0; i < 3; ++i)
        s.alpha[i] = get_complex(value[i], "alpha[" + std::to_string(i) + "]");
    } else if (key == "oracle") {
      if (value.is_null()) {
        s.oracle.reset();
        continue;
      }
      if (!value.is_object()) throw UsageError(field_error(key, "expected an object"));
      OracleParams op = s.oracle_params();
      for (const auto& [k2, v2] : value.items()) {
        const std::string f = "oracle." + k2;
        if (k2 == "chi_self")
          op.chi_self = get_triple(v2, f);
        else if (k2 == "chi_cross")
          op.chi_cross = get_triple(v2, f);
        else
          throw UsageError(field_error(f, "unknown key"));
      }
      s.oracle = op;
    } else if (key == "t0") {
      s.t0 = get_number(value, key);
    } else if (key == "t1") {
      s.t1 = get_number(value, key);
    } else if (key == "steps") {
      s.steps = get_int(value, key);
    } else if (key == "selections") {
      if (!value.is_array()) throw UsageError(field_error(key, "expected an array of arrays"));
      s.selections.clear();
      for (const auto& sel : value) {
        if (!sel.is_array()) throw UsageError(field_error(key, "expected an array of arrays"));
        std::vector<int> modes;
        for (const auto& m : sel) modes.push_back(get_int(m, key));
        s.selections.push_back(modes);
      }
    } else if (key == "mode") {
      s.mode = get_int(value, key);
    } else if (key == "grid") {
      if (!value.is_object()) throw UsageError(field_error(key, "expected an object"));
      for (const auto& [k2, v2] : value.items()) {
        const std::string f = "grid." + k2;
        if (k2 == "x_min")
          s.grid.x_min = get_number(v2, f);
        else if (k2 == "x_max")
          s.grid.x_max = get_number(v2, f);
        else if (k2 == "y_min")
          s.grid.y_min = get_number(v2, f);
        else if (k2 == "y_max")
          s.grid.y_max = get_number(v2, f);
        else if (k2 == "nx")
          s.grid.nx = static_cast<std::size_t>(std::max(0, get_int(v2, f)));
        else if (k2 == "ny")
          s.grid.ny = static_cast<std::size_t>(std::max(0, get_int(v2, f)));
        else
          throw UsageError(field_error(f, "unknown key"));
      }
    } else if (key == "series") {
      if (!value.is_object()) throw UsageError(field_error(key, "expected an object"));
      for (const auto& [k2, v2] : value.items()) {
        const std::string f = "series." + k2;
        if (k2 == "rel_tol")
          s.series.rel_tol = get_number(v2, f);
        else if (k2 == "max_terms")
          s.series.max_terms = get_int(v2, f);
        else
          throw UsageError(field_error(f, "unknown key"));
      }
    } else if (key == "cutoff") {
      if (value.is_null())
        s.cutoff.reset();
      else
        s.cutoff = get_int(value, key);
    } else if (key == "purity_method") {
      if (!value.is_string()) throw UsageError(field_error(key, "expected a string"));
      s.purity_method = value.get<std::string>();
    } else if (key == "collapse_window") {
      s.collapse_window = get_int(value, key);
    } else {
      throw UsageError(field_error(key, "unknown key"));
    }
  }
}

json to_json(const Scenario& s) {
  json doc;
  doc["name"] = s.name;
  doc["description"] = s.description;
  doc["task"] = s.task;
  doc["chi"] = s.chi;
  doc["lambda1"] = s.lambda1;
  doc["lambda2"] = s.lambda2;
  doc["alpha"] = json::array();
  for (const cplx& a : s.alpha) doc["alpha"].push_back({a.real(), a.imag()});
  if (s.oracle)
    doc["oracle"] = {{"chi_self", s.oracle->chi_self}, {"chi_cross", s.oracle->chi_cross}};
  doc["t0"] = s.t0;
  doc["t1"] = s.t1;
  doc["steps"] = s.steps;
  doc["selections"] = s.selections;
  doc["mode"] = s.mode;
  doc["grid"] = {{"x_min", s.grid.x_min}, {"x_max", s.grid.x_max}, {"y_min", s.grid.y_min},
                 {"y_max", s.grid.y_max}, {"nx", s.grid.nx},       {"ny", s.grid.ny}};
  doc["series"] = {{"rel_tol", s.series.rel_tol}, {"max_terms", s.series.max_terms}};
  if (s.cutoff) doc["cutoff"] = *s.cutoff;
  doc["purity_method"] = s.purity_method;
  doc["collapse_window"] = s.collapse_window;
  return doc;
}

cplx parse_complex(const std::string& text) {
  auto parse_one = [&](const std::string& part) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(part, &used);
    } catch (const std::exception&) {
      throw UsageError("invalid amplitude '" + text + "' (expected \"re\" or \"re,im\")");
    }
    if (used != part.size() || !std::isfinite(v))
      throw UsageError("invalid amplitude '" + text + "' (expected \"re\" or \"re,im\")");
    return v;
  };
  const auto comma = text.find(',');
  if (comma == std::string::npos) return {parse_one(text), 0.0};
  return {parse_one(text.substr(0, comma)), parse_one(text.substr(comma + 1))};
}

std::vector<std::vector<int>> parse_selections(const std::string& text) {
  std::vector<std::vector<int>> out;
  std::stringstream groups(text);
  std::string group;
  while (std::getline(groups, group, ';')) {
    std::vector<int> modes;
    std::stringstream items(group);
    std::string item;
    while (std::getline(items, item, ',')) {
      if (item != "1" && item != "2" && item != "3")
        throw UsageError("invalid mode '" + item + "' in --modes (expected 1, 2 or 3)");
      modes.push_back(item[0] - '0');
    }
    if (modes.empty()) throw UsageError("empty selection in --modes");
    out.push_back(modes);
  }
  if (out.empty()) throw UsageError("--modes needs at least one selection");
  return out;
}

}  // namespace kcoupler::cli
