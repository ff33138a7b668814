#include "kcoupler_cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

#include "kcoupler/parallel.hpp"
#include "kcoupler/squeezing.hpp"

namespace kcoupler::cli {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

QuadratureSelection to_selection(const std::vector<int>& modes) {
  std::vector<Mode> m;
  for (int x : modes) m.emplace_back(x);
  return QuadratureSelection(m);
}

std::string selection_label(const std::vector<int>& modes) {
  std::string out;
  for (int m : modes) out += static_cast<char>('0' + m);
  return out;
}

ordered_json scenario_summary(const Scenario& s) {
  ordered_json j;
  j["scenario"] = s.name;
  j["chi"] = s.chi;
  j["lambda1"] = s.lambda1;
  j["lambda2"] = s.lambda2;
  j["alpha"] = ordered_json::array();
  for (const cplx& a : s.alpha) j["alpha"].push_back({a.real(), a.imag()});
  return j;
}

ordered_json intervals_json(const std::vector<TimeInterval>& v) {
  ordered_json out = ordered_json::array();
  for (const auto& iv : v) out.push_back({iv.begin, iv.end});
  return out;
}

// Ten sample indices spread evenly over [0, n).
std::vector<std::size_t> sample_indices(std::size_t n, std::size_t count = 10) {
  std::vector<std::size_t> out;
  if (n <= count) {
    for (std::size_t i = 0; i < n; ++i) out.push_back(i);
    return out;
  }
  for (std::size_t k = 0; k < count; ++k) out.push_back(k * (n - 1) / (count - 1));
  return out;
}

// Fixed phase-space probe points for the comparison, inside |beta| <= 2.
std::vector<cplx> probe_points() {
  std::vector<cplx> out;
  for (int k = 0; k < 10; ++k) {
    const double r = 0.2 * k;
    const double th = 0.7 * k;
    out.push_back(std::polar(r, th));
  }
  return out;
}

struct Tally {
  double max_dev = 0.0;
  double tolerance = 1e-5;
  std::size_t samples = 0;

  void add(double dev) {
    max_dev = std::max(max_dev, dev);
    ++samples;
  }
  bool pass() const { return max_dev <= tolerance; }
  ordered_json to_json() const {
    return {{"max_abs_deviation", max_dev},
            {"tolerance", tolerance},
            {"samples", samples},
            {"pass", pass()}};
  }
};

}  // namespace

Format parse_format(const std::string& text) {
  if (text == "csv") return Format::csv;
  if (text == "json") return Format::json;
  if (text == "bin") return Format::bin;
  throw UsageError("--format must be csv, json or bin");
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

MomentSpec parse_moment_spec(const std::string& text) {
  MomentSpec spec;
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw UsageError("--spec must look like n1,n2,n3:m1,m2,m3");
  auto parse3 = [&](const std::string& part, std::array<unsigned, 3>& dst) {
    std::stringstream ss(part);
    std::string item;
    std::size_t i = 0;
    while (std::getline(ss, item, ',')) {
      if (i >= 3 || item.empty() || item.find_first_not_of("0123456789") != std::string::npos)
        throw UsageError("--spec must look like n1,n2,n3:m1,m2,m3");
      dst[i++] = static_cast<unsigned>(std::stoul(item));
    }
    if (i != 3) throw UsageError("--spec must look like n1,n2,n3:m1,m2,m3");
  };
  parse3(text.substr(0, colon), spec.n);
  parse3(text.substr(colon + 1), spec.m);
  return spec;
}

void cmd_squeeze(const Scenario& s, Format format, std::ostream& out, unsigned threads) {
  if (format == Format::bin) throw UsageError("squeeze supports csv and json output");
  const auto params = s.params();
  const auto input = s.input();
  const auto times = s.times();
  std::vector<QuadratureSelection> sels;
  for (const auto& m : s.selections) sels.push_back(to_selection(m));

  std::vector<std::vector<SqueezingResult>> rows(times.size());
  parallel_for(times.size(), threads, [&](std::size_t i) {
    rows[i].reserve(sels.size());
    for (const auto& sel : sels) rows[i].push_back(squeezing_generic(params, input, sel, times[i]));
  });

  if (format == Format::csv) {
    out << 't';
    for (const auto& m : s.selections) {
      const std::string l = selection_label(m);
      out << ",S_" << l << ",Q_" << l;
    }
    out << '\n';
    for (std::size_t i = 0; i < times.size(); ++i) {
      out << fmt17(times[i]);
      for (const auto& r : rows[i]) out << ',' << fmt17(r.s) << ',' << fmt17(r.q);
      out << '\n';
    }
    return;
  }

  ordered_json doc = scenario_summary(s);
  doc["t"] = times;
  doc["series"] = ordered_json::array();
  for (std::size_t k = 0; k < sels.size(); ++k) {
    std::vector<double> sv, qv;
    for (const auto& row : rows) {
      sv.push_back(row[k].s);
      qv.push_back(row[k].q);
    }
    ordered_json entry;
    entry["modes"] = s.selections[k];
    entry["c_n"] = sels[k].c_n();
    entry["S"] = sv;
    entry["Q"] = qv;
    if (s.collapse_window > 0 && times.size() > 1) {
      const double dt = times[1] - times[0];
      const auto w = static_cast<std::size_t>(s.collapse_window);
      entry["collapse_S"] = intervals_json(detect_collapse_intervals(sv, times[0], dt, w));
      entry["collapse_Q"] = intervals_json(detect_collapse_intervals(qv, times[0], dt, w));
    }
    doc["series"].push_back(entry);
  }
  out << doc.dump(2) << '\n';
}

void cmd_wigner(const Scenario& s, Format format, std::ostream& out, std::ostream* header,
                unsigned threads) {
  const WignerGrid g =
      wigner_grid(s.params(), s.input(), Mode(s.mode), s.t0, s.grid, s.series, threads);
  switch (format) {
    case Format::csv:
      write_wigner_csv(out, g);
      break;
    case Format::bin:
      if (header == nullptr) throw UsageError("binary output needs --out FILE");
      write_wigner_header_json(*header, g);
      write_wigner_binary(out, g);
      break;
    case Format::json: {
      ordered_json doc = scenario_summary(s);
      doc["mode"] = s.mode;
      doc["t"] = s.t0;
      doc["x_range"] = {s.grid.x_min, s.grid.x_max};
      doc["y_range"] = {s.grid.y_min, s.grid.y_max};
      doc["nx"] = s.grid.nx;
      doc["ny"] = s.grid.ny;
      doc["order"] = "row-major, index = ix * ny + iy";
      doc["integral"] = g.integral();
      doc["min"] = g.min();
      doc["max"] = g.max();
      doc["values"] = g.values;
      out << doc.dump(2) << '\n';
      break;
    }
  }
}

void cmd_purity(const Scenario& s, Format format, std::ostream& out, unsigned threads) {
  if (format == Format::bin) throw UsageError("purity supports csv and json output");
  const auto params = s.params();
  const auto input = s.input();
  const Mode mode(s.mode);
  const auto times = s.times();
  std::vector<double> values(times.size());
  std::vector<std::string> methods(times.size());

  if (s.purity_method == "oracle") {
    const FockEvolver ev(s.oracle_params(), input, s.fock_cutoff(), threads);
    parallel_for(times.size(), threads, [&](std::size_t i) {
      values[i] = oracle_purity(reduce(ev.evolve(times[i]), mode));
      methods[i] = "oracle";
    });
  } else {
    const bool quad = s.purity_method == "quadrature";
    // The quadrature parallelizes internally; keep the outer loop serial then.
    parallel_for(times.size(), quad ? 1 : threads, [&](std::size_t i) {
      QuadratureGrid qg;
      qg.threads = threads;
      const PurityResult r = quad ? purity_quadrature(params, input, mode, times[i], qg, s.series)
                                  : purity_series(params, input, mode, times[i], s.series);
      values[i] = r.value;
      methods[i] = std::string(to_string(r.method));
    });
  }

  if (format == Format::csv) {
    out << "t,purity,method\n";
    for (std::size_t i = 0; i < times.size(); ++i)
      out << fmt17(times[i]) << ',' << fmt17(values[i]) << ',' << methods[i] << '\n';
    return;
  }
  ordered_json doc = scenario_summary(s);
  doc["mode"] = s.mode;
  doc["t"] = times;
  doc["purity"] = values;
  doc["method"] = methods;
  out << doc.dump(2) << '\n';
}

void cmd_moments(const Scenario& s, Format format, std::ostream& out,
                 const std::optional<MomentSpec>& spec) {
  if (format == Format::bin) throw UsageError("moments supports csv and json output");
  const auto params = s.params();
  const auto input = s.input();
  const auto times = s.times();
  const double eps = input.epsilon();

  if (spec) {
    std::vector<cplx> v;
    for (double t : times) v.push_back(moment(params, input, *spec, t));
    if (format == Format::csv) {
      out << "t,re,im\n";
      for (std::size_t i = 0; i < times.size(); ++i)
        out << fmt17(times[i]) << ',' << fmt17(v[i].real()) << ',' << fmt17(v[i].imag()) << '\n';
      return;
    }
    ordered_json doc = scenario_summary(s);
    doc["n"] = spec->n;
    doc["m"] = spec->m;
    doc["t"] = times;
    ordered_json re = ordered_json::array(), im = ordered_json::array();
    for (const cplx& c : v) {
      re.push_back(c.real());
      im.push_back(c.imag());
    }
    doc["re"] = re;
    doc["im"] = im;
    out << doc.dump(2) << '\n';
    return;
  }

  struct Row {
    double t;
    int mode;
    cplx abar, a, a2;
    double n;
  };
  std::vector<Row> rows;
  for (double t : times) {
    const auto ev = evolve_amplitudes(params, input, t);
    for (int j = 1; j <= 3; ++j) {
      const Mode m(j);
      MomentSpec first;
      first.m[m.index()] = 1;
      MomentSpec second;
      second.m[m.index()] = 2;
      const double chi_t = params.chi() * t;
      rows.push_back({t, j, ev[m], moment(ev, eps, chi_t, first), moment(ev, eps, chi_t, second),
                      moment(ev, eps, chi_t, MomentSpec::number(m)).real()});
    }
  }
  if (format == Format::csv) {
    out << "t,mode,abar_re,abar_im,mean_photon,a_re,a_im,a2_re,a2_im\n";
    for (const auto& r : rows)
      out << fmt17(r.t) << ',' << r.mode << ',' << fmt17(r.abar.real()) << ','
          << fmt17(r.abar.imag()) << ',' << fmt17(r.n) << ',' << fmt17(r.a.real()) << ','
          << fmt17(r.a.imag()) << ',' << fmt17(r.a2.real()) << ',' << fmt17(r.a2.imag()) << '\n';
    return;
  }
  ordered_json doc = scenario_summary(s);
  doc["rows"] = ordered_json::array();
  for (const auto& r : rows)
    doc["rows"].push_back({{"t", r.t},
                           {"mode", r.mode},
                           {"abar", {r.abar.real(), r.abar.imag()}},
                           {"mean_photon", r.n},
                           {"a", {r.a.real(), r.a.imag()}},
                           {"a2", {r.a2.real(), r.a2.imag()}}});
  out << doc.dump(2) << '\n';
}

void cmd_classify(const Scenario& s, Format format, std::ostream& out, double d_threshold) {
  if (format == Format::bin) throw UsageError("classify supports csv and json output");
  const auto params = s.params();
  const auto input = s.input();
  std::vector<std::pair<double, CatStateDescriptor>> rows;
  for (double t : s.times())
    for (int j = 1; j <= 3; ++j)
      rows.emplace_back(t, classify_state(params, input, Mode(j), t, d_threshold));
  if (format == Format::csv) {
    out << "t,mode,abar_re,abar_im,d,class\n";
    for (const auto& [t, d] : rows)
      out << fmt17(t) << ',' << d.mode.number() << ',' << fmt17(d.abar.real()) << ','
          << fmt17(d.abar.imag()) << ',' << fmt17(d.d) << ',' << to_string(d.classification)
          << '\n';
    return;
  }
  ordered_json doc = scenario_summary(s);
  doc["d_threshold"] = d_threshold;
  doc["states"] = ordered_json::array();
  for (const auto& [t, d] : rows)
    doc["states"].push_back({{"t", t},
                             {"mode", d.mode.number()},
                             {"abar", {d.abar.real(), d.abar.imag()}},
                             {"d", d.d},
                             {"class", std::string(to_string(d.classification))}});
  out << doc.dump(2) << '\n';
}

void cmd_disentangle(const Scenario& s, double t_max, double tol, std::ostream& out) {
  DisentanglementReport r;
  try {
    r = disentanglement_report(s.params(), t_max, tol);
  } catch (const PreconditionError& e) {
    throw UsageError(e.what());
  }
  ordered_json doc = scenario_summary(s);
  doc["mu"] = s.params().mu();
  doc["t_max"] = t_max;
  doc["tol"] = tol;
  doc["commensurate"] = r.commensurate;
  if (r.commensurate) doc["mu_over_chi"] = {r.ratio_numerator, r.ratio_denominator};
  doc["coherent_times"] = r.coherent_times;
  doc["revival_times"] = r.revival_times;
  out << doc.dump(2) << '\n';
}

ordered_json run_compare(const Scenario& s, unsigned threads, const std::optional<std::string>& dump_state) {
  const auto params = s.params();
  const auto input = s.input();
  const double eps = input.epsilon();
  const OracleParams op = s.oracle_params();
  const FockCutoff cutoff = s.fock_cutoff();
  const FockEvolver ev(op, input, cutoff, threads);

  const auto all_times = s.times();
  std::vector<double> times;
  for (std::size_t i : sample_indices(all_times.size())) times.push_back(all_times[i]);

  std::vector<MomentSpec> specs;
  auto spec = [&](std::array<unsigned, 3> n, std::array<unsigned, 3> m) {
    MomentSpec x;
    x.n = n;
    x.m = m;
    specs.push_back(x);
  };
  spec({0, 0, 0}, {1, 0, 0});
  spec({0, 0, 0}, {0, 1, 0});
  spec({0, 0, 0}, {0, 0, 1});
  spec({1, 0, 0}, {1, 0, 0});
  spec({0, 1, 0}, {0, 1, 0});
  spec({0, 0, 1}, {0, 0, 1});
  spec({0, 0, 0}, {2, 0, 0});
  spec({0, 0, 0}, {0, 2, 0});
  spec({1, 0, 0}, {0, 1, 0});
  spec({0, 0, 0}, {0, 1, 1});
  spec({1, 0, 0}, {0, 1, 1});
  spec({2, 0, 0}, {0, 1, 1});

  const std::vector<std::vector<int>> sels{{1}, {2}, {3}, {1, 2}, {2, 3}, {1, 2, 3}};
  const auto probes = probe_points();

  struct Sample {
    double moments = 0.0, squeezing = 0.0, purity = 0.0, wigner = 0.0;
    std::size_t n_m = 0, n_s = 0, n_p = 0, n_w = 0;
  };
  std::vector<Sample> samples(times.size());
  parallel_for(times.size(), threads, [&](std::size_t i) {
    const double t = times[i];
    const TruncatedState st = ev.evolve(t);
    Sample& out = samples[i];
    for (const auto& sp : specs) {
      const auto o = oracle_moment(st, sp, eps);
      out.moments = std::max(out.moments, std::abs(o.value - moment(params, input, sp, t)));
      ++out.n_m;
    }
    for (const auto& m : sels) {
      const auto sel = to_selection(m);
      const auto o = oracle_squeezing(st, sel, eps);
      const auto a = squeezing_generic(params, input, sel, t);
      out.squeezing = std::max({out.squeezing, std::abs(o.s - a.s), std::abs(o.q - a.q)});
      ++out.n_s;
    }
    for (int j = 1; j <= 3; ++j) {
      const ReducedDensity rho = reduce(st, Mode(j));
      const double p = purity_series(params, input, Mode(j), t, s.series).value;
      out.purity = std::max(out.purity, std::abs(oracle_purity(rho) - p));
      ++out.n_p;
      for (const cplx& b : probes) {
        const double w = wigner(params, input, Mode(j), b, t, s.series);
        out.wigner = std::max(out.wigner, std::abs(oracle_wigner(rho, b) - w));
        ++out.n_w;
      }
    }
  });

  Tally moments, squeezing, purity, wig;
  for (const auto& smp : samples) {
    moments.max_dev = std::max(moments.max_dev, smp.moments);
    moments.samples += smp.n_m;
    squeezing.max_dev = std::max(squeezing.max_dev, smp.squeezing);
    squeezing.samples += smp.n_s;
    purity.max_dev = std::max(purity.max_dev, smp.purity);
    purity.samples += smp.n_p;
    wig.max_dev = std::max(wig.max_dev, smp.wigner);
    wig.samples += smp.n_w;
  }
  // The oracle state is short by the Poisson tail; that mass joins the budget.
  const double tail = cutoff.tail(eps);
  for (Tally* t : {&moments, &squeezing, &purity, &wig}) t->tolerance += tail;

  const bool compensated = op.compensated();
  const bool all_pass = moments.pass() && squeezing.pass() && purity.pass() && wig.pass();

  ordered_json doc = scenario_summary(s);
  doc["compensated"] = compensated;
  doc["cutoff"] = cutoff.n_tot();
  doc["poisson_tail"] = tail;
  doc["times"] = times;
  doc["quantities"] = {{"moments", moments.to_json()},
                       {"squeezing", squeezing.to_json()},
                       {"purity", purity.to_json()},
                       {"wigner", wig.to_json()}};
  std::string status = all_pass ? "pass" : "fail";
  if (!compensated) status = all_pass ? "no mismatch observed" : "model mismatch detected";
  doc["status"] = status;
  doc["pass"] = compensated && all_pass;

  if (dump_state) {
    const TruncatedState last = ev.evolve(times.back());
    std::ofstream header(*dump_state + ".json");
    std::ofstream data(*dump_state + ".bin", std::ios::binary);
    if (!header || !data) throw UsageError("cannot write state dump to '" + *dump_state + "'");
    write_state_header_json(header, last);
    write_state_binary(data, last);
  }
  return doc;
}

}  // namespace kcoupler::cli
