#include "kcoupler/phasespace.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "kcoupler/parallel.hpp"
#include "kernels.hpp"
#include "series_util.hpp"

namespace kcoupler {

namespace {

using ldouble = long double;
using lcplx = std::complex<long double>;
constexpr int kConfirmShells = 4;

// z^{n(n-1)/2} for n = 0.. on demand.
class KerrPhases {
 public:
  explicit KerrPhases(double chi_t) : chi_t_(chi_t) {}
  cplx operator()(int n) {
    while (static_cast<int>(cache_.size()) <= n) {
      const long long m = static_cast<long long>(cache_.size());
      cache_.push_back(kerr_phase(chi_t_, m * (m - 1) / 2));
    }
    return cache_[static_cast<std::size_t>(n)];
  }

 private:
  double chi_t_;
  std::vector<cplx> cache_;
};

// exp[eps (z^k - 1)] for k in [-K, K].
class DampingTable {
 public:
  DampingTable(double epsilon, double chi_t) : epsilon_(epsilon), chi_t_(chi_t) {}
  cplx operator()(int k) {
    const std::size_t idx = static_cast<std::size_t>(k < 0 ? -k : k);
    while (cache_.size() <= idx)
      cache_.push_back(kerr_damping(epsilon_, chi_t_, static_cast<long long>(cache_.size())));
    // exp[eps (z^{-k} - 1)] is the conjugate of exp[eps (z^k - 1)].
    return k < 0 ? std::conj(cache_[idx]) : cache_[idx];
  }

 private:
  double epsilon_;
  double chi_t_;
  std::vector<cplx> cache_;
};

ldouble log_or_neg_inf(ldouble x) {
  return x > 0.0L ? std::log(x) : -std::numeric_limits<ldouble>::infinity();
}

}  // namespace

void SeriesControl::validate() const {
  if (!(rel_tol > 0.0)) throw PreconditionError("rel_tol must be positive");
  if (max_terms < 8) throw PreconditionError("max_terms must be at least 8");
}

namespace detail {

cplx characteristic_series(cplx abar, double epsilon, double chi_t, cplx zeta,
                           const SeriesControl& ctl) {
  KerrPhases phase(chi_t);
  DampingTable damping(epsilon, chi_t);

  // u^n / n! and v^n / n! with u = zeta abar^*, v = -zeta^* abar.
  const cplx u = zeta * std::conj(abar);
  const cplx v = -std::conj(zeta) * abar;
  std::vector<cplx> pu{1.0}, pv{1.0};

  CompensatedSum<cplx> sum;
  ShellStopRule stop(ctl.rel_tol, kConfirmShells);
  for (int s = 0;; ++s) {
    if (s > ctl.max_terms) throw SeriesNotConverged();
    pu.push_back(pu.back() * u / static_cast<double>(s + 1));
    pv.push_back(pv.back() * v / static_cast<double>(s + 1));
    ldouble mass = 0.0L;
    for (int n1 = 0; n1 <= s; ++n1) {
      const int n2 = s - n1;
      const cplx term = pu[static_cast<std::size_t>(n1)] * pv[static_cast<std::size_t>(n2)] *
                        phase(n2) * std::conj(phase(n1)) * damping(n2 - n1);
      sum.add(term);
      mass += std::abs(term);
    }
    if (stop.feed(mass)) break;
  }
  return std::exp(-0.5 * std::norm(zeta)) * sum.value();
}

}  // namespace detail

cplx characteristic_function(const CouplerParams& params, const InputAmplitudes& input, Mode mode,
                             cplx zeta, double t, const SeriesControl& ctl) {
  ctl.validate();
  const cplx abar = evolve_amplitudes(params, input, t)[mode];
  return detail::characteristic_series(abar, input.epsilon(), params.chi() * t, zeta, ctl);
}

WignerEvaluation wigner_detailed(const CouplerParams& params, const InputAmplitudes& input,
                                 Mode mode, cplx beta, double t, const SeriesControl& ctl) {
  ctl.validate();
  const cplx abar = evolve_amplitudes(params, input, t)[mode];
  const double chi_t = params.chi() * t;
  KerrPhases phase(chi_t);
  DampingTable damping(input.epsilon(), chi_t);

  const ldouble r = std::abs(abar);
  const ldouble b = std::abs(beta);
  const ldouble x = 2.0L * b * b;
  const ldouble log_r = log_or_neg_inf(r);
  const ldouble log_b = log_or_neg_inf(b);
  const ldouble log2 = std::numbers::ln2_v<ldouble>;
  // e^{i k (arg abar - arg beta)}
  const ldouble rel_angle = (r > 0 ? std::arg(abar) : 0.0) - (b > 0 ? std::arg(beta) : 0.0);

  detail::LaguerreTable laguerre(x);
  detail::CompensatedSum<lcplx> sum;
  detail::ShellStopRule stop(ctl.rel_tol, kConfirmShells);
  int s = 0;
  for (;; ++s) {
    if (s > 2 * ctl.max_terms) throw SeriesNotConverged();
    ldouble mass = 0.0L;
    for (int n1 = 0; 2 * n1 <= s; ++n1) {
      const int n2 = s - n1;
      const int k = n2 - n1;
      if (n2 > ctl.max_terms) continue;
      if ((s > 0 && r == 0.0L) || (k > 0 && b == 0.0L)) continue;
      const ldouble log_mag = (s > 0 ? s * log_r : 0.0L) + n2 * log2 +
                              (k > 0 ? k * log_b : 0.0L) - std::lgamma(static_cast<ldouble>(n2 + 1));
      const ldouble mag = std::exp(log_mag) * laguerre(n1, k);
      const cplx kerr = phase(n2) * std::conj(phase(n1)) * damping(k);
      const ldouble angle = k * rel_angle;
      lcplx term = lcplx(std::cos(angle), std::sin(angle)) * lcplx(kerr.real(), kerr.imag()) * mag;
      if (n1 % 2 == 1) term = -term;
      if (k > 0) {
        sum.add(lcplx(2.0L * term.real(), 0.0L));
        mass += 2.0L * std::abs(term);
      } else {
        sum.add(term);
        mass += std::abs(term);
      }
    }
    if (stop.feed(mass)) break;
  }

  const ldouble prefactor = 2.0L / std::numbers::pi_v<ldouble> * std::exp(-x);
  const lcplx total = sum.value();
  WignerEvaluation out;
  out.value = static_cast<double>(prefactor * total.real());
  out.imag_residue = static_cast<double>(prefactor * std::abs(total.imag()));
  out.anti_diagonals = s + 1;
  return out;
}

double wigner(const CouplerParams& params, const InputAmplitudes& input, Mode mode, cplx beta,
              double t, const SeriesControl& ctl) {
  return wigner_detailed(params, input, mode, beta, t, ctl).value;
}

bool kerr_phase_is(double chi_t, double offset, double tol) {
  constexpr double pi = std::numbers::pi;
  const double m = std::round(chi_t / pi - offset);
  return std::abs(chi_t - (m + offset) * pi) < tol;
}

double cat_wigner_closed_form(const CouplerParams& params, const InputAmplitudes& input, Mode mode,
                              cplx beta, double t) {
  if (!kerr_phase_is(params.chi() * t, 0.5)) throw PreconditionError("not a half-integer Kerr phase");
  const cplx abar = evolve_amplitudes(params, input, t)[mode];
  const double d = std::max(0.0, input.epsilon() - std::norm(abar));
  const cplx i{0.0, 1.0};
  const double peaks =
      std::exp(-2.0 * std::norm(beta - i * abar)) + std::exp(-2.0 * std::norm(beta + i * abar));
  const double fringe = 2.0 * std::exp(-2.0 * (std::norm(beta) + d)) *
                        std::sin(2.0 * (beta * std::conj(abar) + std::conj(beta) * abar).real());
  return (peaks + fringe) / std::numbers::pi;
}

double d_parameter(const CouplerParams& params, const InputAmplitudes& input, Mode mode, double t) {
  return std::max(0.0, input.epsilon() - mean_photon(params, input, mode, t));
}

std::string_view to_string(CatClass c) {
  switch (c) {
    case CatClass::coherent: return "coherent";
    case CatClass::yscs_like: return "yscs-like";
    case CatClass::mixture_like: return "mixture-like";
    case CatClass::intermediate: return "intermediate";
  }
  return "unknown";
}

CatStateDescriptor classify_state(const CouplerParams& params, const InputAmplitudes& input,
                                  Mode mode, double t, double d_threshold) {
  CatStateDescriptor out;
  out.mode = mode;
  out.abar = evolve_amplitudes(params, input, t)[mode];
  out.d = std::max(0.0, input.epsilon() - std::norm(out.abar));
  const double chi_t = params.chi() * t;
  if (kerr_phase_is(chi_t, 0.0)) {
    out.classification = CatClass::coherent;
  } else if (kerr_phase_is(chi_t, 0.5)) {
    // exp(-2 D) < 0.1 once D > ln(10)/2: fringes below 10% contrast.
    if (out.d < d_threshold && std::abs(out.abar) > d_threshold)
      out.classification = CatClass::yscs_like;
    else if (out.d > std::numbers::ln10 / 2.0)
      out.classification = CatClass::mixture_like;
    else
      out.classification = CatClass::intermediate;
  } else {
    out.classification = CatClass::intermediate;
  }
  return out;
}

void GridSpec::validate() const {
  if (nx < 2 || ny < 2) throw PreconditionError("grid needs at least 2 points per axis");
  if (!(x_max > x_min) || !(y_max > y_min)) throw PreconditionError("grid range is empty");
}

double GridSpec::dx() const { return (x_max - x_min) / static_cast<double>(nx - 1); }
double GridSpec::dy() const { return (y_max - y_min) / static_cast<double>(ny - 1); }
double GridSpec::x(std::size_t ix) const { return x_min + dx() * static_cast<double>(ix); }
double GridSpec::y(std::size_t iy) const { return y_min + dy() * static_cast<double>(iy); }

double WignerGrid::integral() const {
  detail::CompensatedSum<double> sum;
  for (double w : values) sum.add(w);
  return sum.value() * grid.dx() * grid.dy();
}

double WignerGrid::min() const { return *std::min_element(values.begin(), values.end()); }
double WignerGrid::max() const { return *std::max_element(values.begin(), values.end()); }

WignerGrid wigner_grid(const CouplerParams& params, const InputAmplitudes& input, Mode mode,
                       double t, const GridSpec& grid, const SeriesControl& ctl, unsigned threads) {
  grid.validate();
  WignerGrid out;
  out.grid = grid;
  out.mode = mode;
  out.t = t;
  out.values.resize(grid.nx * grid.ny);
  parallel_for(out.values.size(), threads, [&](std::size_t i) {
    const std::size_t ix = i / grid.ny;
    const std::size_t iy = i % grid.ny;
    out.values[i] = wigner(params, input, mode, {grid.x(ix), grid.y(iy)}, t, ctl);
  });
  return out;
}

}  // namespace kcoupler
