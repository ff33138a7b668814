#pragma once

// Single-mode purity Tr rho_j^2(t) and the disentanglement/revival times.
//
// Two independent routes are provided: the closed triple series in
// |abar_j(t)|^2, and a direct quadrature of |C_j(zeta)|^2 / pi over the
// complex plane.

#include <string_view>
#include <utility>
#include <vector>

#include "kcoupler/core.hpp"
#include "kcoupler/phasespace.hpp"

namespace kcoupler {

enum class PurityMethod { series, quadrature, oracle };

std::string_view to_string(PurityMethod m);

struct PurityResult {
  double value = 1.0;
  Mode mode{1};
  double t = 0.0;
  PurityMethod method = PurityMethod::series;
};

/// Triple series summed in shells of constant total order n1 + m1. Falls back
/// to purity_quadrature when the alternating terms exceed the partial sum by
/// more than 1e6 (the series is then dominated by cancellation).
PurityResult purity_series(const CouplerParams& params, const InputAmplitudes& input, Mode mode,
                           double t, const SeriesControl& ctl = {});

/// Polar quadrature grid for |C(zeta)|^2. Radial nodes are Gauss-Legendre on
/// [0, zeta_max]; angular nodes are equally spaced (the integrand is periodic).
/// zeta_max <= 0 selects 2 |abar_j| + sqrt(-ln 1e-14): interference terms of
/// |C|^2 are centred up to |zeta| = 2 |abar_j|.
struct QuadratureGrid {
  double zeta_max = 0.0;
  int radial = 256;
  int angular = 256;
  unsigned threads = 0;
};

/// Throws PreconditionError("quadrature domain too small") when the Gaussian
/// envelope exp(-(zeta_max - 2|abar_j|)^2) at the rim exceeds 1e-12.
PurityResult purity_quadrature(const CouplerParams& params, const InputAmplitudes& input,
                               Mode mode, double t, const QuadratureGrid& grid = {},
                               const SeriesControl& ctl = {});

struct DisentanglementReport {
  /// t = m pi / chi, m >= 1: every mode is in a coherent state.
  std::vector<double> coherent_times;
  /// Times at which chi t = m pi and mu t = 2 m' pi hold together, so the
  /// whole device is back in its input state.
  std::vector<double> revival_times;
  /// mu / chi equals a rational p / q with q <= 64 within tol.
  bool commensurate = false;
  long long ratio_numerator = 0;
  long long ratio_denominator = 0;
};

DisentanglementReport disentanglement_report(const CouplerParams& params, double t_max,
                                             double tol = 1e-9);

/// (|abar_1|^2, |abar_2|^2) for lambda1 = lambda2 and alpha2 = alpha3 with
/// alpha1 and alpha2 in phase. Throws PreconditionError("special case only")
/// otherwise.
std::pair<double, double> mean_photon_pair(const CouplerParams& params,
                                           const InputAmplitudes& input, double t);

}  // namespace kcoupler
