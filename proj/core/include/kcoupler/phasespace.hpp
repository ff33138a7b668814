#pragma once

// Single-mode phase-space quantities: the symmetric characteristic function
// C_j(zeta) = <exp(zeta A_j^+ - zeta^* A_j)>, the Wigner function W_j(beta),
// and the cat-state description valid at half-integer Kerr phase.

#include <cstddef>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "kcoupler/core.hpp"

namespace kcoupler {

/// Truncation policy shared by the infinite series of this library.
struct SeriesControl {
  double rel_tol = 1e-10;
  int max_terms = 512;  // cap on each summation index

  void validate() const;
};

struct WignerEvaluation {
  double value = 0.0;
  double imag_residue = 0.0;  // |Im| of the paired sum, scaled like value
  int anti_diagonals = 0;
};

cplx characteristic_function(const CouplerParams& params, const InputAmplitudes& input, Mode mode,
                             cplx zeta, double t, const SeriesControl& ctl = {});

/// Normally ordered double series with associated Laguerre polynomials.
/// Only n2 >= n1 terms are summed; the n2 < n1 half is their complex conjugate.
WignerEvaluation wigner_detailed(const CouplerParams& params, const InputAmplitudes& input,
                                 Mode mode, cplx beta, double t, const SeriesControl& ctl = {});

double wigner(const CouplerParams& params, const InputAmplitudes& input, Mode mode, cplx beta,
              double t, const SeriesControl& ctl = {});

/// Three-term cat-state form, valid when chi t = (m + 1/2) pi.
double cat_wigner_closed_form(const CouplerParams& params, const InputAmplitudes& input, Mode mode,
                              cplx beta, double t);

/// D_j = eps - |abar_j(t)|^2: photon number carried by the other two modes.
/// exp(-2 D_j) is the surviving interference contrast of the cat state.
double d_parameter(const CouplerParams& params, const InputAmplitudes& input, Mode mode, double t);

enum class CatClass { coherent, yscs_like, mixture_like, intermediate };

std::string_view to_string(CatClass c);

struct CatStateDescriptor {
  Mode mode{1};
  cplx abar;
  double d = 0.0;
  CatClass classification = CatClass::intermediate;
};

CatStateDescriptor classify_state(const CouplerParams& params, const InputAmplitudes& input,
                                  Mode mode, double t, double d_threshold = 0.1);

/// True when chi t is within tol of an integer multiple of pi (offset 0) or of
/// (m + 1/2) pi (offset 0.5).
bool kerr_phase_is(double chi_t, double offset, double tol = 1e-9);

struct GridSpec {
  double x_min = -3.0;
  double x_max = 3.0;
  double y_min = -3.0;
  double y_max = 3.0;
  std::size_t nx = 61;
  std::size_t ny = 61;

  void validate() const;
  double x(std::size_t ix) const;
  double y(std::size_t iy) const;
  double dx() const;
  double dy() const;
};

/// Wigner values on a rectangular grid. values is row-major nx x ny:
/// values[ix * ny + iy] = W(x_ix + i y_iy).
struct WignerGrid {
  GridSpec grid;
  std::vector<double> values;
  Mode mode{1};
  double t = 0.0;

  double at(std::size_t ix, std::size_t iy) const { return values[ix * grid.ny + iy]; }
  /// Riemann sum of W dx dy.
  double integral() const;
  double min() const;
  double max() const;
};

/// Evaluates the series at every grid point. Points are split across
/// `threads` workers (0 = hardware concurrency); the result does not depend on
/// the worker count.
WignerGrid wigner_grid(const CouplerParams& params, const InputAmplitudes& input, Mode mode,
                       double t, const GridSpec& grid, const SeriesControl& ctl = {},
                       unsigned threads = 0);

// Serialization. CSV: header "x,y,w" then one row per point in storage order,
// 17 significant digits. Binary: a JSON header document plus a flat
// little-endian float64 array in storage order.
void write_wigner_csv(std::ostream& out, const WignerGrid& g);
void write_wigner_header_json(std::ostream& out, const WignerGrid& g);
void write_wigner_binary(std::ostream& out, const WignerGrid& g);
WignerGrid read_wigner_binary(std::istream& header_json, std::istream& data);

}  // namespace kcoupler
