#include "kcoupler/squeezing.hpp"

#include <algorithm>
#include <cmath>

namespace kcoupler {

namespace {

struct KerrFactors {
  double theta1;
  double theta2;
  double pair_damping;   // exp[-2 eps sin^2(2 chi t)], attached to <A_j A_k>
  double single_damping; // exp[-4 eps sin^2(chi t)], attached to <A_j><A_k>
};

KerrFactors kerr_factors(double epsilon, double chi_t) {
  const double s1 = std::sin(chi_t);
  const double s2 = std::sin(2.0 * chi_t);
  return {2.0 * chi_t + epsilon * std::sin(4.0 * chi_t), epsilon * s2,
          std::exp(-2.0 * epsilon * s2 * s2), std::exp(-4.0 * epsilon * s1 * s1)};
}

std::pair<Mode, Mode> modes_of(ModePair pair) {
  switch (pair) {
    case ModePair::p12: return {Mode(1), Mode(2)};
    case ModePair::p13: return {Mode(1), Mode(3)};
    case ModePair::p23: return {Mode(2), Mode(3)};
  }
  throw PreconditionError("unknown mode pair");
}

SqueezingResult single_from_amplitudes(cplx a, const KerrFactors& k, double t) {
  const double ax = a.real();
  const double ay = a.imag();
  const double oscillating =
      2.0 * ((ax * ax - ay * ay) * std::cos(k.theta1) + 2.0 * ax * ay * std::sin(k.theta1)) *
      k.pair_damping;
  const double mean_x = ax * std::cos(k.theta2) + ay * std::sin(k.theta2);
  const double mean_y = ax * std::sin(k.theta2) - ay * std::cos(k.theta2);
  const double base = 2.0 * ax * ax + 2.0 * ay * ay;

  SqueezingResult r;
  r.t = t;
  r.c_n = 1;
  r.s = base + oscillating - 4.0 * mean_x * mean_x * k.single_damping;
  r.q = base - oscillating - 4.0 * mean_y * mean_y * k.single_damping;
  return r;
}

SqueezingResult two_mode(const CouplerParams& params, const InputAmplitudes& input, ModePair pair,
                         double t, bool swap_phases) {
  const auto [first, second] = modes_of(pair);
  const auto abar = evolve_amplitudes(params, input, t);
  const auto k = kerr_factors(input.epsilon(), params.chi() * t);

  const auto sj = single_from_amplitudes(abar[first], k, t);
  const auto sk = single_from_amplitudes(abar[second], k, t);

  const double jx = abar.alpha_x(first), jy = abar.alpha_y(first);
  const double kx = abar.alpha_x(second), ky = abar.alpha_y(second);
  const double pair_phase = swap_phases ? k.theta2 : k.theta1;
  const double mean_phase = swap_phases ? k.theta1 : k.theta2;

  const double correlated = 2.0 *
                            ((jx * kx - jy * ky) * std::cos(pair_phase) +
                             (kx * jy + jx * ky) * std::sin(pair_phase)) *
                            k.pair_damping;
  const double normal = 2.0 * (jx * kx + jy * ky);
  const double cm = std::cos(mean_phase), sm = std::sin(mean_phase);
  const double means_x = 4.0 * (jx * cm + jy * sm) * (kx * cm + ky * sm) * k.single_damping;
  const double means_y = 4.0 * (jy * cm - jx * sm) * (ky * cm - kx * sm) * k.single_damping;

  // The bracketed expression is S/C_2; scale back to 4 Var(X) - C_2.
  SqueezingResult r;
  r.t = t;
  r.c_n = 2;
  r.s = 2.0 * (0.5 * (sj.s + sk.s) + correlated + normal - means_x);
  r.q = 2.0 * (0.5 * (sj.q + sk.q) - correlated + normal - means_y);
  return r;
}

}  // namespace

QuadratureSelection::QuadratureSelection(std::vector<Mode> modes) : modes_(std::move(modes)) {
  if (modes_.empty()) throw PreconditionError("quadrature selection must not be empty");
  std::sort(modes_.begin(), modes_.end(),
            [](Mode a, Mode b) { return a.number() < b.number(); });
  modes_.erase(std::unique(modes_.begin(), modes_.end()), modes_.end());
}

SqueezingResult squeezing_generic(const CouplerParams& params, const InputAmplitudes& input,
                                  const QuadratureSelection& sel, double t) {
  const auto abar = evolve_amplitudes(params, input, t);
  const double eps = input.epsilon();
  const double chi_t = params.chi() * t;

  double sum_re_first = 0.0;
  double sum_im_first = 0.0;
  double re_pairs = 0.0;
  double re_normal = 0.0;
  for (Mode j : sel.modes()) {
    MomentSpec first;
    first.m[j.index()] = 1;
    const cplx mean = moment(abar, eps, chi_t, first);
    sum_re_first += mean.real();
    sum_im_first += mean.imag();
    for (Mode k : sel.modes()) {
      MomentSpec pair;
      pair.m[j.index()] += 1;
      pair.m[k.index()] += 1;
      MomentSpec normal;
      normal.n[j.index()] = 1;
      normal.m[k.index()] = 1;
      re_pairs += moment(abar, eps, chi_t, pair).real();
      re_normal += moment(abar, eps, chi_t, normal).real();
    }
  }

  SqueezingResult r;
  r.t = t;
  r.c_n = sel.c_n();
  r.s = 2.0 * re_pairs + 2.0 * re_normal - 4.0 * sum_re_first * sum_re_first;
  r.q = -2.0 * re_pairs + 2.0 * re_normal - 4.0 * sum_im_first * sum_im_first;
  return r;
}

SqueezingResult single_mode_closed_form(const CouplerParams& params, const InputAmplitudes& input,
                                        Mode mode, double t) {
  const auto abar = evolve_amplitudes(params, input, t);
  return single_from_amplitudes(abar[mode], kerr_factors(input.epsilon(), params.chi() * t), t);
}

double max_single_mode_squeezing(double alpha) {
  const double eta = 4.0 * alpha * alpha;
  return -eta * std::exp(-eta);
}

SqueezingResult two_mode_closed_form(const CouplerParams& params, const InputAmplitudes& input,
                                     ModePair pair, double t) {
  return two_mode(params, input, pair, t, false);
}

SqueezingResult two_mode_closed_form_swapped_phases(const CouplerParams& params,
                                                    const InputAmplitudes& input, ModePair pair,
                                                    double t) {
  return two_mode(params, input, pair, t, true);
}

}  // namespace kcoupler
