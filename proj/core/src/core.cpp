#include "kcoupler/core.hpp"

#include <cmath>
#include <numbers>

#include "kernels.hpp"

namespace kcoupler {

namespace detail {

long double reduce_mod_pi(long double x, long long k) {
  constexpr long double pi = std::numbers::pi_v<long double>;
  long double r = std::fmod(x, pi);
  return std::fmod(r * static_cast<long double>(k), pi);
}

}  // namespace detail

namespace {

using detail::reduce_mod_pi;

cplx ipow(cplx base, unsigned e) {
  cplx result{1.0, 0.0};
  while (e != 0) {
    if (e & 1U) result *= base;
    base *= base;
    e >>= 1U;
  }
  return result;
}

// abar^{*n} abar^{m}; the common |abar|^{2 min(n,m)} part is taken as a real
// power so that equal exponents give a real result with no rounding residue.
cplx conj_power_product(cplx a, unsigned n, unsigned m) {
  const unsigned common = n < m ? n : m;
  const double modulus = std::pow(std::norm(a), static_cast<double>(common));
  if (m > n) return modulus * ipow(a, m - n);
  if (n > m) return modulus * ipow(std::conj(a), n - m);
  return {modulus, 0.0};
}

// Second-waveguide row of the propagator applied to amplitudes. Written once
// so that modes 2 and 3 are computed by literally the same expression.
cplx second_waveguide(cplx own, cplx other, cplx fundamental, double own_lambda,
                      double other_lambda, double mu, double mu_t) {
  const double half = std::sin(0.5 * mu_t);
  const double half_sq = half * half;
  const double mu_sq = mu * mu;
  return own * (1.0 - 2.0 * own_lambda * own_lambda / mu_sq * half_sq) -
         2.0 * own_lambda * other_lambda * other / mu_sq * half_sq -
         cplx{0.0, 1.0} * own_lambda * fundamental / mu * std::sin(mu_t);
}

}  // namespace

CouplerParams::CouplerParams(double chi, double lambda1, double lambda2)
    : chi_(chi), lambda1_(lambda1), lambda2_(lambda2), mu_(std::hypot(lambda1, lambda2)) {
  if (!std::isfinite(chi) || !std::isfinite(lambda1) || !std::isfinite(lambda2))
    throw PreconditionError("coupler constants must be finite");
  if (chi <= 0.0) throw PreconditionError("chi must be positive");
  if (lambda1 < 0.0 || lambda2 < 0.0) throw PreconditionError("lambda1, lambda2 must be >= 0");
}

double InputAmplitudes::epsilon() const {
  return std::norm(alpha[0]) + std::norm(alpha[1]) + std::norm(alpha[2]);
}

long long MomentSpec::h1() const {
  long long h = 0;
  for (int j = 0; j < 3; ++j) {
    const long long mj = m[j];
    const long long nj = n[j];
    h += (mj * (mj - 1) - nj * (nj - 1)) / 2;
  }
  h += static_cast<long long>(m[0]) * (m[1] + m[2]) + static_cast<long long>(m[1]) * m[2];
  h -= static_cast<long long>(n[0]) * (n[1] + n[2]) + static_cast<long long>(n[1]) * n[2];
  return h;
}

long long MomentSpec::h2() const {
  return static_cast<long long>(m[0]) + m[1] + m[2] - n[0] - n[1] - n[2];
}

MomentSpec MomentSpec::number(Mode mode, unsigned power) {
  MomentSpec spec;
  spec.n[mode.index()] = power;
  spec.m[mode.index()] = power;
  return spec;
}

cplx kerr_phase(double chi_t, long long k) {
  // exp(-2i chi t k), 2 chi t k taken modulo 2 pi.
  const long double r = reduce_mod_pi(chi_t, k);
  const double angle = static_cast<double>(-2.0L * r);
  return {std::cos(angle), std::sin(angle)};
}

cplx kerr_damping(double epsilon, double chi_t, long long k) {
  if (k == 0) return {1.0, 0.0};
  const double x = static_cast<double>(reduce_mod_pi(chi_t, k));
  const double s = std::sin(x);
  return std::exp(-2.0 * epsilon * s * s) * cplx{std::cos(epsilon * std::sin(2.0 * x)),
                                                 -std::sin(epsilon * std::sin(2.0 * x))};
}

PropagatorMatrix propagator(const CouplerParams& params, double t) {
  PropagatorMatrix p;
  p.t = t;
  const double mu = params.mu();
  if (mu == 0.0) {
    p.u = Eigen::Matrix3cd::Identity();
    return p;
  }
  const double l1 = params.lambda1();
  const double l2 = params.lambda2();
  const double mu_t = mu * t;
  const double s = std::sin(mu_t);
  const double half = std::sin(0.5 * mu_t);
  const double half_sq = half * half;
  const double mu_sq = mu * mu;
  const cplx i{0.0, 1.0};

  p.u(0, 0) = std::cos(mu_t);
  p.u(0, 1) = -i * l1 * s / mu;
  p.u(0, 2) = -i * l2 * s / mu;
  p.u(1, 0) = -i * l1 * s / mu;
  p.u(1, 1) = 1.0 - 2.0 * l1 * l1 / mu_sq * half_sq;
  p.u(1, 2) = -2.0 * l1 * l2 / mu_sq * half_sq;
  p.u(2, 0) = -i * l2 * s / mu;
  p.u(2, 1) = -2.0 * l1 * l2 / mu_sq * half_sq;
  p.u(2, 2) = 1.0 - 2.0 * l2 * l2 / mu_sq * half_sq;
  return p;
}

EvolvedAmplitudes evolve_amplitudes(const CouplerParams& params, const InputAmplitudes& input,
                                    double t) {
  const auto& a = input.alpha;
  const double mu = params.mu();
  if (mu == 0.0) return {a};

  const double l1 = params.lambda1();
  const double l2 = params.lambda2();
  const double mu_t = mu * t;
  const cplx i{0.0, 1.0};

  EvolvedAmplitudes out;
  out.abar[0] = a[0] * std::cos(mu_t) - i * (l1 * a[1] + l2 * a[2]) * std::sin(mu_t) / mu;
  out.abar[1] = second_waveguide(a[1], a[2], a[0], l1, l2, mu, mu_t);
  out.abar[2] = second_waveguide(a[2], a[1], a[0], l2, l1, mu, mu_t);
  return out;
}

cplx moment(const EvolvedAmplitudes& abar, double epsilon, double chi_t, const MomentSpec& spec) {
  cplx amplitude{1.0, 0.0};
  for (std::size_t j = 0; j < 3; ++j)
    amplitude *= conj_power_product(abar.abar[j], spec.n[j], spec.m[j]);
  return amplitude * kerr_phase(chi_t, spec.h1()) * kerr_damping(epsilon, chi_t, spec.h2());
}

cplx moment(const CouplerParams& params, const InputAmplitudes& input, const MomentSpec& spec,
            double t) {
  return moment(evolve_amplitudes(params, input, t), input.epsilon(), params.chi() * t, spec);
}

double mean_photon(const CouplerParams& params, const InputAmplitudes& input, Mode mode, double t) {
  return std::norm(evolve_amplitudes(params, input, t)[mode]);
}

}  // namespace kcoupler
