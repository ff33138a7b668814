#include "kcoupler/purity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <boost/math/special_functions/legendre.hpp>

#include "kcoupler/parallel.hpp"
#include "kernels.hpp"
#include "series_util.hpp"

namespace kcoupler {

namespace {

using ldouble = long double;

constexpr double kCancellationLimit = 1e6;
constexpr double kRimTolerance = 1e-12;
const double kGaussianReach = std::sqrt(-std::log(1e-14));
// The series stop rule is relative to the summed term mass, which far exceeds
// |C| out in the Gaussian tail; the integrand needs absolute accuracy there.
constexpr double kIntegrandRelTol = 1e-14;

// One shell of the triple series: all terms with n1 + m1 = order.
struct Shell {
  ldouble sum = 0.0L;
  ldouble mass = 0.0L;
  ldouble largest = 0.0L;
};

class PuritySeries {
 public:
  PuritySeries(double x, double epsilon, double chi_t)
      : log_x_(x > 0.0 ? std::log(static_cast<ldouble>(x)) : 0.0L),
        zero_(x == 0.0),
        epsilon_(epsilon),
        chi_t_(chi_t) {}

  Shell shell(int order) {
    Shell out;
    if (zero_) {
      if (order == 0) out.sum = out.mass = out.largest = 1.0L;
      return out;
    }
    const ldouble n_fact = lgamma_(order);
    const ldouble base = n_fact + order * log_x_;
    detail::CompensatedSum<ldouble> acc;
    auto add = [&](ldouble term) {
      acc.add(term);
      out.mass += std::abs(term);
      out.largest = std::max(out.largest, std::abs(term));
    };
    for (int m1 = 0; m1 <= order; ++m1) {
      const int n1 = order - m1;
      // Diagonal part: (n1 + m1)! x^N (-1)^N / (n1! m1!)^2.
      const ldouble diag = std::exp(base - 2.0L * (lgamma_(n1) + lgamma_(m1)));
      add(order % 2 == 0 ? diag : -diag);
      // Off-diagonal part, m2 < m1.
      for (int m2 = 0; m2 < m1; ++m2) {
        const int k = m2 - m1;
        const ldouble mag =
            std::exp(base - lgamma_(n1) - lgamma_(m1) - lgamma_(m2) - lgamma_(order - m2));
        const ldouble s = std::sin(detail::reduce_mod_pi(chi_t_, k));
        const ldouble damp = std::exp(-4.0L * epsilon_ * s * s);
        // psi = 2 chi t (m2 - m1)(m2 - n1); cos(psi) depends on 2 chi t mod 2 pi only.
        const long long psi_k = static_cast<long long>(k) * static_cast<long long>(m2 - n1);
        const ldouble psi = 2.0L * detail::reduce_mod_pi(chi_t_, psi_k);
        const ldouble term = 2.0L * mag * damp * std::cos(psi);
        add((n1 + m2) % 2 == 0 ? term : -term);
      }
    }
    out.sum = acc.value();
    return out;
  }

 private:
  ldouble lgamma_(int n) {
    while (static_cast<int>(log_fact_.size()) <= n) {
      const auto m = static_cast<ldouble>(log_fact_.size());
      log_fact_.push_back(log_fact_.empty() ? 0.0L : log_fact_.back() + std::log(m));
    }
    return log_fact_[static_cast<std::size_t>(n)];
  }

  ldouble log_x_;
  bool zero_;
  ldouble epsilon_;
  double chi_t_;
  std::vector<ldouble> log_fact_;
};

// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  const std::vector<double> zeros = boost::math::legendre_p_zeros<double>(n);
  nodes.clear();
  weights.clear();
  auto push = [&](double x) {
    const double dp = boost::math::legendre_p_prime<double>(n, x);
    nodes.push_back(x);
    weights.push_back(2.0 / ((1.0 - x * x) * dp * dp));
  };
  for (double z : zeros) {
    if (z == 0.0) {
      push(0.0);
    } else {
      push(z);
      push(-z);
    }
  }
}

}  // namespace

std::string_view to_string(PurityMethod m) {
  switch (m) {
    case PurityMethod::series: return "series";
    case PurityMethod::quadrature: return "quadrature";
    case PurityMethod::oracle: return "oracle";
  }
  return "unknown";
}

PurityResult purity_series(const CouplerParams& params, const InputAmplitudes& input, Mode mode,
                           double t, const SeriesControl& ctl) {
  ctl.validate();
  const cplx abar = evolve_amplitudes(params, input, t)[mode];
  PuritySeries series(std::norm(abar), input.epsilon(), params.chi() * t);

  detail::CompensatedSum<ldouble> total;
  ldouble largest = 0.0L;
  int quiet = 0;
  for (int order = 0;; ++order) {
    if (order > ctl.max_terms) throw SeriesNotConverged();
    const Shell sh = series.shell(order);
    total.add(sh.sum);
    largest = std::max(largest, sh.largest);
    const ldouble running = std::abs(total.value());
    quiet = (sh.mass < ctl.rel_tol * running) ? quiet + 1 : 0;
    if (quiet >= 2) break;
  }

  const ldouble value = total.value();
  if (!(std::abs(value) > 0.0L) || largest / std::abs(value) > kCancellationLimit)
    return purity_quadrature(params, input, mode, t, {}, ctl);
  if (!(value > 0.0L) || value > 1.0L + 1e-9L) throw SeriesNotConverged("purity outside (0, 1]");
  return {static_cast<double>(value), mode, t, PurityMethod::series};
}

PurityResult purity_quadrature(const CouplerParams& params, const InputAmplitudes& input,
                               Mode mode, double t, const QuadratureGrid& grid,
                               const SeriesControl& ctl) {
  ctl.validate();
  if (grid.radial < 2 || grid.angular < 4 || grid.angular % 2 != 0)
    throw PreconditionError("quadrature grid needs >= 2 radial and an even number >= 4 of angles");
  const cplx abar = evolve_amplitudes(params, input, t)[mode];
  const double reach = 2.0 * std::abs(abar);
  const double zeta_max = grid.zeta_max > 0.0 ? grid.zeta_max : reach + kGaussianReach;
  const double gap = zeta_max - reach;
  if (gap <= 0.0 || std::exp(-gap * gap) > kRimTolerance)
    throw PreconditionError("quadrature domain too small");

  SeriesControl integrand_ctl = ctl;
  integrand_ctl.rel_tol = std::min(ctl.rel_tol, kIntegrandRelTol);

  std::vector<double> nodes, weights;
  gauss_legendre(grid.radial, nodes, weights);
  const double eps = input.epsilon();
  const double chi_t = params.chi() * t;
  // |C(-zeta)| = |C(zeta)|, so half a turn of angles suffices.
  const int half = grid.angular / 2;
  const double dtheta = std::numbers::pi / half;

  std::vector<double> ring(nodes.size());
  parallel_for(nodes.size(), grid.threads, [&](std::size_t i) {
    const double rho = 0.5 * zeta_max * (nodes[i] + 1.0);
    detail::CompensatedSum<double> acc;
    for (int a = 0; a < half; ++a) {
      const cplx zeta = std::polar(rho, dtheta * a);
      acc.add(std::norm(detail::characteristic_series(abar, eps, chi_t, zeta, integrand_ctl)));
    }
    ring[i] = acc.value() * 2.0 * dtheta * rho * weights[i] * 0.5 * zeta_max;
  });
  detail::CompensatedSum<double> total;
  for (double r : ring) total.add(r);
  return {total.value() / std::numbers::pi, mode, t, PurityMethod::quadrature};
}

DisentanglementReport disentanglement_report(const CouplerParams& params, double t_max,
                                             double tol) {
  if (!(t_max > 0.0)) throw PreconditionError("t_max must be positive");
  if (!(tol > 0.0)) throw PreconditionError("tol must be positive");
  constexpr double pi = std::numbers::pi;
  const double chi = params.chi();
  DisentanglementReport out;
  for (long long m = 1; m * pi / chi <= t_max; ++m) out.coherent_times.push_back(m * pi / chi);

  // Best rational p/q to mu/chi with q <= 64, from the continued fraction.
  const double r = params.mu() / chi;
  long long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double x = r;
  for (int iter = 0; iter < 64; ++iter) {
    const double a = std::floor(x);
    const long long ai = static_cast<long long>(a);
    const long long p2 = ai * p1 + p0;
    const long long q2 = ai * q1 + q0;
    if (q2 > 64) break;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    if (std::abs(r - static_cast<double>(p1) / static_cast<double>(q1)) < tol) {
      out.commensurate = true;
      break;
    }
    const double frac = x - a;
    if (frac <= 0.0) break;
    x = 1.0 / frac;
  }
  if (!out.commensurate) return out;
  out.ratio_numerator = p1;
  out.ratio_denominator = q1;

  // chi t = m pi and mu t = 2 m' pi  <=>  m p / q = 2 m'. With gcd(p, q) = 1
  // this needs q | m and m p / q even.
  const long long step = (p1 % 2 == 0) ? q1 : 2 * q1;
  for (long long k = 1; k * step * pi / chi <= t_max; ++k)
    out.revival_times.push_back(static_cast<double>(k * step) * pi / chi);
  return out;
}

std::pair<double, double> mean_photon_pair(const CouplerParams& params,
                                           const InputAmplitudes& input, double t) {
  constexpr double tol = 1e-12;
  const cplx a1 = input.alpha[0];
  const cplx a = input.alpha[1];
  const double scale = std::max({1.0, std::abs(a1), std::abs(a)});
  const bool equal_couplings =
      std::abs(params.lambda1() - params.lambda2()) <= tol * std::max(1.0, params.mu());
  const bool equal_side_inputs = std::abs(input.alpha[1] - input.alpha[2]) <= tol * scale;
  const bool in_phase = std::abs((a1 * std::conj(a)).imag()) <= tol * scale * scale;
  if (!equal_couplings || !equal_side_inputs || !in_phase)
    throw PreconditionError("special case only");
  const double c = std::cos(params.mu() * t);
  const double s = std::sin(params.mu() * t);
  const double n1 = std::norm(a1);
  const double n = std::norm(a);
  return {n1 * c * c + 2.0 * n * s * s, n * c * c + 0.5 * n1 * s * s};
}

}  // namespace kcoupler
