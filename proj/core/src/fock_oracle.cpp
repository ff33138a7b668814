#include "kcoupler/fock_oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <numbers>
#include <ostream>

#include <Eigen/Eigenvalues>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/laguerre.hpp>
#include <nlohmann/json.hpp>

#include "kcoupler/parallel.hpp"

namespace kcoupler {

namespace {

using ldouble = long double;

double poisson_pmf(double epsilon, int n) {
  if (epsilon == 0.0) return n == 0 ? 1.0 : 0.0;
  return std::exp(-epsilon + n * std::log(epsilon) - std::lgamma(n + 1.0));
}

// Lowers mode `j` (0-based) once: block n -> block n - 1, amplitude * sqrt(n_j).
std::vector<Eigen::VectorXcd> lower(const std::vector<Eigen::VectorXcd>& blocks, int j) {
  std::vector<Eigen::VectorXcd> out(blocks.size());
  for (std::size_t n = 0; n < blocks.size(); ++n) {
    if (blocks[n].size() == 0) continue;
    const int nn = static_cast<int>(n);
    if (nn == 0) continue;
    const FockBlockBasis from{nn};
    const FockBlockBasis to{nn - 1};
    if (out[n - 1].size() == 0) out[n - 1] = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(to.size()));
    for (std::size_t i = 0; i < from.size(); ++i) {
      auto s = from.state(i);
      if (s[static_cast<std::size_t>(j)] == 0) continue;
      const double f = std::sqrt(static_cast<double>(s[static_cast<std::size_t>(j)]));
      --s[static_cast<std::size_t>(j)];
      out[n - 1][static_cast<Eigen::Index>(to.index(s[0], s[1]))] +=
          f * blocks[n][static_cast<Eigen::Index>(i)];
    }
  }
  return out;
}

std::uint64_t le64(double v) {
  std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
  if constexpr (std::endian::native == std::endian::big) {
    std::uint64_t r = 0;
    for (int i = 0; i < 8; ++i) r = (r << 8) | ((bits >> (8 * i)) & 0xffu);
    bits = r;
  }
  return bits;
}

}  // namespace

OracleParams OracleParams::from(const CouplerParams& p) {
  OracleParams op;
  op.chi_self = {p.chi(), p.chi(), p.chi()};
  op.chi_cross = {2.0 * p.chi(), 2.0 * p.chi(), 2.0 * p.chi()};
  op.lambda1 = p.lambda1();
  op.lambda2 = p.lambda2();
  return op;
}

bool OracleParams::compensated(double tol) const {
  const double chi = chi_self[0];
  for (double c : chi_self)
    if (std::abs(c - chi) > tol) return false;
  for (double c : chi_cross)
    if (std::abs(c - 2.0 * chi) > tol) return false;
  return true;
}

FockCutoff::FockCutoff(int n_tot) : n_tot_(n_tot) {
  if (n_tot < 0) throw PreconditionError("cutoff must be non-negative");
}

FockCutoff FockCutoff::for_epsilon(double epsilon, double tail) {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw PreconditionError("invalid epsilon");
  int n = 0;
  while (FockCutoff(n).tail(epsilon) >= tail) ++n;
  return FockCutoff(n);
}

double FockCutoff::tail(double epsilon) const {
  if (epsilon == 0.0) return 0.0;
  // P(Poisson(eps) > n) equals the regularized lower incomplete gamma P(n + 1, eps).
  return boost::math::gamma_p(static_cast<double>(n_tot_) + 1.0, epsilon);
}

void FockCutoff::validate(double epsilon, double limit) const {
  if (tail(epsilon) >= limit)
    throw PreconditionError("cutoff too small: Poisson tail exceeds " + std::to_string(limit));
}

std::array<int, 3> FockBlockBasis::state(std::size_t idx) const {
  int n1 = 0;
  std::size_t offset = 0;
  while (offset + static_cast<std::size_t>(n - n1 + 1) <= idx) {
    offset += static_cast<std::size_t>(n - n1 + 1);
    ++n1;
  }
  const int n2 = static_cast<int>(idx - offset);
  return {n1, n2, n - n1 - n2};
}

Eigen::MatrixXd build_block_hamiltonian(const OracleParams& op, int n) {
  if (n < 0) throw PreconditionError("block index must be non-negative");
  const FockBlockBasis basis{n};
  const auto dim = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const auto [n1, n2, n3] = basis.state(i);
    const auto ii = static_cast<Eigen::Index>(i);
    h(ii, ii) = op.chi_self[0] * n1 * (n1 - 1) + op.chi_self[1] * n2 * (n2 - 1) +
                op.chi_self[2] * n3 * (n3 - 1) + op.chi_cross[0] * n1 * n2 +
                op.chi_cross[1] * n1 * n3 + op.chi_cross[2] * n2 * n3;
    // a1 a2^+ |n1, n2, n3> = sqrt(n1 (n2 + 1)) |n1 - 1, n2 + 1, n3>; the
    // Hermitian partner fills the transposed entry.
    if (n1 > 0) {
      const auto j12 = static_cast<Eigen::Index>(basis.index(n1 - 1, n2 + 1));
      const double a12 = op.lambda1 * std::sqrt(static_cast<double>(n1) * (n2 + 1));
      h(j12, ii) += a12;
      h(ii, j12) += a12;
      const auto j13 = static_cast<Eigen::Index>(basis.index(n1 - 1, n2));
      const double a13 = op.lambda2 * std::sqrt(static_cast<double>(n1) * (n3 + 1));
      h(j13, ii) += a13;
      h(ii, j13) += a13;
    }
  }
  return h;
}

double TruncatedState::norm_squared() const {
  double s = 0.0;
  for (const auto& b : blocks) s += b.squaredNorm();
  return s;
}

cplx TruncatedState::amplitude(int n1, int n2, int n3) const {
  const int n = n1 + n2 + n3;
  if (n1 < 0 || n2 < 0 || n3 < 0 || n > n_tot) return {0.0, 0.0};
  return blocks[static_cast<std::size_t>(n)][static_cast<Eigen::Index>(FockBlockBasis{n}.index(n1, n2))];
}

FockEvolver::FockEvolver(const OracleParams& op, const InputAmplitudes& input,
                         const FockCutoff& cutoff, unsigned threads)
    : op_(op), cutoff_(cutoff), epsilon_(input.epsilon()) {
  cutoff_.validate(epsilon_);
  const int n_tot = cutoff_.n_tot();
  const auto count = static_cast<std::size_t>(n_tot + 1);

  // Single-mode coherent amplitudes e^{-|a|^2/2} a^n / sqrt(n!).
  std::array<std::vector<cplx>, 3> coeff;
  for (std::size_t j = 0; j < 3; ++j) {
    const cplx a = input.alpha[j];
    coeff[j].resize(count);
    coeff[j][0] = std::exp(-0.5 * std::norm(a));
    for (std::size_t n = 1; n < count; ++n)
      coeff[j][n] = coeff[j][n - 1] * a / std::sqrt(static_cast<double>(n));
  }

  vectors_.resize(count);
  energies_.resize(count);
  initial_.resize(count);
  projected_.resize(count);
  parallel_for(count, threads, [&](std::size_t n) {
    const FockBlockBasis basis{static_cast<int>(n)};
    Eigen::VectorXcd psi(static_cast<Eigen::Index>(basis.size()));
    for (std::size_t i = 0; i < basis.size(); ++i) {
      const auto [n1, n2, n3] = basis.state(i);
      psi[static_cast<Eigen::Index>(i)] = coeff[0][static_cast<std::size_t>(n1)] *
                                          coeff[1][static_cast<std::size_t>(n2)] *
                                          coeff[2][static_cast<std::size_t>(n3)];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(
        build_block_hamiltonian(op_, static_cast<int>(n)));
    if (eig.info() != Eigen::Success) throw SeriesNotConverged("block diagonalization failed");
    vectors_[n] = eig.eigenvectors();
    energies_[n] = eig.eigenvalues();
    initial_[n] = psi;
    projected_[n] = vectors_[n].transpose().cast<cplx>() * psi;
  });
}

TruncatedState FockEvolver::initial_state() const {
  TruncatedState s;
  s.n_tot = cutoff_.n_tot();
  s.params = op_;
  s.blocks = initial_;
  return s;
}

TruncatedState FockEvolver::evolve(double t) const {
  TruncatedState s;
  s.n_tot = cutoff_.n_tot();
  s.t = t;
  s.params = op_;
  s.blocks.resize(projected_.size());
  for (std::size_t n = 0; n < projected_.size(); ++n) {
    Eigen::VectorXcd c = projected_[n];
    for (Eigen::Index k = 0; k < c.size(); ++k) c[k] *= std::polar(1.0, -energies_[n][k] * t);
    s.blocks[n] = vectors_[n].cast<cplx>() * c;
  }
  return s;
}

TruncatedState evolve(const OracleParams& op, const InputAmplitudes& input,
                      const FockCutoff& cutoff, double t) {
  return FockEvolver(op, input, cutoff, 1).evolve(t);
}

OracleMoment oracle_moment(const TruncatedState& state, const MomentSpec& spec, double epsilon) {
  auto apply = [&](const std::array<unsigned, 3>& powers) {
    std::vector<Eigen::VectorXcd> v = state.blocks;
    for (int j = 0; j < 3; ++j)
      for (unsigned k = 0; k < powers[static_cast<std::size_t>(j)]; ++k) v = lower(v, j);
    return v;
  };
  const auto bra = apply(spec.n);
  const auto ket = apply(spec.m);
  cplx value{0.0, 0.0};
  for (std::size_t b = 0; b < bra.size(); ++b)
    if (bra[b].size() != 0 && ket[b].size() != 0) value += bra[b].dot(ket[b]);

  // Block N of the exact state has squared norm Poisson(eps; N), and
  // ||A^m restricted to block N|| <= N^{|m|/2}. Pairs (N, N') not fully inside
  // the cutoff bound the missing part.
  const int sn = static_cast<int>(spec.n[0] + spec.n[1] + spec.n[2]);
  const int sm = static_cast<int>(spec.m[0] + spec.m[1] + spec.m[2]);
  double bound = 0.0;
  const int n_tot = state.n_tot;
  const int upper = n_tot + 64 + static_cast<int>(8.0 * std::sqrt(epsilon + 1.0) + 4.0 * epsilon);
  for (int big = std::max(0, sm); big <= upper; ++big) {
    const int other = big - sm + sn;
    if (other < 0) continue;
    if (big <= n_tot && other <= n_tot) continue;
    bound += std::sqrt(poisson_pmf(epsilon, big) * poisson_pmf(epsilon, other)) *
             std::pow(static_cast<double>(big), 0.5 * sm) *
             std::pow(static_cast<double>(other), 0.5 * sn);
  }
  return {value, bound};
}

SqueezingResult oracle_squeezing(const TruncatedState& state, const QuadratureSelection& sel,
                                 double epsilon) {
  auto mom = [&](const MomentSpec& s) { return oracle_moment(state, s, epsilon).value; };
  double s_sum = 0.0;
  double q_sum = 0.0;
  double mean_re = 0.0;
  double mean_im = 0.0;
  for (Mode j : sel.modes()) {
    MomentSpec first;
    first.m[j.index()] = 1;
    const cplx a = mom(first);
    mean_re += a.real();
    mean_im += a.imag();
    for (Mode k : sel.modes()) {
      MomentSpec aa;
      ++aa.m[j.index()];
      ++aa.m[k.index()];
      MomentSpec ad;
      ad.n[j.index()] = 1;
      ++ad.m[k.index()];
      const double re_aa = mom(aa).real();
      const double re_ad = mom(ad).real();
      s_sum += 2.0 * re_aa + 2.0 * re_ad;
      q_sum += -2.0 * re_aa + 2.0 * re_ad;
    }
  }
  SqueezingResult r;
  r.s = s_sum - 4.0 * mean_re * mean_re;
  r.q = q_sum - 4.0 * mean_im * mean_im;
  r.t = state.t;
  r.c_n = sel.c_n();
  return r;
}

ReducedDensity reduce(const TruncatedState& state, Mode mode) {
  const int n_tot = state.n_tot;
  const auto dim = static_cast<Eigen::Index>(n_tot + 1);
  ReducedDensity out;
  out.mode = mode;
  out.rho = Eigen::MatrixXcd::Zero(dim, dim);
  const std::size_t j = mode.index();
  // The two traced modes, in increasing order.
  std::array<std::size_t, 2> others{};
  for (std::size_t k = 0, w = 0; k < 3; ++k)
    if (k != j) others[w++] = k;

  Eigen::VectorXcd v(dim);
  for (int r = 0; r <= n_tot; ++r) {
    for (int p = 0; p <= r; ++p) {
      const int q = r - p;
      v.setZero();
      for (int a = 0; a + r <= n_tot; ++a) {
        std::array<int, 3> s{};
        s[j] = a;
        s[others[0]] = p;
        s[others[1]] = q;
        v[a] = state.amplitude(s[0], s[1], s[2]);
      }
      out.rho.noalias() += v * v.adjoint();
    }
  }
  return out;
}

double oracle_purity(const ReducedDensity& rho) {
  return (rho.rho * rho.rho).trace().real();
}

double oracle_wigner(const ReducedDensity& rho, cplx beta) {
  const auto dim = static_cast<int>(rho.rho.rows());
  const ldouble b2 = std::norm(beta);
  const ldouble x = 4.0L * b2;
  const ldouble log_2b = std::log(2.0L * std::sqrt(b2));
  const ldouble arg = std::arg(beta);
  ldouble sum = 0.0L;
  ldouble magnitude = 0.0L;
  for (int m = 0; m < dim; ++m) {
    const ldouble sign = (m % 2 == 0) ? 1.0L : -1.0L;
    const ldouble diag = sign * rho.rho(m, m).real() * boost::math::laguerre(m, x);
    sum += diag;
    magnitude += std::abs(diag);
    if (b2 == 0.0L) continue;
    for (int n = m + 1; n < dim; ++n) {
      const cplx r = rho.rho(m, n);
      if (r == cplx{0.0, 0.0}) continue;
      const int k = n - m;
      // (2 beta)^k sqrt(m! / n!)
      const ldouble mag = std::exp(k * log_2b + 0.5L * (std::lgamma(m + 1.0L) - std::lgamma(n + 1.0L)));
      const ldouble lag = boost::math::laguerre(static_cast<unsigned>(m), static_cast<unsigned>(k), x);
      const std::complex<ldouble> phase = std::polar(1.0L, k * arg);
      const std::complex<ldouble> term =
          std::complex<ldouble>(r.real(), r.imag()) * phase * (sign * mag * lag);
      sum += 2.0L * term.real();
      magnitude += 2.0L * std::abs(term);
    }
  }
  const ldouble prefactor = 2.0L / std::numbers::pi_v<ldouble> * std::exp(-2.0L * b2);
  const ldouble rounding = prefactor * magnitude * 1e-15L * dim;
  if (!(rounding < 1e-6L)) throw PreconditionError("beta outside trusted region");
  return static_cast<double>(prefactor * sum);
}

void write_state_header_json(std::ostream& out, const TruncatedState& state) {
  nlohmann::ordered_json h;
  h["format"] = "kcoupler-fock-state";
  h["version"] = 1;
  h["t"] = state.t;
  h["n_tot"] = state.n_tot;
  h["chi_self"] = state.params.chi_self;
  h["chi_cross"] = state.params.chi_cross;
  h["lambda1"] = state.params.lambda1;
  h["lambda2"] = state.params.lambda2;
  h["ordering"] =
      "blocks n = 0..n_tot; within a block (n1, n2, n3) lexicographic with n1 + n2 + n3 = n";
  h["dtype"] = "complex float64-le (re, im)";
  out << h.dump(2) << '\n';
}

void write_state_binary(std::ostream& out, const TruncatedState& state) {
  for (const auto& b : state.blocks) {
    for (Eigen::Index i = 0; i < b.size(); ++i) {
      for (double v : {b[i].real(), b[i].imag()}) {
        const std::uint64_t bits = le64(v);
        char bytes[8];
        std::memcpy(bytes, &bits, 8);
        out.write(bytes, 8);
      }
    }
  }
}

}  // namespace kcoupler
