#pragma once

// Closed-form dynamics of the three-mode codirectional Kerr coupler.
//
// All quantities live in the rotating frame A_j = a_j exp(i w_j t), so the
// carrier frequencies and the mismatches w_1 - w_2, w_1 - w_3 never appear.
// The self- and cross-Kerr constants are assumed compensated (chi_j = chi,
// cross = 2 chi); the uncompensated model exists only in fock_oracle.hpp.

#include <array>
#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace kcoupler {

using cplx = std::complex<double>;

/// Thrown when an operation's documented precondition does not hold.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when a truncated series hits its term cap before the tolerance.
class SeriesNotConverged : public std::runtime_error {
 public:
  SeriesNotConverged() : std::runtime_error("series not converged") {}
  explicit SeriesNotConverged(const std::string& what) : std::runtime_error(what) {}
};

/// One of the three guided modes, numbered 1..3 as in the optics literature.
class Mode {
 public:
  constexpr explicit Mode(int number) : number_(number) {
    if (number < 1 || number > 3) throw PreconditionError("mode must be 1, 2 or 3");
  }
  constexpr int number() const { return number_; }
  constexpr std::size_t index() const { return static_cast<std::size_t>(number_ - 1); }
  friend constexpr bool operator==(Mode, Mode) = default;

 private:
  int number_;
};

/// Kerr constant chi and the two linear couplings lambda_1 (mode 1 <-> 2) and
/// lambda_2 (mode 1 <-> 3). Rates are in inverse seconds.
class CouplerParams {
 public:
  CouplerParams(double chi, double lambda1, double lambda2);

  double chi() const { return chi_; }
  double lambda1() const { return lambda1_; }
  double lambda2() const { return lambda2_; }
  /// sqrt(lambda1^2 + lambda2^2); zero only for the uncoupled device.
  double mu() const { return mu_; }

 private:
  double chi_;
  double lambda1_;
  double lambda2_;
  double mu_;
};

/// Initial coherent amplitudes |alpha_1, alpha_2, alpha_3>.
struct InputAmplitudes {
  std::array<cplx, 3> alpha{};

  InputAmplitudes() = default;
  InputAmplitudes(cplx a1, cplx a2, cplx a3) : alpha{a1, a2, a3} {}

  cplx operator[](Mode m) const { return alpha[m.index()]; }
  /// Total photon number sum |alpha_j|^2, a constant of motion.
  double epsilon() const;
};

/// Linear part of the Heisenberg solution: A(t) = exp(-2i chi N t) u(t) a(0).
struct PropagatorMatrix {
  Eigen::Matrix3cd u;
  double t = 0.0;
};

struct EvolvedAmplitudes {
  std::array<cplx, 3> abar{};

  cplx operator[](Mode m) const { return abar[m.index()]; }
  double alpha_x(Mode m) const { return abar[m.index()].real(); }
  double alpha_y(Mode m) const { return abar[m.index()].imag(); }
};

/// Exponents selecting <prod_j A_j^{+n_j} A_j^{m_j}>.
struct MomentSpec {
  std::array<unsigned, 3> n{};
  std::array<unsigned, 3> m{};

  /// Kerr phase exponent of z = exp(-2i chi t).
  long long h1() const;
  /// Net annihilation count sum(m) - sum(n).
  long long h2() const;

  static MomentSpec number(Mode mode, unsigned power = 1);
};

PropagatorMatrix propagator(const CouplerParams& params, double t);

EvolvedAmplitudes evolve_amplitudes(const CouplerParams& params, const InputAmplitudes& input,
                                    double t);

/// Normally ordered moment for a coherent product input.
cplx moment(const CouplerParams& params, const InputAmplitudes& input, const MomentSpec& spec,
            double t);

/// Same moment, reusing precomputed amplitudes (avoids recomputing u(t)).
cplx moment(const EvolvedAmplitudes& abar, double epsilon, double chi_t, const MomentSpec& spec);

double mean_photon(const CouplerParams& params, const InputAmplitudes& input, Mode mode, double t);

/// z^k = exp(-2i chi t k) with the Kerr phase reduced modulo pi first.
cplx kerr_phase(double chi_t, long long k);

/// exp[eps (z^k - 1)] written as exp(-2 eps sin^2(k chi t)) exp(-i eps sin(2 k chi t)).
cplx kerr_damping(double epsilon, double chi_t, long long k);

}  // namespace kcoupler
