#pragma once

// Brute-force reference: exact Schrodinger evolution of the three-mode state
// in a truncated Fock space. The total photon number is conserved, so the
// Hamiltonian splits into independent blocks of fixed n = n1 + n2 + n3, each
// evolved exactly through its eigendecomposition.
//
// Unlike core.hpp, the self- and cross-Kerr constants are independent here,
// which lets tests confirm that the analytic solution fails when they are
// not compensated.

#include <array>
#include <iosfwd>
#include <vector>

#include <Eigen/Core>

#include "kcoupler/core.hpp"
#include "kcoupler/squeezing.hpp"

namespace kcoupler {

struct OracleParams {
  std::array<double, 3> chi_self{};   // chi_1, chi_2, chi_3 on n_j (n_j - 1)
  std::array<double, 3> chi_cross{};  // on n1 n2, n1 n3 and n2 n3
  double lambda1 = 0.0;
  double lambda2 = 0.0;

  /// chi_j = chi and cross constants 2 chi, the analytically solvable case.
  static OracleParams from(const CouplerParams& p);
  bool compensated(double tol = 1e-12) const;
};

/// Largest total photon number kept in the basis.
class FockCutoff {
 public:
  explicit FockCutoff(int n_tot);
  /// Smallest n_tot with P(Poisson(eps) > n_tot) < tail.
  static FockCutoff for_epsilon(double epsilon, double tail = 1e-10);

  int n_tot() const { return n_tot_; }
  /// P(Poisson(eps) > n_tot): the norm deficit of a truncated coherent input.
  double tail(double epsilon) const;
  /// Throws PreconditionError when tail(eps) >= limit.
  void validate(double epsilon, double limit = 1e-10) const;

 private:
  int n_tot_;
};

/// States of the fixed-n block in lexicographic (n1, n2, n3) order.
struct FockBlockBasis {
  int n = 0;
  std::size_t size() const { return static_cast<std::size_t>((n + 1) * (n + 2) / 2); }
  std::size_t index(int n1, int n2) const {
    return static_cast<std::size_t>(n1 * (n + 1) - n1 * (n1 - 1) / 2 + n2);
  }
  std::array<int, 3> state(std::size_t idx) const;
};

Eigen::MatrixXd build_block_hamiltonian(const OracleParams& op, int n);

/// blocks[n] holds amplitudes over FockBlockBasis{n}. The initial coherent
/// product is projected, not renormalized: norm() = 1 - tail.
struct TruncatedState {
  int n_tot = 0;
  double t = 0.0;
  OracleParams params;
  std::vector<Eigen::VectorXcd> blocks;

  double norm_squared() const;
  cplx amplitude(int n1, int n2, int n3) const;
};

/// Diagonalizes every block once; evolve(t) is then a phase multiplication.
class FockEvolver {
 public:
  FockEvolver(const OracleParams& op, const InputAmplitudes& input, const FockCutoff& cutoff,
              unsigned threads = 0);

  TruncatedState evolve(double t) const;
  TruncatedState initial_state() const;
  const FockCutoff& cutoff() const { return cutoff_; }
  double epsilon() const { return epsilon_; }

 private:
  OracleParams op_;
  FockCutoff cutoff_;
  double epsilon_;
  std::vector<Eigen::MatrixXd> vectors_;
  std::vector<Eigen::VectorXd> energies_;
  std::vector<Eigen::VectorXcd> initial_;     // in the Fock basis
  std::vector<Eigen::VectorXcd> projected_;   // in the eigenbasis
};

TruncatedState evolve(const OracleParams& op, const InputAmplitudes& input,
                      const FockCutoff& cutoff, double t);

struct OracleMoment {
  cplx value;
  /// Bound on the contribution of photon numbers above the cutoff.
  double truncation_bound = 0.0;
};

OracleMoment oracle_moment(const TruncatedState& state, const MomentSpec& spec,
                           double epsilon);

/// S and Q from oracle moments, same definitions as squeezing_generic.
SqueezingResult oracle_squeezing(const TruncatedState& state, const QuadratureSelection& sel,
                                 double epsilon);

struct ReducedDensity {
  Mode mode{1};
  Eigen::MatrixXcd rho;  // <m| rho |n>, m, n = 0..n_tot
};

ReducedDensity reduce(const TruncatedState& state, Mode mode);

double oracle_purity(const ReducedDensity& rho);

/// (2/pi) Tr[rho D(beta) P D(-beta)] from the exact number-basis matrix
/// elements of the displaced parity, so the only truncation error is that of
/// rho itself. Throws PreconditionError("beta outside trusted region") when the rounding
/// error of the Laguerre sum could exceed 1e-6.
double oracle_wigner(const ReducedDensity& rho, cplx beta);

/// JSON header (parameters, cutoff, t, basis order) followed by the blocks
/// as little-endian float64 (re, im) pairs in block then basis order.
void write_state_header_json(std::ostream& out, const TruncatedState& state);
void write_state_binary(std::ostream& out, const TruncatedState& state);

}  // namespace kcoupler
