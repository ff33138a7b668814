#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include <Eigen/Eigenvalues>
#include <boost/math/distributions/poisson.hpp>

#include "kcoupler/fock_oracle.hpp"
#include "kcoupler/phasespace.hpp"
#include "kcoupler/purity.hpp"
#include "test_support.hpp"

namespace kcoupler {
namespace {

using testing::Draws;
using testing::pi;

double poisson_tail(double eps, int n) {
  return boost::math::cdf(boost::math::complement(boost::math::poisson_distribution<double>(eps), n));
}

// Coefficient of |n> in the coherent state |a>.
cplx coherent_coefficient(cplx a, int n) {
  return std::exp(-0.5 * std::norm(a) - 0.5 * std::lgamma(n + 1.0)) * std::pow(a, n);
}

TEST(OracleParams, CompensatedOnlyForEqualSelfAndDoubleCrossKerr) {
  auto op = OracleParams::from({0.5, 1.0, 2.0});
  EXPECT_TRUE(op.compensated());
  EXPECT_EQ(op.chi_cross[1], 1.0);
  op.chi_cross[2] = 0.5;
  EXPECT_FALSE(op.compensated());
}

TEST(FockCutoff, SmallestCutoffBelowTail) {
  for (double eps : {0.1, 0.5, 2.0, 4.0}) {
    const auto c = FockCutoff::for_epsilon(eps);
    EXPECT_LT(c.tail(eps), 1e-10);
    EXPECT_GE(FockCutoff(c.n_tot() - 1).tail(eps), 1e-10);
    EXPECT_NEAR(c.tail(eps), poisson_tail(eps, c.n_tot()), 1e-22);
  }
  EXPECT_THROW(FockCutoff(3).validate(2.0), PreconditionError);
  EXPECT_THROW(FockCutoff(-1), PreconditionError);
}

TEST(FockBlockBasis, IndexAndStateAreInverse) {
  for (int n = 0; n <= 12; ++n) {
    const FockBlockBasis b{n};
    std::size_t expected = 0;
    for (int n1 = 0; n1 <= n; ++n1)
      for (int n2 = 0; n2 <= n - n1; ++n2) {
        EXPECT_EQ(b.index(n1, n2), expected);
        const auto s = b.state(expected);
        EXPECT_EQ(s[0], n1);
        EXPECT_EQ(s[1], n2);
        EXPECT_EQ(s[2], n - n1 - n2);
        ++expected;
      }
    EXPECT_EQ(expected, b.size());
  }
}

TEST(BlockHamiltonian, SmallBlocks) {
  const auto op = OracleParams::from({0.5, 0.7, 1.3});
  const auto h0 = build_block_hamiltonian(op, 0);
  ASSERT_EQ(h0.rows(), 1);
  EXPECT_EQ(h0(0, 0), 0.0);

  // Basis (0,0,1), (0,1,0), (1,0,0).
  const auto h1 = build_block_hamiltonian(op, 1);
  Eigen::Matrix3d expected;
  expected << 0.0, 0.0, 1.3, 0.0, 0.0, 0.7, 1.3, 0.7, 0.0;
  EXPECT_LT((h1 - expected).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(BlockHamiltonian, SpectrumOfCompensatedBlocksFromNormalModes) {
  // Compensated Kerr terms sum to chi N (N - 1); the linear part has
  // single-photon energies -mu, 0, mu.
  const CouplerParams p(0.5, 1.0, 1.0);
  const auto op = OracleParams::from(p);
  for (int n = 0; n <= 10; ++n) {
    std::vector<double> expected;
    for (int a = 0; a <= n; ++a)
      for (int b = 0; b <= n - a; ++b) expected.push_back(p.chi() * n * (n - 1) + p.mu() * (a - b));
    std::sort(expected.begin(), expected.end());
    const Eigen::MatrixXd h = build_block_hamiltonian(op, n);
    EXPECT_LT((h - h.transpose()).cwiseAbs().maxCoeff(), 1e-15);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h);
    for (std::size_t k = 0; k < expected.size(); ++k)
      EXPECT_NEAR(eig.eigenvalues()[static_cast<Eigen::Index>(k)], expected[k], 1e-11);
  }
}

TEST(BlockHamiltonian, ExchangeAmplitudes) {
  OracleParams op;
  op.lambda1 = 1.0;
  op.lambda2 = 2.0;
  const int n = 5;
  const FockBlockBasis b{n};
  const auto h = build_block_hamiltonian(op, n);
  // (2,1,2) -> (1,2,2) via lambda1 and (2,1,2) -> (1,1,3) via lambda2.
  EXPECT_NEAR(h(static_cast<Eigen::Index>(b.index(2, 1)), static_cast<Eigen::Index>(b.index(1, 2))),
              std::sqrt(2.0 * 2.0), 1e-14);
  EXPECT_NEAR(h(static_cast<Eigen::Index>(b.index(2, 1)), static_cast<Eigen::Index>(b.index(1, 1))),
              2.0 * std::sqrt(2.0 * 3.0), 1e-14);
}

TEST(FockEvolver, InitialStateIsProjectedCoherentProduct) {
  const InputAmplitudes in({0.4, 0.3}, -0.5, {0.0, 0.6});
  const auto cutoff = FockCutoff::for_epsilon(in.epsilon());
  const FockEvolver ev(OracleParams::from({0.5, 1.0, 1.0}), in, cutoff);
  const auto s = ev.evolve(0.0);
  EXPECT_NEAR(s.norm_squared(), 1.0 - cutoff.tail(in.epsilon()), 1e-14);
  for (int n1 = 0; n1 <= 3; ++n1)
    for (int n2 = 0; n2 <= 3; ++n2) {
      const cplx expected = coherent_coefficient(in.alpha[0], n1) * coherent_coefficient(in.alpha[1], n2) *
                            coherent_coefficient(in.alpha[2], 2);
      EXPECT_LT(std::abs(s.amplitude(n1, n2, 2) - expected), 1e-14);
    }
}

TEST(FockEvolver, RejectsCutoffWithLargeTail) {
  EXPECT_THROW(FockEvolver(OracleParams::from({0.5, 1.0, 1.0}), {1.0, 1.0, 1.0}, FockCutoff(5)),
               PreconditionError);
}

TEST(FockEvolver, BlockNormsAreConserved) {
  const InputAmplitudes in(0.8, 0.5, 0.3);
  const FockEvolver ev(OracleParams::from({0.5, 1.0, 0.4}), in, FockCutoff::for_epsilon(in.epsilon()));
  const auto s0 = ev.evolve(0.0);
  for (double t : {0.7, 5.0, 123.0}) {
    const auto s = ev.evolve(t);
    for (std::size_t n = 0; n < s.blocks.size(); ++n)
      EXPECT_NEAR(s.blocks[n].squaredNorm(), s0.blocks[n].squaredNorm(), 1e-10);
  }
}

TEST(FockEvolver, UncoupledModesKeepPhotonNumbers) {
  const InputAmplitudes in(0.8, 0.5, 0.3);
  const double eps = in.epsilon();
  const FockEvolver ev(OracleParams::from({0.7, 0.0, 0.0}), in, FockCutoff::for_epsilon(eps));
  for (double t : {0.0, 1.0, 9.0})
    for (int j = 1; j <= 3; ++j)
      EXPECT_NEAR(oracle_moment(ev.evolve(t), MomentSpec::number(Mode(j)), eps).value.real(),
                  std::norm(in.alpha[static_cast<std::size_t>(j - 1)]), 1e-9);
}

TEST(FockEvolver, IndependentOfThreadCount) {
  const InputAmplitudes in(0.8, 0.5, 0.3);
  const auto op = OracleParams::from({0.5, 1.0, 0.4});
  const auto c = FockCutoff::for_epsilon(in.epsilon());
  const auto a = FockEvolver(op, in, c, 1).evolve(2.5);
  const auto b = FockEvolver(op, in, c, 3).evolve(2.5);
  for (std::size_t n = 0; n < a.blocks.size(); ++n) EXPECT_EQ(a.blocks[n], b.blocks[n]);
}

TEST(OracleMoment, EmptySpecIsNormAndTotalPhotonsConstant) {
  const InputAmplitudes in(0.9, 0.4, 0.6);
  const double eps = in.epsilon();
  const auto c = FockCutoff::for_epsilon(eps);
  const FockEvolver ev(OracleParams::from({0.5, 1.0, 1.0}), in, c);
  for (double t : {0.0, 0.4, 3.3, 40.0}) {
    const auto s = ev.evolve(t);
    EXPECT_NEAR(oracle_moment(s, MomentSpec{}, eps).value.real(), s.norm_squared(), 1e-14);
    double total = 0.0;
    for (int j = 1; j <= 3; ++j) total += oracle_moment(s, MomentSpec::number(Mode(j)), eps).value.real();
    EXPECT_NEAR(total, eps, 1e-9);
  }
}

TEST(OracleMoment, AgreesWithAnalyticMomentAtHalfKerrPeriod) {
  const CouplerParams p(0.5, 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0));
  const InputAmplitudes in(0.5, 0.0, 0.0);
  const auto s = evolve(OracleParams::from(p), in, FockCutoff::for_epsilon(in.epsilon()), pi);
  MomentSpec second;
  second.m[0] = 2;
  for (const auto& spec : {MomentSpec::number(Mode(1)), second, MomentSpec{{1, 0, 0}, {0, 1, 1}}})
    EXPECT_LT(std::abs(oracle_moment(s, spec, in.epsilon()).value - moment(p, in, spec, pi)), 1e-8);
}

TEST(OracleMoment, AgreesWithAnalyticMomentsForRandomSpecs) {
  Draws draws(71);
  for (int i = 0; i < 10; ++i) {
    const auto p = draws.params(2.0);
    const auto in = draws.input(2.0);
    const double t = draws.time();
    const double eps = in.epsilon();
    const auto s = evolve(OracleParams::from(p), in, FockCutoff::for_epsilon(eps), t);
    for (int k = 0; k < 20; ++k) {
      MomentSpec spec;
      int budget = 4;
      for (int j = 0; j < 3; ++j) {
        spec.n[j] = static_cast<unsigned>(draws.integer(0, budget));
        budget -= static_cast<int>(spec.n[j]);
        spec.m[j] = static_cast<unsigned>(draws.integer(0, budget));
        budget -= static_cast<int>(spec.m[j]);
      }
      const auto o = oracle_moment(s, spec, eps);
      EXPECT_LT(std::abs(o.value - moment(p, in, spec, t)), 1e-6 + o.truncation_bound);
    }
  }
}

TEST(OracleMoment, UncompensatedKerrDisagreesWithAnalyticModel) {
  const CouplerParams p(0.5, 1.0, 1.0);
  const InputAmplitudes in(1.0, 0.0, 0.0);
  auto op = OracleParams::from(p);
  op.chi_cross = {0.5, 0.5, 0.5};
  const double t = 1.0 / p.chi();
  const auto s = evolve(op, in, FockCutoff::for_epsilon(in.epsilon()), t);
  MomentSpec a1;
  a1.m[0] = 1;
  MomentSpec a1sq;
  a1sq.m[0] = 2;
  double worst = 0.0;
  for (const auto& spec : {a1, a1sq, MomentSpec::number(Mode(2))})
    worst = std::max(worst, std::abs(oracle_moment(s, spec, in.epsilon()).value - moment(p, in, spec, t)));
  EXPECT_GT(worst, 1e-3);
}

TEST(OracleSqueezing, AgreesWithGeneric) {
  Draws draws(72);
  for (int i = 0; i < 5; ++i) {
    const auto p = draws.params(2.0);
    const auto in = draws.input(2.0);
    const double t = draws.time();
    const auto s = evolve(OracleParams::from(p), in, FockCutoff::for_epsilon(in.epsilon()), t);
    for (const auto& sel : {QuadratureSelection::single(Mode(2)), QuadratureSelection({Mode(1), Mode(3)}),
                            QuadratureSelection({Mode(1), Mode(2), Mode(3)})}) {
      const auto a = oracle_squeezing(s, sel, in.epsilon());
      const auto b = squeezing_generic(p, in, sel, t);
      EXPECT_NEAR(a.s, b.s, 1e-6);
      EXPECT_NEAR(a.q, b.q, 1e-6);
    }
  }
}

TEST(ReducedDensity, InvariantsAndPurity) {
  const CouplerParams p(0.5, 1.0, 1.0);
  const InputAmplitudes in(0.3, 0.3, 0.3);
  const auto c = FockCutoff::for_epsilon(in.epsilon(), 1e-16);
  const FockEvolver ev(OracleParams::from(p), in, c);
  for (double t : {0.0, 0.69, 2 * pi}) {
    const auto s = ev.evolve(t);
    for (int j = 1; j <= 3; ++j) {
      const auto r = reduce(s, Mode(j));
      EXPECT_LT((r.rho - r.rho.adjoint()).cwiseAbs().maxCoeff(), 1e-12);
      EXPECT_NEAR(r.rho.trace().real(), s.norm_squared(), 1e-10);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(r.rho);
      EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-10);
      if (t == 0.0 || t == 2 * pi) {
        EXPECT_NEAR(oracle_purity(r), 1.0, 1e-8);
        EXPECT_NEAR(eig.eigenvalues().maxCoeff(), 1.0, 1e-8);
      } else {
        EXPECT_NEAR(oracle_purity(r), purity_series(p, in, Mode(j), t).value, 1e-8);
      }
    }
  }
}

TEST(OracleWigner, VacuumCoherentAndCatValues) {
  const auto vac = evolve(OracleParams::from({0.5, 1.0, 1.0}), {}, FockCutoff(4), 1.0);
  EXPECT_NEAR(oracle_wigner(reduce(vac, Mode(1)), 0.0), 2.0 / pi, 1e-15);

  const InputAmplitudes in({0.7, -0.2}, 0.3, 0.0);
  const auto s0 = evolve(OracleParams::from({0.5, 1.0, 1.0}), in, FockCutoff::for_epsilon(in.epsilon(), 1e-16), 0.0);
  const auto rho = reduce(s0, Mode(1));
  Draws draws(73);
  for (int i = 0; i < 20; ++i) {
    const cplx beta = in.alpha[0] + draws.amplitude(1.5);
    EXPECT_NEAR(oracle_wigner(rho, beta), 2.0 / pi * std::exp(-2.0 * std::norm(beta - in.alpha[0])), 1e-8);
  }

  const double l = 1.0 / std::sqrt(2.0);
  const CouplerParams cat(0.5, l, l);
  const InputAmplitudes cat_in(2.0, 0.0, 0.0);
  const auto s = evolve(OracleParams::from(cat), cat_in, FockCutoff::for_epsilon(4.0, 1e-16), pi);
  EXPECT_NEAR(oracle_wigner(reduce(s, Mode(1)), 0.0), cat_wigner_closed_form(cat, cat_in, Mode(1), 0.0, pi),
              1e-5);
}

TEST(OracleWigner, AccurateFarFromTheState) {
  // The matrix elements of the displaced parity are exact, so the error is set
  // by the discarded tail alone: the truncated state is within trace distance
  // 2 sqrt(tail) + tail of the full one, whatever |beta| is.
  const InputAmplitudes in(0.5, 0.0, 0.0);
  const auto cutoff = FockCutoff::for_epsilon(in.epsilon());
  const auto s = evolve(OracleParams::from({0.5, 1.0, 1.0}), in, cutoff, 0.0);
  const auto rho = reduce(s, Mode(1));
  const double tail = cutoff.tail(in.epsilon());
  const double bound = 2.0 / pi * (2.0 * std::sqrt(tail) + tail);
  for (double b : {0.5, 2.0, 4.0, 6.0, 30.0}) {
    const cplx beta{b, -0.5 * b};
    EXPECT_NEAR(oracle_wigner(rho, beta), 2.0 / pi * std::exp(-2.0 * std::norm(beta - in.alpha[0])), bound) << b;
  }
}

TEST(StateDump, HeaderAndBinaryLayout) {
  const InputAmplitudes in(0.5, 0.2, 0.1);
  const auto c = FockCutoff::for_epsilon(in.epsilon());
  const auto s = evolve(OracleParams::from({0.5, 1.0, 1.0}), in, c, 0.3);
  std::ostringstream header;
  std::ostringstream data;
  write_state_header_json(header, s);
  write_state_binary(data, s);
  std::size_t amplitudes = 0;
  for (int n = 0; n <= c.n_tot(); ++n) amplitudes += FockBlockBasis{n}.size();
  EXPECT_EQ(data.str().size(), 16 * amplitudes);
  EXPECT_NE(header.str().find("lexicographic"), std::string::npos);
}

}  // namespace
}  // namespace kcoupler
