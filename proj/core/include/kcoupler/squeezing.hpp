#pragma once

// Quadrature squeezing factors S_n, Q_n for one, two or three modes.
//
// X_n = 1/2 sum_{j in modes} (A_j + A_j^+), Y_n = 1/(2i) sum (A_j - A_j^+),
// S_n = 4 Var(X_n) - C_n and Q_n = 4 Var(Y_n) - C_n with C_n = |modes|.
// Negative S (Q) means squeezing below the vacuum level.

#include <optional>
#include <span>
#include <vector>

#include "kcoupler/core.hpp"

namespace kcoupler {

class QuadratureSelection {
 public:
  /// Modes are deduplicated and sorted; an empty list is rejected.
  explicit QuadratureSelection(std::vector<Mode> modes);
  static QuadratureSelection single(Mode m) { return QuadratureSelection({m}); }

  const std::vector<Mode>& modes() const { return modes_; }
  /// Commutator constant [X_n, Y_n] = i C_n / 2.
  int c_n() const { return static_cast<int>(modes_.size()); }

 private:
  std::vector<Mode> modes_;
};

struct SqueezingResult {
  double s = 0.0;
  double q = 0.0;
  double t = 0.0;
  int c_n = 1;

  /// S / C_n; for a single mode this is S itself.
  double normalized_s() const { return s / c_n; }
  double normalized_q() const { return q / c_n; }
};

/// Variances assembled from first and second moments of the moment engine.
SqueezingResult squeezing_generic(const CouplerParams& params, const InputAmplitudes& input,
                                  const QuadratureSelection& sel, double t);

/// Single-mode closed form in terms of alpha_jx, alpha_jy and the phases
/// Theta_1 = 2 chi t + eps sin(4 chi t), Theta_2 = eps sin(2 chi t).
SqueezingResult single_mode_closed_form(const CouplerParams& params, const InputAmplitudes& input,
                                        Mode mode, double t);

/// -eta exp(-eta), eta = 4 alpha^2: S of the fundamental mode at mu t = m' pi,
/// chi t = (m + 1/2) pi for input (alpha, 0, 0).
double max_single_mode_squeezing(double alpha);

enum class ModePair { p12, p13, p23 };

/// Two-mode closed form. Theta_1 multiplies the exp[-2 eps sin^2(2 chi t)]
/// (<A_j A_k>) terms and Theta_2 the exp[-4 eps sin^2(chi t)] (<A_j><A_k>)
/// terms, the same pairing as the single-mode expression. A variant with the
/// two phases swapped is available as two_mode_closed_form_swapped_phases.
SqueezingResult two_mode_closed_form(const CouplerParams& params, const InputAmplitudes& input,
                                     ModePair pair, double t);

/// The same expression with Theta_1 and Theta_2 exchanged in the cross terms.
/// Kept only to quantify how far that variant is from the exact result.
SqueezingResult two_mode_closed_form_swapped_phases(const CouplerParams& params,
                                                    const InputAmplitudes& input, ModePair pair,
                                                    double t);

struct TimeInterval {
  double begin = 0.0;
  double end = 0.0;
};

/// Finds the maximal time intervals over which every window of `window`
/// consecutive samples has peak-to-peak amplitude <= threshold. The default
/// threshold is 5% of the whole series' peak-to-peak amplitude.
std::vector<TimeInterval> detect_collapse_intervals(std::span<const double> series, double t0,
                                                    double dt, std::size_t window,
                                                    std::optional<double> threshold = std::nullopt);

}  // namespace kcoupler
