#pragma once

#include <cmath>
#include <complex>
#include <vector>

namespace kcoupler::detail {

/// Neumaier-compensated accumulator.
template <class T>
class CompensatedSum {
 public:
  void add(T x) {
    const T t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      carry_ += (sum_ - t) + x;
    else
      carry_ += (x - t) + sum_;
    sum_ = t;
  }
  T value() const { return sum_ + carry_; }

 private:
  T sum_{};
  T carry_{};
};

template <class T>
class CompensatedSum<std::complex<T>> {
 public:
  void add(std::complex<T> x) {
    re_.add(x.real());
    im_.add(x.imag());
  }
  std::complex<T> value() const { return {re_.value(), im_.value()}; }

 private:
  CompensatedSum<T> re_;
  CompensatedSum<T> im_;
};

/// Associated Laguerre polynomials L_n^k(x) for a fixed argument, filled on
/// demand by the upward three-term recurrence in n at fixed k >= 0.
class LaguerreTable {
 public:
  explicit LaguerreTable(long double x) : x_(x) {}

  long double operator()(int n, int k) {
    if (static_cast<std::size_t>(k) >= rows_.size()) rows_.resize(static_cast<std::size_t>(k) + 1);
    auto& row = rows_[static_cast<std::size_t>(k)];
    const long double kk = k;
    if (row.empty()) row.push_back(1.0L);
    if (row.size() == 1 && n >= 1) row.push_back(1.0L + kk - x_);
    while (static_cast<int>(row.size()) <= n) {
      const long double m = static_cast<long double>(row.size() - 1);
      const long double next =
          ((2.0L * m + 1.0L + kk - x_) * row[row.size() - 1] - (m + kk) * row[row.size() - 2]) /
          (m + 1.0L);
      row.push_back(next);
    }
    return row[static_cast<std::size_t>(n)];
  }

 private:
  long double x_;
  std::vector<std::vector<long double>> rows_;
};

/// Tracks the anti-diagonal stopping rule: a shell is quiet when its absolute
/// mass is below rel_tol times the accumulated absolute mass; the series is
/// done after `confirm` further quiet shells.
class ShellStopRule {
 public:
  ShellStopRule(long double rel_tol, int confirm) : rel_tol_(rel_tol), confirm_(confirm) {}

  /// Returns true when summation may stop.
  bool feed(long double shell_mass) {
    total_ += shell_mass;
    if (shell_mass <= rel_tol_ * total_)
      ++quiet_;
    else
      quiet_ = 0;
    return quiet_ > confirm_;
  }
  long double total() const { return total_; }

 private:
  long double rel_tol_;
  int confirm_;
  int quiet_ = 0;
  long double total_ = 0.0L;
};

}  // namespace kcoupler::detail
