#include <algorithm>
#include <deque>

#include "kcoupler/squeezing.hpp"

namespace kcoupler {

std::vector<TimeInterval> detect_collapse_intervals(std::span<const double> series, double t0,
                                                    double dt, std::size_t window,
                                                    std::optional<double> threshold) {
  if (series.empty()) throw PreconditionError("empty input");
  if (window < 3) throw PreconditionError("collapse window must be at least 3 samples");
  if (!(dt > 0.0)) throw PreconditionError("sample spacing must be positive");

  const auto [lo, hi] = std::minmax_element(series.begin(), series.end());
  const double limit = threshold.value_or(0.05 * (*hi - *lo));
  const std::size_t n = series.size();
  const std::size_t w = std::min(window, n);

  // Monotonic deques give the rolling max/min in O(n).
  std::deque<std::size_t> maxq, minq;
  std::vector<bool> quiet(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    while (!maxq.empty() && series[maxq.back()] <= series[i]) maxq.pop_back();
    while (!minq.empty() && series[minq.back()] >= series[i]) minq.pop_back();
    maxq.push_back(i);
    minq.push_back(i);
    if (i + 1 < w) continue;
    const std::size_t start = i + 1 - w;
    if (maxq.front() < start) maxq.pop_front();
    if (minq.front() < start) minq.pop_front();
    if (series[maxq.front()] - series[minq.front()] <= limit)
      std::fill(quiet.begin() + static_cast<std::ptrdiff_t>(start),
                quiet.begin() + static_cast<std::ptrdiff_t>(i + 1), true);
  }

  std::vector<TimeInterval> out;
  std::size_t i = 0;
  while (i < n) {
    if (!quiet[i]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && quiet[j + 1]) ++j;
    out.push_back({t0 + dt * static_cast<double>(i), t0 + dt * static_cast<double>(j)});
    i = j + 1;
  }
  return out;
}

}  // namespace kcoupler
