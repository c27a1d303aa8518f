#include "antplan/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "antplan/error.hpp"

namespace antplan {

double mean(const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

std::vector<double> ranks(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = (static_cast<double>(i + j) / 2.0) + 1.0;
    for (std::size_t k = i; k <= j; ++k) out[order[k]] = rank;
    i = j + 1;
  }
  return out;
}

RankTest wilcoxon_less(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size())
    throw Error(ErrorKind::MixedLengthInputs, "paired samples have lengths " + std::to_string(a.size()) + " and " +
                                                  std::to_string(b.size()));
  std::vector<double> diff, magnitude;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    if (d != 0.0) {
      diff.push_back(d);
      magnitude.push_back(std::abs(d));
    }
  }
  RankTest t;
  t.n = diff.size();
  if (t.n == 0) return t;
  const auto r = ranks(magnitude);
  for (std::size_t i = 0; i < t.n; ++i)
    if (diff[i] > 0) t.w_plus += r[i];

  const double n = static_cast<double>(t.n);
  const double expected = n * (n + 1) / 4.0;
  double tie_term = 0.0;
  std::vector<double> sorted = magnitude;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
    const double k = static_cast<double>(j - i + 1);
    tie_term += k * k * k - k;
    i = j + 1;
  }
  const double variance = n * (n + 1) * (2 * n + 1) / 24.0 - tie_term / 48.0;
  if (variance <= 0.0) return t;
  // Small W+ supports the alternative; the continuity correction shifts toward the mean.
  t.z = (t.w_plus - expected + 0.5) / std::sqrt(variance);
  t.p_value = 0.5 * std::erfc(-t.z / std::sqrt(2.0));
  return t;
}

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size())
    throw Error(ErrorKind::MixedLengthInputs, "samples have different lengths");
  if (a.size() < 2) return 0.0;
  const auto ra = ranks(a);
  const auto rb = ranks(b);
  const double ma = mean(ra), mb = mean(rb);
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

}  // namespace antplan
