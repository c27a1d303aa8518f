#pragma once

#include <cstddef>
#include <vector>

namespace antplan {

struct RankTest {
  std::size_t n = 0;         ///< pairs with nonzero difference
  double w_plus = 0.0;       ///< rank sum of positive differences (a − b > 0)
  double z = 0.0;
  double p_value = 1.0;
};

/// Wilcoxon signed-rank test for paired samples, one-sided with alternative
/// "a tends to be smaller than b". Normal approximation with tie and
/// continuity corrections; zero differences are dropped.
/// Throws mixed-length-inputs when the samples differ in length.
RankTest wilcoxon_less(const std::vector<double>& a, const std::vector<double>& b);

/// Average ranks (1-based), ties sharing their mean rank.
std::vector<double> ranks(const std::vector<double>& values);

/// Spearman rank correlation (Pearson correlation of average ranks).
/// Returns 0 when either input is constant.
double spearman(const std::vector<double>& a, const std::vector<double>& b);

double mean(const std::vector<double>& values);

}  // namespace antplan
