#ifndef CTCM_STATS_HPP
#define CTCM_STATS_HPP

#include <cstddef>
#include <vector>

namespace ctcm {

double sample_mean(const std::vector<double>& x);
double sample_sd(const std::vector<double>& x); // n-1 denominator, 0 for n < 2

// Two-sample Kolmogorov-Smirnov statistic sup |F1 - F2|.
double ks_statistic(std::vector<double> a, std::vector<double> b);

// Large-sample KS critical value at significance alpha = 1%:
// 1.628 * sqrt((n1 + n2) / (n1 * n2)).
double ks_critical_1pct(std::size_t n1, std::size_t n2);

// Wilson-Hilferty approximation of the chi-square quantile at 99%.
double chi_square_critical_99(double df);

// Pearson statistic with cells pooled so every expected count is at least 5
// (spill into the previous kept cell). Returns the statistic and the number
// of cells kept via out parameter.
double chi_square_statistic(const std::vector<double>& observed,
                            const std::vector<double>& expected, std::size_t& cells_kept);

} // namespace ctcm

#endif
