#pragma once

#include <vector>

namespace ssp {

double mean(const std::vector<double>& xs);
double sample_variance(const std::vector<double>& xs);  // unbiased
double stderr_mean(const std::vector<double>& xs);

struct KsResult {
  double statistic;  // sup |F1 - F2|
  double p_value;    // asymptotic Kolmogorov tail (conservative with ties)
};

// Two-sample Kolmogorov-Smirnov test; inputs need not be sorted.
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

struct LineFit {
  double slope;
  double intercept;
};

LineFit least_squares(const std::vector<double>& x,
                      const std::vector<double>& y);

}  // namespace ssp
