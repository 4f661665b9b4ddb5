#pragma once

#include "linalg.hpp"

namespace dpci {

double mean(const Vec& v);
double sample_variance(const Vec& v);  // n-1 denominator
double median(Vec v);

// Kolmogorov-Smirnov distance between the empirical distribution of `values`
// and the standard normal CDF.
double ks_vs_standard_normal(Vec values);

// Half-width of the 95% binomial sampling band for a rate: 1.96 sqrt(p(1-p)/n).
double binomial_halfwidth95(double rate, std::size_t n);

}  // namespace dpci
