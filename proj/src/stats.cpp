#include "stats.hpp"

#include <algorithm>
#include <cmath>

namespace dpci {

double mean(const Vec& v) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double sample_variance(const Vec& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size() - 1);
}

double median(Vec v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double ks_vs_standard_normal(Vec values) {
    if (values.empty()) return 0.0;
    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    double ks = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double cdf = std_normal_cdf(values[i]);
        const double hi = (static_cast<double>(i) + 1.0) / n - cdf;
        const double lo = cdf - static_cast<double>(i) / n;
        ks = std::max(ks, std::max(hi, lo));
    }
    return ks;
}

double binomial_halfwidth95(double rate, std::size_t n) {
    if (n == 0) return 0.0;
    return 1.959963984540054 * std::sqrt(rate * (1.0 - rate) / static_cast<double>(n));
}

}  // namespace dpci
