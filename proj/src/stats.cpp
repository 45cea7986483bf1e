#include "ctcm/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ctcm {

double sample_mean(const std::vector<double>& x) {
    if (x.empty()) throw std::invalid_argument("sample_mean: empty sample");
    double acc = 0.0;
    for (double v : x) acc += v;
    return acc / static_cast<double>(x.size());
}

double sample_sd(const std::vector<double>& x) {
    if (x.size() < 2) return 0.0;
    const double m = sample_mean(x);
    double acc = 0.0;
    for (double v : x) acc += (v - m) * (v - m);
    return std::sqrt(acc / static_cast<double>(x.size() - 1));
}

double ks_statistic(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_statistic: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j]) ++i;
        else ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

double ks_critical_1pct(std::size_t n1, std::size_t n2) {
    const double p = static_cast<double>(n1) * static_cast<double>(n2);
    const double s = static_cast<double>(n1 + n2);
    return 1.628 * std::sqrt(s / p);
}

double chi_square_critical_99(double df) {
    constexpr double z99 = 2.3263478740408408;
    const double a = 2.0 / (9.0 * df);
    const double b = 1.0 - a + z99 * std::sqrt(a);
    return df * b * b * b;
}

double chi_square_statistic(const std::vector<double>& observed,
                            const std::vector<double>& expected, std::size_t& cells_kept) {
    if (observed.size() != expected.size())
        throw std::invalid_argument("chi_square_statistic: size mismatch");
    std::vector<double> obs_pool, exp_pool;
    double o_acc = 0.0, e_acc = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        o_acc += observed[i];
        e_acc += expected[i];
        if (e_acc >= 5.0) {
            obs_pool.push_back(o_acc);
            exp_pool.push_back(e_acc);
            o_acc = e_acc = 0.0;
        }
    }
    if (e_acc > 0.0) {
        if (exp_pool.empty()) {
            obs_pool.push_back(o_acc);
            exp_pool.push_back(e_acc);
        } else {
            obs_pool.back() += o_acc;
            exp_pool.back() += e_acc;
        }
    }
    cells_kept = exp_pool.size();
    double stat = 0.0;
    for (std::size_t i = 0; i < exp_pool.size(); ++i) {
        const double diff = obs_pool[i] - exp_pool[i];
        stat += diff * diff / exp_pool[i];
    }
    return stat;
}

} // namespace ctcm
