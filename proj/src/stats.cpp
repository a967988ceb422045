#include "waynav/stats.hpp"

#include <algorithm>
#include <cmath>

#include "waynav/error.hpp"

namespace waynav::stats {

double mean(std::span<const double> xs) {
    if (xs.empty()) throw UndefinedError("mean of an empty series");
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

double population_stddev(std::span<const double> xs) {
    const double m = mean(xs);
    double ss = 0.0;
    for (double x : xs) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(xs.size()));
}

std::optional<double> pearson_r2(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw ContractError("pearson_r2: series lengths differ");
    if (xs.size() < 2) return std::nullopt;
    const double mx = mean(xs);
    const double my = mean(ys);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        const double dx = xs[k] - mx;
        const double dy = ys[k] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) return std::nullopt;
    return std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0);
}

double mean_difference(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw ContractError("mean_difference: series lengths differ");
    if (a.empty()) throw UndefinedError("mean_difference of empty series");
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += b[k] - a[k];
    return s / static_cast<double>(a.size());
}

}  // namespace waynav::stats
