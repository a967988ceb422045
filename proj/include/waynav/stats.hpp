#pragma once

#include <optional>
#include <span>

namespace waynav::stats {

double mean(std::span<const double> xs);

/// Population standard deviation (divides by n).
double population_stddev(std::span<const double> xs);

/// Squared Pearson correlation of paired series. nullopt when fewer than two
/// pairs or when either series has zero variance.
std::optional<double> pearson_r2(std::span<const double> xs, std::span<const double> ys);

/// Bland-Altman centre line: mean of (b - a).
double mean_difference(std::span<const double> a, std::span<const double> b);

}  // namespace waynav::stats
