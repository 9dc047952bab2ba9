#pragma once

#include <utility>

namespace cnma {

/// Upper tail P(X > x) of a chi-square distribution with df > 0.
double chi_square_sf(double x, int df);

/// Standard normal quantile, p in (0,1).
double normal_quantile(double p);

/// Wald interval: estimate +/- z_{1-(1-level)/2} * se. Throws InputError for
/// level outside (0,1) or se <= 0.
std::pair<double, double> confidence_interval(double estimate, double se, double level = 0.95);

}  // namespace cnma
