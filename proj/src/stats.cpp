#include "cnma/stats.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <cmath>

#include "cnma/errors.hpp"

namespace cnma {

double chi_square_sf(double x, int df) {
  if (df <= 0) throw ModelError("chi-square survival needs df > 0");
  if (x <= 0.0) return 1.0;
  const boost::math::chi_squared dist(static_cast<double>(df));
  return boost::math::cdf(boost::math::complement(dist, x));
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw InputError("normal quantile needs p in (0,1)");
  const boost::math::normal dist;
  return boost::math::quantile(dist, p);
}

std::pair<double, double> confidence_interval(double estimate, double se, double level) {
  if (!(level > 0.0 && level < 1.0)) throw InputError("confidence level must be in (0,1)");
  if (!(se > 0.0) || !std::isfinite(se)) throw InputError("standard error must be positive and finite");
  const double z = normal_quantile(1.0 - (1.0 - level) / 2.0);
  return {estimate - z * se, estimate + z * se};
}

}  // namespace cnma
