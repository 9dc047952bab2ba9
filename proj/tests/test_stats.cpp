#include <cmath>

#include "cnma/errors.hpp"
#include "cnma/stats.hpp"
#include "doctest.h"

using cnma::chi_square_sf;
using cnma::confidence_interval;
using cnma::normal_quantile;

TEST_CASE("chi-square survival matches reference values") {
  // Frozen from an independent implementation (scipy.stats.chi2.sf).
  CHECK(chi_square_sf(44.80, 46) == doctest::Approx(0.5225225885).epsilon(1e-8));
  CHECK(chi_square_sf(53.70, 54) == doctest::Approx(0.4859144008).epsilon(1e-8));
  CHECK(chi_square_sf(3.41, 1) == doctest::Approx(0.0648024465).epsilon(1e-8));
  CHECK(chi_square_sf(2.48, 1) == doctest::Approx(0.1153022528).epsilon(1e-8));
  CHECK(chi_square_sf(3.2, 1) == doctest::Approx(0.0736382701).epsilon(1e-8));
}

TEST_CASE("chi-square survival edge cases") {
  CHECK(chi_square_sf(0.0, 5) == 1.0);
  CHECK(chi_square_sf(-3.0, 5) == 1.0);
  CHECK(chi_square_sf(1e6, 5) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK_THROWS_AS(chi_square_sf(1.0, 0), cnma::ModelError);
  CHECK_THROWS_AS(chi_square_sf(1.0, -2), cnma::ModelError);
}

TEST_CASE("normal quantile") {
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
  CHECK(normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(normal_quantile(0.025) == doctest::Approx(-1.959963984540054).epsilon(1e-12));
  CHECK_THROWS_AS(normal_quantile(0.0), cnma::InputError);
  CHECK_THROWS_AS(normal_quantile(1.0), cnma::InputError);
}

TEST_CASE("Wald confidence interval") {
  const auto [low, high] = confidence_interval(0.3, 0.1);
  CHECK(low == doctest::Approx(0.104).epsilon(1e-3));
  CHECK(high == doctest::Approx(0.496).epsilon(1e-3));

  const auto [l90, h90] = confidence_interval(0.0, 1.0, 0.90);
  CHECK(h90 == doctest::Approx(1.6448536269514722).epsilon(1e-10));
  CHECK(l90 == doctest::Approx(-h90).epsilon(1e-10));

  CHECK_THROWS_AS(confidence_interval(0.0, 0.0), cnma::InputError);
  CHECK_THROWS_AS(confidence_interval(0.0, -1.0), cnma::InputError);
  CHECK_THROWS_AS(confidence_interval(0.0, 1.0, 1.0), cnma::InputError);
  CHECK_THROWS_AS(confidence_interval(0.0, 1.0, 0.0), cnma::InputError);
}
