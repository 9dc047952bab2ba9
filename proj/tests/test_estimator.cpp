#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "cnma/combination.hpp"
#include "cnma/errors.hpp"
#include "cnma/estimator.hpp"
#include "cnma/rng.hpp"
#include "doctest.h"
#include "test_support.hpp"

using cnma::build_combination_matrix;
using cnma::CombinationMatrix;
using cnma::EffectEstimate;
using cnma::estimate_tau2;
using cnma::fit_cnma;
using cnma::fit_nma;
using cnma::fit_separate_nmas;
using cnma::fit_wls;
using cnma::FitKind;
using cnma::ModelError;
using cnma::ModelFit;
using cnma::Network;
using cnma::pairwise_from_binary;
using cnma::q_difference_raw;
using cnma::q_difference_test;
using cnma::relative_effect;
using cnma::WlsCore;

TEST_CASE("binary arms to log odds ratio") {
  // No zero cell: OR = (10*30)/(40*20).
  auto [eff, se] = pairwise_from_binary(10, 50, 20, 50);
  CHECK(eff == doctest::Approx(-0.9808292530117262).epsilon(1e-12));
  CHECK(se == doctest::Approx(0.4564354645876384).epsilon(1e-12));

  // Zero cell: 0.5 added to all four cells.
  auto [eff0, se0] = pairwise_from_binary(0, 50, 5, 50);
  CHECK(eff0 == doctest::Approx(-2.50215628312278).epsilon(1e-12));
  CHECK(se0 == doctest::Approx(1.4911734251904516).epsilon(1e-12));

  // All-events arm triggers the same correction; swapping arms flips the sign.
  auto [eff1, se1] = pairwise_from_binary(50, 50, 5, 50);
  auto [eff2, se2] = pairwise_from_binary(5, 50, 50, 50);
  CHECK(std::isfinite(eff1));
  CHECK(eff1 == doctest::Approx(-eff2).epsilon(1e-12));
  CHECK(se1 == doctest::Approx(se2).epsilon(1e-12));

  CHECK_THROWS_AS(pairwise_from_binary(5, 0, 1, 10), cnma::InputError);
  CHECK_THROWS_AS(pairwise_from_binary(11, 10, 1, 10), cnma::InputError);
  CHECK_THROWS_AS(pairwise_from_binary(-1, 10, 1, 10), cnma::InputError);
  CHECK_THROWS_AS(pairwise_from_binary(1.5, 10, 1, 10), cnma::InputError);
}

TEST_CASE("weighted least squares on a single comparison") {
  Eigen::MatrixXd x(1, 1);
  x << 1;
  Eigen::VectorXd d(1), se(1);
  d << 0.5;
  se << 0.2;
  const WlsCore fit = fit_wls(x, d, se, 0.0);
  CHECK(fit.beta[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(fit.q == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(fit.weights[0] == doctest::Approx(25.0).epsilon(1e-14));
  CHECK(fit.coef_cov(0, 0) == doctest::Approx(0.04).epsilon(1e-12));
}

TEST_CASE("pairwise meta-analysis matches hand-computed pooling") {
  // Two studies of the same comparison: d = (0.3, 0.7), se = (0.1, 0.2).
  Eigen::MatrixXd x(2, 1);
  x << 1, 1;
  Eigen::VectorXd d(2), se(2);
  d << 0.3, 0.7;
  se << 0.1, 0.2;

  const WlsCore fe = fit_wls(x, d, se, 0.0);
  CHECK(fe.beta[0] == doctest::Approx(0.38).epsilon(1e-12));
  CHECK(fe.q == doctest::Approx(3.2).epsilon(1e-12));

  // Method-of-moments heterogeneity; equals DerSimonian-Laird here.
  const double tau2 = estimate_tau2(x, d, se);
  CHECK(tau2 == doctest::Approx(0.055).epsilon(1e-12));

  const WlsCore re = fit_wls(x, d, se, tau2);
  CHECK(re.beta[0] == doctest::Approx(0.4625).epsilon(1e-10));
  CHECK(std::sqrt(re.coef_cov(0, 0)) == doctest::Approx(0.1964529206).epsilon(1e-8));
}

TEST_CASE("weighted least squares agrees with an orthogonal-decomposition oracle") {
  cnma::PhiloxEngine eng(21, 0);
  for (int trial = 0; trial < 40; ++trial) {
    const int m = eng.uniform_int(3, 10);
    const int p = eng.uniform_int(1, 5);
    Eigen::MatrixXd x(m, p);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < p; ++j) x(i, j) = eng.uniform_int(-1, 1);
    if (eng.next_double() < 0.4 && p >= 2) x.col(p - 1) = x.col(0);  // force rank deficiency
    Eigen::VectorXd d(m), se(m);
    for (int i = 0; i < m; ++i) {
      d[i] = eng.normal();
      se[i] = 0.2 + eng.next_double();
    }
    const double tau2 = trial % 2 ? 0.1 : 0.0;

    const WlsCore fit = fit_wls(x, d, se, tau2);

    // Independent route: minimum-norm least squares on the weighted system.
    const Eigen::VectorXd wsqrt = (se.array().square() + tau2).inverse().sqrt();
    const Eigen::MatrixXd xw = wsqrt.asDiagonal() * x;
    const Eigen::VectorXd dw = wsqrt.asDiagonal() * d;
    const Eigen::VectorXd beta_ref =
        xw.completeOrthogonalDecomposition().solve(dw);

    CHECK((fit.beta - beta_ref).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((fit.fitted - x * beta_ref).cwiseAbs().maxCoeff() < 1e-9);
    const double q_ref = (dw - xw * beta_ref).squaredNorm();
    CHECK(fit.q == doctest::Approx(q_ref).epsilon(1e-9));
  }
}

TEST_CASE("standard NMA on a consistent triangle") {
  // Effects on a consistent scale: theta_B - theta_A = 0.5, theta_C - theta_A = 1.0.
  const Network net = quick_net({{"B", "A", 0.5, 0.5},
                                 {"C", "A", 1.0, 0.5},
                                 {"C", "B", 0.5, 0.5}});
  const ModelFit fit = fit_nma(net, net.require_intervention("A"));
  CHECK(fit.kind == FitKind::nma);
  CHECK(fit.columns == std::vector<std::string>{"B", "C"});
  CHECK(fit.rank == 2);
  CHECK(fit.df == 1);
  CHECK(fit.Q == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(fit.tau2 == 0.0);
  CHECK(fit.p_Q == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fit.beta[0] == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(fit.beta[1] == doctest::Approx(1.0).epsilon(1e-10));
  // theta carries the per-intervention effects with the reference at zero.
  CHECK(fit.theta[net.require_intervention("A")] == doctest::Approx(0.0));
  CHECK(fit.theta[net.require_intervention("C")] == doctest::Approx(1.0).epsilon(1e-10));
  // delta = X beta reproduces the observed effects exactly here.
  CHECK((fit.delta - Eigen::Vector3d(0.5, 1.0, 0.5)).cwiseAbs().maxCoeff() < 1e-10);

  const EffectEstimate ba = relative_effect(fit, net.require_intervention("B"),
                                            net.require_intervention("A"));
  CHECK(ba.estimable);
  CHECK(ba.estimate == doctest::Approx(0.5).epsilon(1e-10));
  const EffectEstimate ab = relative_effect(fit, net.require_intervention("A"),
                                            net.require_intervention("B"));
  CHECK(ab.estimate == doctest::Approx(-0.5).epsilon(1e-10));
  CHECK(ab.low == doctest::Approx(-ba.high).epsilon(1e-10));

  const auto effects = cnma::effects_vs_reference(fit, net.require_intervention("A"));
  REQUIRE(effects.size() == 2);
  CHECK(effects[0].estimate == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(effects[1].estimate == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("NMA rejects disconnected networks") {
  const Network net = quick_net({{"A", "B", 0.0, 1.0}, {"C", "D", 0.0, 1.0}});
  CHECK_THROWS_WITH_AS(fit_nma(net, 0),
                       doctest::Contains("disconnected"), ModelError);
}

TEST_CASE("additive CNMA on a connected network with heterogeneity") {
  // A+B vs P should be near beta_A + beta_B; deliberate inconsistency keeps Q > 0.
  const Network net = quick_net({{"A", "P", 1.0, 0.3},
                                 {"B", "P", 0.6, 0.3},
                                 {"A+B", "P", 1.9, 0.3},
                                 {"A+B", "A", 0.4, 0.3},
                                 {"B", "A", -0.2, 0.3}});
  const ModelFit fit = fit_cnma(net, {"P"});
  CHECK(fit.kind == FitKind::cnma);
  CHECK(fit.columns == std::vector<std::string>{"A", "B"});
  CHECK(fit.rank == 2);
  CHECK(fit.df == 3);
  CHECK(fit.Q > 0.0);
  CHECK(fit.p_Q > 0.0);
  CHECK(fit.p_Q < 1.0);

  // The additive structure forces effect(A+B vs P) = effect(A vs P) + effect(B vs P).
  const int p = net.require_intervention("P");
  const auto ab = relative_effect(fit, net.require_intervention("A+B"), p);
  const auto a = relative_effect(fit, net.require_intervention("A"), p);
  const auto b = relative_effect(fit, net.require_intervention("B"), p);
  CHECK(ab.estimate == doctest::Approx(a.estimate + b.estimate).epsilon(1e-10));
}

TEST_CASE("CNMA rejects an interaction that no intervention contains") {
  const Network net = quick_net({{"P", "A", 0.0, 1.0}, {"P", "B", 0.0, 1.0}});
  CHECK_THROWS_WITH_AS(fit_cnma(net, {"P"}, {{"A", "B"}}),
                       doctest::Contains("identically zero"), ModelError);
}

TEST_CASE("CNMA estimability across a disconnected network") {
  // Components reconnect what the comparison graph does not: subnet {P, A} and
  // subnet {B, A+B} share information through component A.
  const Network net = quick_net({{"A", "P", 0.8, 0.2},
                                 {"A+B", "B", 0.7, 0.2}});
  const ModelFit fit = fit_cnma(net, {"P"});
  CHECK(fit.rank == 1);  // both rows measure beta_A
  CHECK(fit.df == 1);

  const int p = net.require_intervention("P");
  const auto a_vs_p = relative_effect(fit, net.require_intervention("A"), p);
  CHECK(a_vs_p.estimable);
  // Inverse-variance average of the two identical-weight measurements of beta_A.
  CHECK(a_vs_p.estimate == doctest::Approx(0.75).epsilon(1e-10));

  // B never occurs alone against anything that pins it down: inestimable.
  const auto b_vs_p = relative_effect(fit, net.require_intervention("B"), p);
  CHECK(!b_vs_p.estimable);
  CHECK(std::isnan(b_vs_p.estimate));
  CHECK(std::isnan(b_vs_p.low));

  const auto ab_vs_b = relative_effect(fit, net.require_intervention("A+B"),
                                       net.require_intervention("B"));
  CHECK(ab_vs_b.estimable);
  CHECK(ab_vs_b.estimate == doctest::Approx(0.75).epsilon(1e-10));
}

TEST_CASE("separate NMAs add up to the joint block fit") {
  const Network net = quick_net({{"A", "B", 0.5, 0.4},
                                 {"B", "C", 0.2, 0.4},
                                 {"A", "C", 0.9, 0.4},
                                 {"D", "E", 0.3, 0.5},
                                 {"E", "F", 0.1, 0.5},
                                 {"D", "F", 0.2, 0.5}});
  const auto sep = fit_separate_nmas(net);
  REQUIRE(sep.fits.size() == 2);
  CHECK(sep.df_total == 2);
  CHECK(sep.q_total == doctest::Approx(sep.fits[0].Q + sep.fits[1].Q).epsilon(1e-14));
  CHECK(sep.joint.Q == doctest::Approx(sep.q_total).epsilon(1e-10));
  CHECK(sep.joint.df == sep.df_total);
  CHECK(sep.references.size() == 2);
  CHECK(net.interventions()[sep.references[0]].label == "A");
  CHECK(net.interventions()[sep.references[1]].label == "D");

  // Requesting a reference pins its component first and keeps it as local ref.
  const auto sep2 = fit_separate_nmas(net, net.require_intervention("E"));
  CHECK(net.interventions()[sep2.references[0]].label == "E");
}

TEST_CASE("nested Q difference between NMA and additive CNMA") {
  const Network net = quick_net({{"A", "P", 1.0, 0.3},
                                 {"B", "P", 0.6, 0.3},
                                 {"A+B", "P", 1.9, 0.3},
                                 {"A+B", "A", 0.4, 0.3},
                                 {"B", "A", -0.2, 0.3}});
  const ModelFit nma = fit_nma(net, net.require_intervention("P"));
  const ModelFit add = fit_cnma(net, {"P"});
  CHECK(add.Q >= nma.Q - 1e-12);  // additive is nested in the NMA

  const auto diff = q_difference_test(add, nma);
  CHECK(diff.df_diff == add.df - nma.df);
  CHECK(diff.q_diff == doctest::Approx(add.Q - nma.Q).epsilon(1e-10));
  CHECK(diff.p > 0.0);
  CHECK(diff.p <= 1.0);

  // Reversed order is not nested (rich model must come second).
  CHECK_THROWS_AS(q_difference_test(nma, add), ModelError);
  // A fit of different data is rejected.
  const Network other = quick_net({{"A", "P", 1.0, 0.5},
                                   {"B", "P", 0.6, 0.5},
                                   {"A+B", "P", 1.9, 0.5},
                                   {"A+B", "A", 0.4, 0.5},
                                   {"B", "A", -0.2, 0.5}});
  CHECK_THROWS_AS(q_difference_test(fit_cnma(other, {"P"}), nma), ModelError);

  const auto raw = q_difference_raw(add.Q, add.df, nma.Q, nma.df);
  CHECK(raw.q_diff == doctest::Approx(diff.q_diff).epsilon(1e-12));
  CHECK(raw.p == doctest::Approx(diff.p).epsilon(1e-12));
  CHECK(q_difference_raw(1.0, 5, 3.0, 4).q_diff == 0.0);  // clamped
  CHECK(q_difference_raw(1.0, 5, 3.0, 4).p == 1.0);
  CHECK_THROWS_AS(q_difference_raw(1.0, 4, 0.5, 4), ModelError);
}

TEST_CASE("Q is invariant to the NMA reference and to row order") {
  const Network net = quick_net({{"A", "P", 1.0, 0.3},
                                 {"B", "P", 0.6, 0.4},
                                 {"A+B", "P", 1.9, 0.5},
                                 {"A+B", "A", 0.4, 0.6},
                                 {"B", "A", -0.2, 0.7}});
  const ModelFit f0 = fit_nma(net, 0);
  for (int ref = 1; ref < net.n(); ++ref) {
    const ModelFit fr = fit_nma(net, ref);
    CHECK(fr.Q == doctest::Approx(f0.Q).epsilon(1e-10));
    CHECK(fr.df == f0.df);
    CHECK(fr.tau2 == doctest::Approx(f0.tau2).epsilon(1e-10));
  }

  const Network shuffled = quick_net({{"B", "A", -0.2, 0.7},
                                      {"A+B", "A", 0.4, 0.6},
                                      {"A", "P", 1.0, 0.3},
                                      {"A+B", "P", 1.9, 0.5},
                                      {"B", "P", 0.6, 0.4}});
  const ModelFit fs = fit_cnma(shuffled, {"P"});
  const ModelFit fo = fit_cnma(net, {"P"});
  CHECK(fs.Q == doctest::Approx(fo.Q).epsilon(1e-10));
  CHECK(fs.tau2 == doctest::Approx(fo.tau2).epsilon(1e-10));
}
