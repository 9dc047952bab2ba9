#include <Eigen/Dense>
#include <vector>

#include "cnma/combination.hpp"
#include "cnma/errors.hpp"
#include "doctest.h"
#include "test_support.hpp"

using cnma::add_interaction_columns;
using cnma::build_combination_matrix;
using cnma::build_design;
using cnma::CombinationMatrix;
using cnma::incidence_matrix;
using cnma::InputError;
using cnma::InteractionPair;
using cnma::interaction_set_name;
using cnma::Network;
using cnma::parse_interaction;

TEST_CASE("interaction pairs canonicalize and parse") {
  const InteractionPair p("b", "a");
  CHECK(p.a == "a");
  CHECK(p.b == "b");
  CHECK(p.name() == "a*b");
  CHECK(p == InteractionPair("a", "b"));
  CHECK(InteractionPair("a", "b") < InteractionPair("a", "c"));
  CHECK_THROWS_AS(InteractionPair("a", "a"), InputError);

  CHECK(parse_interaction("B*A").name() == "A*B");
  CHECK(parse_interaction(" B * A ").name() == "A*B");
  CHECK_THROWS_AS(parse_interaction("A"), InputError);
  CHECK_THROWS_AS(parse_interaction("A*B*C"), InputError);
  CHECK_THROWS_AS(parse_interaction("A*"), InputError);

  CHECK(interaction_set_name({}) == "additive");
  CHECK(interaction_set_name({{"c", "d"}, {"a", "b"}}) == "a*b+c*d");
}

TEST_CASE("combination matrix over active components") {
  const Network net = quick_net({{"P", "A", 0.0, 1.0},
                                 {"P", "B", 0.0, 1.0},
                                 {"A+B", "P", 0.0, 1.0},
                                 {"A+C", "A", 0.0, 1.0}});
  const CombinationMatrix combo = build_combination_matrix(net, {"P"});
  CHECK(combo.rows() == net.n());
  CHECK(combo.component_count() == 3);
  CHECK(combo.cols() == 3);
  CHECK(combo.column_names() == std::vector<std::string>{"A", "B", "C"});
  CHECK(combo.has_component("A"));
  CHECK(!combo.has_component("P"));

  const auto row = [&](const std::string& label) {
    return combo.entries().row(net.require_intervention(label));
  };
  CHECK(row("P").isZero());
  CHECK(row("A+B").sum() == 2);
  CHECK(row("A+B")(combo.column_index("A")) == 1);
  CHECK(row("A+B")(combo.column_index("B")) == 1);
  CHECK(row("A+B")(combo.column_index("C")) == 0);
  CHECK(row("A+C")(combo.column_index("C")) == 1);
  CHECK(combo.column_index("missing") == -1);
}

TEST_CASE("interaction columns are elementwise products") {
  const Network net = quick_net({{"P", "A", 0.0, 1.0},
                                 {"A+B", "P", 0.0, 1.0},
                                 {"B", "A+B", 0.0, 1.0}});
  const CombinationMatrix base = build_combination_matrix(net, {"P"});
  const CombinationMatrix with = add_interaction_columns(base, {{"A", "B"}});
  CHECK(with.cols() == base.cols() + 1);
  CHECK(with.component_count() == base.component_count());
  CHECK(with.interaction_count() == 1);
  CHECK(with.column_names().back() == "A*B");
  const int j = with.column_index("A*B");
  CHECK(with.entries()(net.require_intervention("A+B"), j) == 1);
  CHECK(with.entries()(net.require_intervention("A"), j) == 0);
  CHECK(with.entries()(net.require_intervention("P"), j) == 0);
  // `has_component` looks at component columns only.
  CHECK(!with.has_component("A*B"));

  CHECK_THROWS_AS(add_interaction_columns(base, {{"A", "Z"}}), InputError);
  CHECK_THROWS_AS(add_interaction_columns(with, {{"A", "B"}}), InputError);
  CHECK_THROWS_AS(add_interaction_columns(base, {{"A", "B"}, {"B", "A"}}), InputError);

  // A pair never realized together still yields a column (all zero) at this
  // layer; the estimator is where it gets rejected.
  const Network sparse = quick_net({{"P", "A", 0.0, 1.0}, {"P", "B", 0.0, 1.0}});
  const auto zero = add_interaction_columns(build_combination_matrix(sparse, {"P"}), {{"A", "B"}});
  CHECK(zero.entries().col(zero.column_index("A*B")).isZero());
}

TEST_CASE("incidence matrix signs") {
  const Network net = quick_net({{"B", "A", 0.0, 1.0}, {"A", "C", 0.0, 1.0}});
  const Eigen::MatrixXi b = incidence_matrix(net);
  REQUIRE(b.rows() == 2);
  REQUIRE(b.cols() == 3);
  CHECK(b(0, net.require_intervention("B")) == 1);
  CHECK(b(0, net.require_intervention("A")) == -1);
  CHECK(b(1, net.require_intervention("A")) == 1);
  CHECK(b(1, net.require_intervention("C")) == -1);
  CHECK(b.row(0).sum() == 0);
}

TEST_CASE("design rank agrees with an LU-decomposition oracle") {
  const Network net = quick_net({{"P", "A", 0.0, 1.0},
                                 {"P", "B", 0.0, 1.0},
                                 {"A+B", "P", 0.0, 1.0},
                                 {"A+C", "B", 0.0, 1.0},
                                 {"C", "A+C", 0.0, 1.0}});
  const CombinationMatrix combo = build_combination_matrix(net, {"P"});
  const auto dm = build_design(net, combo);
  CHECK(dm.incidence == incidence_matrix(net));
  CHECK(dm.design == dm.incidence * combo.entries());

  Eigen::FullPivLU<Eigen::MatrixXd> lu(dm.design.cast<double>());
  CHECK(dm.rank == lu.rank());

  // The standard NMA parametrization (identity minus reference column) always
  // has rank n - 1 on a connected network.
  Eigen::MatrixXi ident = Eigen::MatrixXi::Identity(net.n(), net.n());
  Eigen::MatrixXi nma_map(net.n(), net.n() - 1);
  nma_map << ident.rightCols(net.n() - 1);
  CHECK(cnma::design_rank(net, nma_map) == net.n() - 1);
}
