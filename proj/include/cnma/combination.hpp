#pragma once

#include <Eigen/Dense>
#include <set>
#include <string>
#include <vector>

#include "cnma/network.hpp"

namespace cnma {

/// An unordered component pair; canonical form keeps a < b, printed "a*b".
struct InteractionPair {
  std::string a;
  std::string b;

  InteractionPair() = default;
  InteractionPair(std::string x, std::string y);

  std::string name() const { return a + "*" + b; }
  bool operator==(const InteractionPair& o) const { return a == o.a && b == o.b; }
  bool operator<(const InteractionPair& o) const {
    return a != o.a ? a < o.a : b < o.b;
  }
};

/// Parses "a*b" (separator configurable).
InteractionPair parse_interaction(const std::string& text, char separator = '*');

/// Renders an interaction set as "a*b+c*d" (sorted).
std::string interaction_set_name(std::vector<InteractionPair> set);

/// The n x (c+l) 0/1 matrix mapping interventions to components plus optional
/// interaction columns. Component columns come first, in lexicographic order;
/// a row is all zeros for an intervention with no active components (the
/// placebo convention).
class CombinationMatrix {
 public:
  const Eigen::MatrixXi& entries() const { return entries_; }
  const std::vector<std::string>& column_names() const { return names_; }
  int rows() const { return static_cast<int>(entries_.rows()); }
  int cols() const { return static_cast<int>(entries_.cols()); }
  int component_count() const { return component_count_; }
  int interaction_count() const { return cols() - component_count_; }
  const std::vector<InteractionPair>& interactions() const { return interactions_; }

  bool has_component(const std::string& name) const;
  int column_index(const std::string& name) const;  // -1 if absent

 private:
  Eigen::MatrixXi entries_;
  std::vector<std::string> names_;
  int component_count_ = 0;
  std::vector<InteractionPair> interactions_;

  friend CombinationMatrix build_combination_matrix(const Network&,
                                                    const std::set<std::string>&);
  friend CombinationMatrix add_interaction_columns(const CombinationMatrix&,
                                                   const std::vector<InteractionPair>&);
};

/// Builds C over the union of all intervention components minus the inactive
/// set (typically the placebo label).
CombinationMatrix build_combination_matrix(const Network& net,
                                           const std::set<std::string>& inactive_components = {});

/// Appends one column per pair, each the elementwise product of its parent
/// component columns. Unknown components and duplicate interactions are
/// rejected.
CombinationMatrix add_interaction_columns(const CombinationMatrix& base,
                                          const std::vector<InteractionPair>& interactions);

/// Design matrices derived from a network and a parameter map.
struct DesignMatrices {
  Eigen::MatrixXi incidence;  // B: m x n, +1 at treat1, -1 at treat2
  Eigen::MatrixXi design;     // B * C, exact integer arithmetic
  int rank = 0;               // numerical rank of design
};

Eigen::MatrixXi incidence_matrix(const Network& net);

DesignMatrices build_design(const Network& net, const CombinationMatrix& combo);

/// Numerical rank of B * C without constructing a full CombinationMatrix.
int design_rank(const Network& net, const Eigen::MatrixXi& theta_map);

}  // namespace cnma
