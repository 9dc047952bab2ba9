#include "cnma/combination.hpp"

#include <algorithm>
#include <utility>

#include "cnma/errors.hpp"
#include "cnma/linalg.hpp"

namespace cnma {

InteractionPair::InteractionPair(std::string x, std::string y) {
  if (x == y) throw InputError("interaction of a component with itself: '" + x + "'");
  if (x < y) {
    a = std::move(x);
    b = std::move(y);
  } else {
    a = std::move(y);
    b = std::move(x);
  }
}

InteractionPair parse_interaction(const std::string& text, char separator) {
  const auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return std::string();
    return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
  };
  const auto pos = text.find(separator);
  if (pos == std::string::npos || text.find(separator, pos + 1) != std::string::npos)
    throw InputError("cannot parse interaction '" + text + "' (expected a" +
                     std::string(1, separator) + "b)");
  const std::string lhs = trim(text.substr(0, pos));
  const std::string rhs = trim(text.substr(pos + 1));
  if (lhs.empty() || rhs.empty())
    throw InputError("cannot parse interaction '" + text + "' (expected a" +
                     std::string(1, separator) + "b)");
  return InteractionPair(lhs, rhs);
}

std::string interaction_set_name(std::vector<InteractionPair> set) {
  if (set.empty()) return "additive";
  std::sort(set.begin(), set.end());
  std::string out;
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (i) out.push_back('+');
    out += set[i].name();
  }
  return out;
}

bool CombinationMatrix::has_component(const std::string& name) const {
  const auto end = names_.begin() + component_count_;
  return std::find(names_.begin(), end, name) != end;
}

int CombinationMatrix::column_index(const std::string& name) const {
  const auto it = std::find(names_.begin(), names_.end(), name);
  return it == names_.end() ? -1 : static_cast<int>(it - names_.begin());
}

CombinationMatrix build_combination_matrix(const Network& net,
                                           const std::set<std::string>& inactive_components) {
  std::set<std::string> universe;
  for (const auto& iv : net.interventions())
    for (const auto& comp : iv.components)
      if (!inactive_components.count(comp)) universe.insert(comp);

  CombinationMatrix cm;
  cm.names_.assign(universe.begin(), universe.end());  // lexicographic via std::set
  cm.component_count_ = static_cast<int>(cm.names_.size());
  cm.entries_ = Eigen::MatrixXi::Zero(net.n(), cm.component_count_);
  for (int i = 0; i < net.n(); ++i)
    for (const auto& comp : net.interventions()[i].components) {
      const int j = cm.column_index(comp);
      if (j >= 0) cm.entries_(i, j) = 1;
    }
  return cm;
}

CombinationMatrix add_interaction_columns(const CombinationMatrix& base,
                                          const std::vector<InteractionPair>& interactions) {
  CombinationMatrix cm = base;
  for (const auto& pair : interactions) {
    for (const auto& comp : {pair.a, pair.b})
      if (!cm.has_component(comp))
        throw InputError("interaction '" + pair.name() + "' refers to unknown component '" +
                         comp + "'");
    if (std::find(cm.interactions_.begin(), cm.interactions_.end(), pair) !=
        cm.interactions_.end())
      throw InputError("duplicate interaction '" + pair.name() + "'");

    const int ca = cm.column_index(pair.a);
    const int cb = cm.column_index(pair.b);
    cm.entries_.conservativeResize(Eigen::NoChange, cm.entries_.cols() + 1);
    cm.entries_.col(cm.entries_.cols() - 1) =
        cm.entries_.col(ca).cwiseProduct(cm.entries_.col(cb));
    cm.names_.push_back(pair.name());
    cm.interactions_.push_back(pair);
  }
  return cm;
}

Eigen::MatrixXi incidence_matrix(const Network& net) {
  Eigen::MatrixXi b = Eigen::MatrixXi::Zero(net.m(), net.n());
  for (int j = 0; j < net.m(); ++j) {
    b(j, net.comparisons()[j].treat1) = 1;
    b(j, net.comparisons()[j].treat2) = -1;
  }
  return b;
}

DesignMatrices build_design(const Network& net, const CombinationMatrix& combo) {
  DesignMatrices dm;
  dm.incidence = incidence_matrix(net);
  dm.design = dm.incidence * combo.entries();
  dm.rank = numerical_rank(dm.design.cast<double>());
  return dm;
}

int design_rank(const Network& net, const Eigen::MatrixXi& theta_map) {
  return numerical_rank((incidence_matrix(net) * theta_map).cast<double>());
}

}  // namespace cnma
