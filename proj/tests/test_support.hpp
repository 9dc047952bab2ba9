#pragma once

#include <string>
#include <tuple>
#include <vector>

#include "cnma/network.hpp"

/// Builds a two-arm network from (treat1, treat2, effect, se) tuples with
/// auto-numbered study ids s1, s2, ...
inline cnma::Network quick_net(
    const std::vector<std::tuple<std::string, std::string, double, double>>& specs) {
  std::vector<cnma::ContrastRow> rows;
  int i = 0;
  for (const auto& [t1, t2, eff, se] : specs)
    rows.push_back({"s" + std::to_string(++i), t1, t2, eff, se});
  return cnma::Network::from_contrasts(rows);
}
