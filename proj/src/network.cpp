#include "cnma/network.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "cnma/errors.hpp"

namespace cnma {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string join(const std::vector<std::string>& parts, char sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out.push_back(sep);
    out += parts[i];
  }
  return out;
}

}  // namespace

Intervention parse_intervention_label(const std::string& label, char separator) {
  const std::string trimmed = trim(label);
  if (trimmed.empty()) throw InputError("empty intervention label");
  if (trimmed.back() == separator)  // getline would silently drop the trailing empty part
    throw InputError("empty component in intervention label '" + label + "'");
  std::vector<std::string> components;
  std::stringstream ss(label);
  std::string part;
  while (std::getline(ss, part, separator)) {
    const std::string c = trim(part);
    if (c.empty())
      throw InputError("empty component in intervention label '" + label + "'");
    components.push_back(c);
  }
  std::sort(components.begin(), components.end());
  if (std::adjacent_find(components.begin(), components.end()) != components.end())
    throw InputError("duplicate component in intervention label '" + label + "'");
  return Intervention{join(components, separator), std::move(components)};
}

Network Network::from_contrasts(const std::vector<ContrastRow>& rows, char separator) {
  if (rows.empty()) throw InputError("network needs at least one comparison");

  Network net;
  net.separator_ = separator;

  std::map<std::string, Intervention> by_label;
  for (const auto& row : rows) {
    for (const auto& raw : {row.treat1, row.treat2}) {
      Intervention iv = parse_intervention_label(raw, separator);
      by_label.emplace(iv.label, std::move(iv));
    }
  }
  net.interventions_.reserve(by_label.size());
  for (auto& [label, iv] : by_label) net.interventions_.push_back(std::move(iv));

  std::map<std::string, int> study_use;
  for (const auto& row : rows) {
    Comparison c;
    c.study_id = trim(row.study);
    if (c.study_id.empty()) throw InputError("empty study id");
    c.treat1 = *net.index_of(parse_intervention_label(row.treat1, separator).label);
    c.treat2 = *net.index_of(parse_intervention_label(row.treat2, separator).label);
    if (c.treat1 == c.treat2)
      throw InputError("study '" + c.study_id + "' compares an intervention with itself");
    c.effect = row.effect;
    c.std_err = row.std_err;
    if (!std::isfinite(c.effect))
      throw InputError("study '" + c.study_id + "' has a non-finite effect");
    if (!(c.std_err > 0.0) || !std::isfinite(c.std_err))
      throw InputError("study '" + c.study_id + "' needs a positive finite standard error");
    if (++study_use[c.study_id] > 1)
      throw InputError("study '" + c.study_id +
                       "' has more than one comparison; multi-arm studies are not supported "
                       "(two-arm studies only)");
    net.comparisons_.push_back(std::move(c));
  }
  return net;
}

std::optional<int> Network::index_of(const std::string& label) const {
  const auto it = std::lower_bound(
      interventions_.begin(), interventions_.end(), label,
      [](const Intervention& iv, const std::string& l) { return iv.label < l; });
  if (it == interventions_.end() || it->label != label) return std::nullopt;
  return static_cast<int>(it - interventions_.begin());
}

int Network::require_intervention(const std::string& label) const {
  const std::string canonical = parse_intervention_label(label, separator_).label;
  const auto idx = index_of(canonical);
  if (!idx)
    throw InputError("intervention '" + label + "' is not part of the network");
  return *idx;
}

ConnectivityInfo connectivity(const Network& net, std::optional<int> reference) {
  const int n = net.n();
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  const auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& c : net.comparisons()) {
    const int a = find(c.treat1);
    const int b = find(c.treat2);
    if (a != b) parent[a] = b;
  }

  std::map<int, std::vector<int>> groups;
  for (int i = 0; i < n; ++i) groups[find(i)].push_back(i);

  ConnectivityInfo info;
  for (auto& [root, members] : groups) info.components.push_back(std::move(members));

  std::stable_sort(info.components.begin(), info.components.end(),
                   [&](const std::vector<int>& a, const std::vector<int>& b) {
                     if (a.size() != b.size()) return a.size() > b.size();
                     return net.interventions()[a.front()].label <
                            net.interventions()[b.front()].label;
                   });
  if (reference) {
    const auto it = std::find_if(info.components.begin(), info.components.end(),
                                 [&](const std::vector<int>& comp) {
                                   return std::find(comp.begin(), comp.end(), *reference) !=
                                          comp.end();
                                 });
    if (it != info.components.end()) std::rotate(info.components.begin(), it, it + 1);
  }

  info.component_of.assign(n, -1);
  for (std::size_t ci = 0; ci < info.components.size(); ++ci)
    for (int member : info.components[ci]) info.component_of[member] = static_cast<int>(ci);
  return info;
}

namespace {

Network rebuild(const Network& net, const std::vector<const Comparison*>& kept,
                const char* empty_message) {
  if (kept.empty()) throw InputError(empty_message);
  std::vector<ContrastRow> rows;
  rows.reserve(kept.size());
  for (const Comparison* c : kept)
    rows.push_back({c->study_id, net.interventions()[c->treat1].label,
                    net.interventions()[c->treat2].label, c->effect, c->std_err});
  return Network::from_contrasts(rows, net.separator());
}

}  // namespace

Network subnetwork(const Network& net, const std::vector<int>& members) {
  const std::set<int> in_set(members.begin(), members.end());
  std::vector<const Comparison*> kept;
  for (const auto& c : net.comparisons())
    if (in_set.count(c.treat1) && in_set.count(c.treat2)) kept.push_back(&c);
  return rebuild(net, kept, "subnetwork contains no comparisons");
}

Network without_studies(const Network& net, const std::set<std::string>& study_ids) {
  std::vector<const Comparison*> kept;
  for (const auto& c : net.comparisons())
    if (!study_ids.count(c.study_id)) kept.push_back(&c);
  return rebuild(net, kept, "removing these studies leaves no comparisons");
}

int degrees_of_freedom(const Network& net, ModelKind kind, int rank) {
  const int base = net.arm_count() - net.k();
  int df = 0;
  switch (kind) {
    case ModelKind::standard_nma:
      df = base - (net.n() - 1);
      break;
    case ModelKind::additive_cnma:
      if (rank < 0) throw ModelError("additive/interaction CNMA df needs the design rank");
      df = base - rank;
      break;
    case ModelKind::separate_nmas:
      df = base - (net.n() - connectivity(net).n_c());
      break;
  }
  if (df < 0)
    throw ModelError("negative degrees of freedom (" + std::to_string(df) +
                     "): model is over-parameterized for the data");
  return df;
}

}  // namespace cnma
