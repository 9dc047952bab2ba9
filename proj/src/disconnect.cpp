#include "cnma/disconnect.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "cnma/errors.hpp"

namespace cnma {

namespace {

void require_connected(const Network& net, const char* what) {
  if (!connectivity(net).connected())
    throw InputError(std::string(what) + " needs a connected network");
}

}  // namespace

std::vector<int> minimal_set(const Network& net, int reference) {
  if (reference < 0 || reference >= net.n())
    throw InputError("reference intervention index out of range");
  require_connected(net, "minimal-set computation");

  // direct_only[i]: every comparison of i has the reference on the other arm.
  std::vector<bool> direct_only(net.n(), true);
  for (const auto& c : net.comparisons()) {
    if (c.treat1 != reference) direct_only[c.treat2] = false;
    if (c.treat2 != reference) direct_only[c.treat1] = false;
  }
  std::vector<int> out;
  for (int i = 0; i < net.n(); ++i)
    if (i == reference || direct_only[i]) out.push_back(i);
  return out;
}

std::vector<DisconnectedDesign> enumerate_disconnected(const Network& net, int reference,
                                                       bool force) {
  const std::vector<int> minimal = minimal_set(net, reference);  // validates input
  std::vector<int> others;
  for (int i = 0; i < net.n(); ++i)
    if (!std::binary_search(minimal.begin(), minimal.end(), i)) others.push_back(i);

  const int free_count = static_cast<int>(others.size());
  if (free_count > 20 && !force)
    throw InputError("enumeration would sweep 2^" + std::to_string(free_count) +
                     " candidate main sets; pass force to proceed");

  const int n = net.n();
  const int m = net.m();
  std::map<std::set<std::string>, DisconnectedDesign> by_removed;

  std::vector<char> in_main(n);
  std::vector<int> degree(n), parent(n);
  const auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };

  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << free_count); ++mask) {
    std::fill(in_main.begin(), in_main.end(), 0);
    for (int i : minimal) in_main[i] = 1;
    int main_size = static_cast<int>(minimal.size());
    for (int b = 0; b < free_count; ++b)
      if (mask >> b & 1) {
        in_main[others[b]] = 1;
        ++main_size;
      }
    if (main_size == n) continue;  // no auxiliary side left

    // Keep studies with both arms on the same side; count degrees and union.
    std::fill(degree.begin(), degree.end(), 0);
    std::iota(parent.begin(), parent.end(), 0);
    std::set<std::string> removed;
    int kept = 0;
    for (int j = 0; j < m; ++j) {
      const auto& c = net.comparisons()[j];
      if (in_main[c.treat1] != in_main[c.treat2]) {
        removed.insert(c.study_id);
        continue;
      }
      ++kept;
      ++degree[c.treat1];
      ++degree[c.treat2];
      const int a = find(c.treat1);
      const int b = find(c.treat2);
      if (a != b) parent[a] = b;
    }

    if (std::any_of(degree.begin(), degree.end(), [](int d) { return d == 0; }))
      continue;  // an intervention would drop out
    // The main side must be exactly one connected component.
    const int main_root = find(reference);
    bool main_connected = true;
    for (int i = 0; i < n && main_connected; ++i)
      if (in_main[i] && find(i) != main_root) main_connected = false;
    if (!main_connected) continue;

    if (by_removed.count(removed)) continue;  // same remaining data, same design

    DisconnectedDesign design;
    for (int i = 0; i < n; ++i)
      if (in_main[i]) design.main_set.push_back(net.interventions()[i].label);

    // Auxiliary components: group the outside interventions by root.
    std::map<int, std::vector<int>> aux;
    int n_c = 1;
    for (int i = 0; i < n; ++i)
      if (!in_main[i]) aux[find(i)].push_back(i);
    for (auto& [root, members] : aux) {
      std::vector<std::string> labels;
      labels.reserve(members.size());
      for (int i : members) labels.push_back(net.interventions()[i].label);
      design.auxiliary_partition.push_back(std::move(labels));
      ++n_c;
    }
    std::sort(design.auxiliary_partition.begin(), design.auxiliary_partition.end(),
              [](const std::vector<std::string>& a, const std::vector<std::string>& b) {
                if (a.size() != b.size()) return a.size() > b.size();
                return a.front() < b.front();
              });

    design.removed_studies = removed;
    design.resulting_counts = {kept, kept, n_c};
    by_removed.emplace(std::move(removed), std::move(design));
  }

  std::vector<DisconnectedDesign> out;
  out.reserve(by_removed.size());
  for (auto& [key, design] : by_removed) out.push_back(std::move(design));

  const auto main_studies = [&](const DisconnectedDesign& d) {
    // Studies fully inside the main set = remaining studies minus auxiliary ones.
    std::set<std::string> main(d.main_set.begin(), d.main_set.end());
    int count = 0;
    for (const auto& c : net.comparisons())
      if (!d.removed_studies.count(c.study_id) &&
          main.count(net.interventions()[c.treat1].label))
        ++count;
    return count;
  };
  std::stable_sort(out.begin(), out.end(),
                   [&](const DisconnectedDesign& a, const DisconnectedDesign& b) {
                     if (a.resulting_counts.m != b.resulting_counts.m)
                       return a.resulting_counts.m > b.resulting_counts.m;
                     if (a.resulting_counts.k != b.resulting_counts.k)
                       return a.resulting_counts.k > b.resulting_counts.k;
                     const int am = main_studies(a);
                     const int bm = main_studies(b);
                     if (am != bm) return am > bm;
                     return a.main_set < b.main_set;
                   });
  return out;
}

Network apply_disconnect(const Network& net, const DisconnectedDesign& design) {
  if (design.removed_studies.empty())
    throw InputError("design removes no studies; the network would stay connected");
  std::set<std::string> known;
  for (const auto& c : net.comparisons()) known.insert(c.study_id);
  for (const auto& id : design.removed_studies)
    if (!known.count(id))
      throw InputError("stale design: study '" + id + "' is not part of this network");

  const Network remaining = without_studies(net, design.removed_studies);
  const auto conn = connectivity(remaining);
  if (remaining.n() != net.n() || remaining.k() != design.resulting_counts.k ||
      remaining.m() != design.resulting_counts.m || conn.n_c() != design.resulting_counts.n_c)
    throw ModelError("design does not match this network (counts disagree after removal)");
  return remaining;
}

const DisconnectedDesign& sample_disconnected(const std::vector<DisconnectedDesign>& designs,
                                              PhiloxEngine& rng) {
  if (designs.empty()) throw InputError("no disconnected designs to sample from");
  return designs[rng.uniform_int(0, static_cast<int>(designs.size()) - 1)];
}

}  // namespace cnma
