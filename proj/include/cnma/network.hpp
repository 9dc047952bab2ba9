#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace cnma {

/// A (possibly multicomponent) intervention. Components are stored sorted and
/// unique; the canonical label joins them with the separator, so "B+A" and
/// "A+B" denote the same intervention.
struct Intervention {
  std::string label;
  std::vector<std::string> components;
};

/// Splits a label like "onda+scop" into its components. Components are
/// trimmed and order-normalized; empty or duplicate components are rejected.
Intervention parse_intervention_label(const std::string& label, char separator = '+');

/// One two-arm comparison: effect on the log scale (treat1 vs treat2) with
/// its standard error. treat1/treat2 index into Network::interventions().
struct Comparison {
  std::string study_id;
  int treat1 = -1;
  int treat2 = -1;
  double effect = 0.0;
  double std_err = 0.0;
};

/// Raw ingestion row, contrast level.
struct ContrastRow {
  std::string study;
  std::string treat1;
  std::string treat2;
  double effect = 0.0;
  double std_err = 0.0;
};

/// A network of two-arm studies. Immutable after construction; interventions
/// are kept sorted by canonical label so matrix row/column order is
/// deterministic. Multi-arm input (a study id owning more than one
/// comparison) is rejected.
class Network {
 public:
  static Network from_contrasts(const std::vector<ContrastRow>& rows, char separator = '+');

  const std::vector<Intervention>& interventions() const { return interventions_; }
  const std::vector<Comparison>& comparisons() const { return comparisons_; }

  int n() const { return static_cast<int>(interventions_.size()); }
  int m() const { return static_cast<int>(comparisons_.size()); }
  /// Number of studies; equals m() in the two-arm setting.
  int k() const { return static_cast<int>(comparisons_.size()); }
  /// Total number of intervention arms (2 per study).
  int arm_count() const { return 2 * k(); }

  char separator() const { return separator_; }

  /// Index of the intervention with this canonical label, or nullopt.
  std::optional<int> index_of(const std::string& label) const;
  /// Like index_of but also canonicalizes ("B+A" finds "A+B"); throws
  /// InputError when absent.
  int require_intervention(const std::string& label) const;

 private:
  std::vector<Intervention> interventions_;
  std::vector<Comparison> comparisons_;
  char separator_ = '+';
};

/// Connected components of the comparison graph. Components are ordered with
/// the reference's component first (when given), then by decreasing size,
/// ties broken by smallest member label; members are sorted by label.
struct ConnectivityInfo {
  std::vector<std::vector<int>> components;
  std::vector<int> component_of;  // intervention index -> position in components

  int n_c() const { return static_cast<int>(components.size()); }
  bool connected() const { return components.size() == 1; }
};

ConnectivityInfo connectivity(const Network& net, std::optional<int> reference = std::nullopt);

/// The induced subnetwork on a set of intervention indices: keeps exactly the
/// studies whose two arms both lie in the set.
Network subnetwork(const Network& net, const std::vector<int>& members);

/// Drops the given studies; interventions left without any comparison drop
/// out too. Throws when nothing remains.
Network without_studies(const Network& net, const std::set<std::string>& study_ids);

enum class ModelKind { standard_nma, additive_cnma, separate_nmas };

/// Degrees of freedom of Cochran's Q for the given model class:
///   standard NMA   n_a - k - (n - 1)
///   (C)NMA         n_a - k - r          (r = design matrix rank)
///   separate NMAs  n_a - k - (n - n_c)
/// Throws ModelError when the raw value is negative.
int degrees_of_freedom(const Network& net, ModelKind kind, int rank = -1);

}  // namespace cnma
