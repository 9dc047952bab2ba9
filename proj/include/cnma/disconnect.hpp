#pragma once

#include <set>
#include <string>
#include <vector>

#include "cnma/network.hpp"
#include "cnma/rng.hpp"

namespace cnma {

/// One way of splitting a connected network into a main subnetwork (holding
/// the reference) and one or more auxiliary subnetworks by removing every
/// study that bridges the two sides.
struct DisconnectedDesign {
  std::vector<std::string> main_set;                        // sorted labels, contains reference
  std::vector<std::vector<std::string>> auxiliary_partition;  // per aux component, sorted labels
  std::set<std::string> removed_studies;

  struct Counts {
    int k = 0;    // studies remaining
    int m = 0;    // comparisons remaining (= k, two-arm)
    int n_c = 0;  // connected components after removal
  };
  Counts resulting_counts;
};

/// The interventions that any main subnetwork must contain: the reference
/// plus every intervention whose comparisons are all direct comparisons with
/// the reference. Sorted intervention indices.
std::vector<int> minimal_set(const Network& net, int reference);

/// Every valid disconnected design reachable by choosing a main set S ⊇
/// minimal set (S ≠ all) and removing the bridging studies. Valid means: no
/// intervention loses all its comparisons, the main side stays internally
/// connected, and at least one auxiliary component remains. De-duplicated by
/// removed-study set; sorted by decreasing m, then k, then main-subnetwork
/// size in studies.
///
/// Networks with more than 20 non-minimal interventions are refused unless
/// `force` is set (the sweep is 2^(n - |minimal set|)).
std::vector<DisconnectedDesign> enumerate_disconnected(const Network& net, int reference,
                                                       bool force = false);

/// Materializes the design: the input network minus the removed studies.
/// Throws when the design does not belong to this network or removes nothing.
Network apply_disconnect(const Network& net, const DisconnectedDesign& design);

/// Uniform draw from a nonempty design list.
const DisconnectedDesign& sample_disconnected(const std::vector<DisconnectedDesign>& designs,
                                              PhiloxEngine& rng);

}  // namespace cnma
