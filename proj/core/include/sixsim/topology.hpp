#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "sixsim/types.hpp"

namespace sixsim {

// Static connectivity for one run. Links never appear or disappear during a
// simulation; loss is drawn per transmission attempt from the link PDR.
class Topology {
 public:
  // Layered benchmark graph: node 0 is the root; field nodes are numbered
  // 1..groups*group_size, filling group 1 first. Every node of group 1 has a
  // link to the root; a node of group g has a link to every node of groups
  // g-1 and g+1, and none inside its own group. Uniform link quality.
  // Throws std::invalid_argument if groups < 1 or group_size < 1.
  static Topology layered(int groups, int group_size, double link_pdr,
                          double rssi_dbm);

  int node_count() const { return static_cast<int>(adj_.size()); }
  int groups() const { return groups_; }
  int group_size() const { return group_size_; }
  double uniform_pdr() const { return pdr_; }
  double rssi_dbm() const { return rssi_; }

  // Group of a field node (1-based); 0 for the root.
  // Throws std::out_of_range for ids outside the graph.
  int group_of(NodeId n) const;

  // Neighbor ids in ascending order. Throws std::out_of_range for ids
  // outside the graph.
  const std::vector<NodeId>& neighbors(NodeId n) const;

  bool linked(NodeId a, NodeId b) const;

  // PDR of the a<->b link; throws std::invalid_argument if no such link.
  double link_pdr(NodeId a, NodeId b) const;

  size_t link_count() const;

  // One line per undirected link: "a b pdr rssi_dbm", ascending (a, b),
  // a < b. Used by the topology dump and by reproducibility checks.
  std::string edge_list() const;

 private:
  Topology() = default;
  void check_id(NodeId n) const;

  int groups_ = 0;
  int group_size_ = 0;
  double pdr_ = 1.0;
  double rssi_ = 0.0;
  std::vector<std::vector<NodeId>> adj_;
};

}  // namespace sixsim
