#include "sixsim/topology.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

namespace sixsim {

Topology Topology::layered(int groups, int group_size, double link_pdr,
                           double rssi_dbm) {
  if (groups < 1) throw std::invalid_argument("topology: groups must be >= 1");
  if (group_size < 1)
    throw std::invalid_argument("topology: group_size must be >= 1");
  if (link_pdr <= 0.0 || link_pdr > 1.0)
    throw std::invalid_argument("topology: link pdr must be in (0, 1]");

  Topology t;
  t.groups_ = groups;
  t.group_size_ = group_size;
  t.pdr_ = link_pdr;
  t.rssi_ = rssi_dbm;
  t.adj_.resize(1 + static_cast<size_t>(groups) * group_size);

  auto link = [&t](NodeId a, NodeId b) {
    t.adj_[a].push_back(b);
    t.adj_[b].push_back(a);
  };

  for (int g = 1; g <= groups; ++g) {
    for (int i = 0; i < group_size; ++i) {
      NodeId n = (g - 1) * group_size + i + 1;
      if (g == 1) {
        link(kRoot, n);
      } else {
        // Links toward group g-1 only; the g+1 side is added when that
        // group is visited, keeping every pair linked exactly once.
        for (int j = 0; j < group_size; ++j)
          link((g - 2) * group_size + j + 1, n);
      }
    }
  }
  for (auto& lst : t.adj_) std::sort(lst.begin(), lst.end());
  return t;
}

void Topology::check_id(NodeId n) const {
  if (n < 0 || n >= node_count())
    throw std::out_of_range("topology: unknown node id " + std::to_string(n));
}

int Topology::group_of(NodeId n) const {
  check_id(n);
  if (n == kRoot) return 0;
  return (n - 1) / group_size_ + 1;
}

const std::vector<NodeId>& Topology::neighbors(NodeId n) const {
  check_id(n);
  return adj_[n];
}

bool Topology::linked(NodeId a, NodeId b) const {
  check_id(a);
  check_id(b);
  return std::binary_search(adj_[a].begin(), adj_[a].end(), b);
}

double Topology::link_pdr(NodeId a, NodeId b) const {
  if (!linked(a, b))
    throw std::invalid_argument("topology: no link " + std::to_string(a) +
                                "<->" + std::to_string(b));
  return pdr_;
}

size_t Topology::link_count() const {
  size_t deg = 0;
  for (const auto& lst : adj_) deg += lst.size();
  return deg / 2;
}

std::string Topology::edge_list() const {
  std::string out;
  char line[96];
  for (NodeId a = 0; a < node_count(); ++a) {
    for (NodeId b : adj_[a]) {
      if (b < a) continue;
      std::snprintf(line, sizeof line, "%d %d %.6f %.1f\n", a, b, pdr_, rssi_);
      out += line;
    }
  }
  return out;
}

}  // namespace sixsim
