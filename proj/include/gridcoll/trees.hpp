// Deterministic spanning-tree construction over a member set.
//
// Every builder is a pure function of its arguments, so any process can
// construct the identical tree independently, without communication. The
// multilevel builder clusters members by LAN group, then by machine group,
// using a flat tree across the wide area and binomial trees below by
// default; child order is part of the tree and fixes all send orders.

#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gridcoll/topology.hpp"

namespace gridcoll {

enum class TreeShape { kFlat, kBinomial };

struct TreePolicy {
  std::array<TreeShape, kNumLevels> shape{TreeShape::kFlat,
                                          TreeShape::kBinomial,
                                          TreeShape::kBinomial};
  bool operator==(const TreePolicy&) const = default;
};

struct TreeEdge {
  int parent = -1;
  int child = -1;
  int level = kMachine;
  bool operator==(const TreeEdge&) const = default;
};

// Rooted spanning tree over a member set. Child list order is the send
// order; each non-root edge carries the network level it crosses.
struct CommTree {
  int root = -1;
  std::vector<int> members;                 // ascending
  std::map<int, std::vector<int>> children;  // parent -> ordered children
  std::map<int, int> parent;                 // child -> parent (root absent)
  std::map<int, int> level_of;               // child -> edge level

  std::size_t edge_count() const { return parent.size(); }

  const std::vector<int>& children_of(int node) const;

  // Edges in breadth-first order from the root, children in send order.
  std::vector<TreeEdge> edges() const;

  // Number of nodes in the subtree rooted at `node` (including itself).
  int subtree_size(int node) const;

  bool operator==(const CommTree&) const = default;
};

// Classic binomial tree labeling over relative ranks. With n members and
// r(x) = (index(x) - index(root)) mod n, node r has children r + 2^j for
// j = J-1 .. 0, where J = position of r's lowest set bit (and the least J
// with 2^J >= n for the root); children >= n are dropped, so the largest
// subtree comes first. `members` must be sorted ascending with no
// duplicates and contain root. Edge levels default to kMachine; use
// apply_edge_levels to label against a topology.
CommTree binomial_tree(std::span<const int> members, int root);

// Root sends to every other member directly; children ascending by rank.
CommTree flat_tree(std::span<const int> members, int root);

// The rank through which a group is entered: root if present, else the
// minimum rank of the group.
int representative(std::span<const int> group_members, int root);

enum class Boundary { kMachine, kLan };

// Two-level clustering: flat tree over group representatives rooted at the
// root, binomial tree inside each group rooted at its representative.
CommTree two_level_tree(const RankTopology& rt, std::span<const int> members,
                        int root, Boundary boundary);

// Three-level clustering: the level-0 shape spans LAN representatives, the
// level-1 shape spans machine representatives inside each LAN group, and
// the level-2 shape spans each machine. Edge levels never decrease along a
// root-to-leaf path.
CommTree multilevel_tree(const RankTopology& rt, std::span<const int> members,
                         int root, const TreePolicy& policy = TreePolicy{});

// Relabels every edge with edge_level(rt, parent, child).
void apply_edge_levels(CommTree& tree, const RankTopology& rt);

enum class Algorithm { kBinomial, kTwoLevelMachine, kTwoLevelLan, kMultilevel };

std::string_view algorithm_name(Algorithm algorithm);
std::optional<Algorithm> parse_algorithm(std::string_view name);

// Builds the requested tree over `members` with correct edge levels.
CommTree build_tree(const RankTopology& rt, std::span<const int> members,
                    int root, Algorithm algorithm);

// DOT export: one node per rank (`r<rank>`), one directed edge per tree
// edge with a `level=<0|1|2>` attribute.
std::string to_dot(const CommTree& tree);

}  // namespace gridcoll
