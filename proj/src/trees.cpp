#include "gridcoll/trees.hpp"

#include <algorithm>
#include <bit>
#include <deque>
#include <stdexcept>

namespace gridcoll {
namespace {

const std::vector<int> kNoChildren;

void check_members(std::span<const int> members, int root) {
  if (members.empty()) {
    throw std::invalid_argument("tree: member set is empty");
  }
  for (size_t i = 1; i < members.size(); ++i) {
    if (members[i] <= members[i - 1]) {
      throw std::invalid_argument(
          "tree: members must be sorted ascending without duplicates");
    }
  }
  if (!std::binary_search(members.begin(), members.end(), root)) {
    throw std::invalid_argument("tree: root " + std::to_string(root) +
                                " is not a member");
  }
}

size_t index_of(std::span<const int> members, int rank) {
  return std::lower_bound(members.begin(), members.end(), rank) -
         members.begin();
}

void add_edge(CommTree& tree, int parent, int child, int level) {
  tree.children[parent].push_back(child);
  tree.parent[child] = parent;
  tree.level_of[child] = level;
}

// Merges a sub-tree built over a subset of members into `tree`. Children
// accumulate in merge order, so a node's coarser-level children come
// before its finer-level ones.
void merge_edges(CommTree& tree, const CommTree& sub) {
  for (const auto& e : sub.edges()) add_edge(tree, e.parent, e.child, e.level);
}

CommTree shape_tree(TreeShape shape, std::span<const int> members, int root) {
  return shape == TreeShape::kFlat ? flat_tree(members, root)
                                   : binomial_tree(members, root);
}

// Partitions `members` by group key, keyed ascending. Each bucket keeps the
// members' ascending order.
template <typename KeyFn>
std::map<int, std::vector<int>> partition_by(std::span<const int> members,
                                             KeyFn key) {
  std::map<int, std::vector<int>> groups;
  for (int r : members) groups[key(r)].push_back(r);
  return groups;
}

void check_ranks(const RankTopology& rt, std::span<const int> members) {
  for (int r : members) {
    if (r < 0 || r >= rt.num_ranks()) {
      throw std::invalid_argument("tree: rank " + std::to_string(r) +
                                  " out of range");
    }
  }
}

}  // namespace

const std::vector<int>& CommTree::children_of(int node) const {
  auto it = children.find(node);
  return it == children.end() ? kNoChildren : it->second;
}

std::vector<TreeEdge> CommTree::edges() const {
  std::vector<TreeEdge> out;
  out.reserve(parent.size());
  std::deque<int> queue{root};
  while (!queue.empty()) {
    int u = queue.front();
    queue.pop_front();
    for (int c : children_of(u)) {
      out.push_back({u, c, level_of.at(c)});
      queue.push_back(c);
    }
  }
  return out;
}

int CommTree::subtree_size(int node) const {
  int count = 1;
  for (int c : children_of(node)) count += subtree_size(c);
  return count;
}

CommTree binomial_tree(std::span<const int> members, int root) {
  check_members(members, root);
  const int n = static_cast<int>(members.size());
  const size_t root_idx = index_of(members, root);

  CommTree tree;
  tree.root = root;
  tree.members.assign(members.begin(), members.end());

  for (int i = 0; i < n; ++i) {
    const int rel = (i - static_cast<int>(root_idx) + n) % n;
    const unsigned u = static_cast<unsigned>(rel);
    const int order = rel == 0 ? std::bit_width(static_cast<unsigned>(n - 1))
                               : std::countr_zero(u);
    const int node = members[i];
    for (int j = order - 1; j >= 0; --j) {
      const int child_rel = rel + (1 << j);
      if (child_rel >= n) continue;
      const int child = members[(root_idx + child_rel) % n];
      add_edge(tree, node, child, kMachine);
    }
  }
  return tree;
}

CommTree flat_tree(std::span<const int> members, int root) {
  check_members(members, root);
  CommTree tree;
  tree.root = root;
  tree.members.assign(members.begin(), members.end());
  for (int r : members) {
    if (r != root) add_edge(tree, root, r, kMachine);
  }
  return tree;
}

int representative(std::span<const int> group_members, int root) {
  if (group_members.empty()) {
    throw std::invalid_argument("representative: empty group");
  }
  if (std::find(group_members.begin(), group_members.end(), root) !=
      group_members.end()) {
    return root;
  }
  return *std::min_element(group_members.begin(), group_members.end());
}

CommTree two_level_tree(const RankTopology& rt, std::span<const int> members,
                        int root, Boundary boundary) {
  check_members(members, root);
  check_ranks(rt, members);

  auto groups = partition_by(members, [&](int r) {
    return boundary == Boundary::kMachine ? rt.machine_group(r)
                                          : rt.lan_group(r);
  });

  std::vector<int> reps;
  reps.reserve(groups.size());
  for (const auto& [key, group] : groups) reps.push_back(representative(group, root));
  std::sort(reps.begin(), reps.end());

  CommTree tree;
  tree.root = root;
  tree.members.assign(members.begin(), members.end());
  merge_edges(tree, flat_tree(reps, root));
  for (const auto& [key, group] : groups) {
    merge_edges(tree, binomial_tree(group, representative(group, root)));
  }
  apply_edge_levels(tree, rt);
  return tree;
}

CommTree multilevel_tree(const RankTopology& rt, std::span<const int> members,
                         int root, const TreePolicy& policy) {
  check_members(members, root);
  check_ranks(rt, members);

  CommTree tree;
  tree.root = root;
  tree.members.assign(members.begin(), members.end());

  auto lan_groups = partition_by(members, [&](int r) { return rt.lan_group(r); });

  std::map<int, int> lan_rep;
  std::vector<int> lan_reps;
  for (const auto& [lan, group] : lan_groups) {
    lan_rep[lan] = representative(group, root);
    lan_reps.push_back(lan_rep[lan]);
  }
  std::sort(lan_reps.begin(), lan_reps.end());
  merge_edges(tree, shape_tree(policy.shape[kWan], lan_reps, root));

  for (const auto& [lan, lan_members] : lan_groups) {
    const int lroot = lan_rep[lan];
    auto machine_groups =
        partition_by(lan_members, [&](int r) { return rt.machine_group(r); });

    std::map<int, int> machine_rep;
    std::vector<int> machine_reps;
    for (const auto& [machine, group] : machine_groups) {
      machine_rep[machine] = representative(group, lroot);
      machine_reps.push_back(machine_rep[machine]);
    }
    std::sort(machine_reps.begin(), machine_reps.end());
    merge_edges(tree, shape_tree(policy.shape[kLan], machine_reps, lroot));

    for (const auto& [machine, group] : machine_groups) {
      merge_edges(tree,
                  shape_tree(policy.shape[kMachine], group, machine_rep[machine]));
    }
  }
  apply_edge_levels(tree, rt);
  return tree;
}

void apply_edge_levels(CommTree& tree, const RankTopology& rt) {
  for (auto& [child, parent] : tree.parent) {
    tree.level_of[child] = edge_level(rt, parent, child);
  }
}

std::string_view algorithm_name(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kBinomial:
      return "binomial";
    case Algorithm::kTwoLevelMachine:
      return "2level-machine";
    case Algorithm::kTwoLevelLan:
      return "2level-lan";
    case Algorithm::kMultilevel:
      return "multilevel";
  }
  return "unknown";
}

std::optional<Algorithm> parse_algorithm(std::string_view name) {
  if (name == "binomial") return Algorithm::kBinomial;
  if (name == "2level-machine") return Algorithm::kTwoLevelMachine;
  if (name == "2level-lan") return Algorithm::kTwoLevelLan;
  if (name == "multilevel") return Algorithm::kMultilevel;
  return std::nullopt;
}

CommTree build_tree(const RankTopology& rt, std::span<const int> members,
                    int root, Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kBinomial: {
      check_ranks(rt, members);
      CommTree tree = binomial_tree(members, root);
      apply_edge_levels(tree, rt);
      return tree;
    }
    case Algorithm::kTwoLevelMachine:
      return two_level_tree(rt, members, root, Boundary::kMachine);
    case Algorithm::kTwoLevelLan:
      return two_level_tree(rt, members, root, Boundary::kLan);
    case Algorithm::kMultilevel:
      return multilevel_tree(rt, members, root);
  }
  throw std::invalid_argument("build_tree: unknown algorithm");
}

std::string to_dot(const CommTree& tree) {
  std::string out = "digraph commtree {\n";
  for (int r : tree.members) {
    out += "  r" + std::to_string(r) + ";\n";
  }
  for (const auto& e : tree.edges()) {
    out += "  r" + std::to_string(e.parent) + " -> r" +
           std::to_string(e.child) + " [level=" + std::to_string(e.level) +
           "];\n";
  }
  out += "}\n";
  return out;
}

}  // namespace gridcoll
