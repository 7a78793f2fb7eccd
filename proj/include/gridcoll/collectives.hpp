// Compiles collective operations over a CommTree into point-to-point
// message schedules, plus functional evaluators that establish what data
// each rank ends up holding.

#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "gridcoll/topology.hpp"
#include "gridcoll/trees.hpp"

namespace gridcoll {

struct Message {
  int id = 0;
  int sender = -1;
  int receiver = -1;
  std::int64_t size = 0;  // bytes
  int level = kMachine;
  // Ids of messages that must have arrived before this send may start.
  // Always earlier ids, so the dependency graph is acyclic.
  std::vector<int> deps;

  bool operator==(const Message&) const = default;
};

struct Schedule {
  std::vector<Message> messages;  // messages[i].id == i

  // The order in which `rank` initiates its sends (message ids).
  std::vector<int> sends_of(int rank) const {
    std::vector<int> out;
    for (const auto& m : messages) {
      if (m.sender == rank) out.push_back(m.id);
    }
    return out;
  }

  bool operator==(const Schedule&) const = default;
};

// Throws std::invalid_argument if ids are not consecutive from 0, a dep
// references a non-earlier message, a message sends to itself, or a size
// is negative.
void validate_schedule(const Schedule& schedule);

// Additionally checks ranks against the topology and every declared level
// against edge_level(sender, receiver).
void validate_schedule(const Schedule& schedule, const RankTopology& rt);

// One message per tree edge, parent -> child, all of `size` bytes. A send
// depends on the sender's inbound message; each node sends to its children
// in the tree's child order.
Schedule bcast_schedule(const CommTree& tree, std::int64_t size);

// One message per tree edge, child -> parent, constant size. A node's send
// depends on receipt from all of its children.
Schedule reduce_schedule(const CommTree& tree, std::int64_t size);

// Child -> parent messages of (subtree node count) * item_size bytes,
// dependencies as in reduce.
Schedule gather_schedule(const CommTree& tree, std::int64_t item_size);

// Parent -> child messages of (subtree node count) * item_size bytes; a
// node forwards only after its own inbound segment arrived.
Schedule scatter_schedule(const CommTree& tree, std::int64_t item_size);

// Fan-in then fan-out of zero-size messages on the multilevel tree rooted
// at the minimum member; every fan-out send also waits for the root's
// complete fan-in. 2 * (|members| - 1) messages.
Schedule barrier_schedule(const RankTopology& rt, std::span<const int> members);

// The rotating-root benchmark's pipelining guard: every rank sends a
// zero-size ACK to rank 0; once all ACKs arrived, rank 0 sends a GO to each
// rank in turn. 2 * (num_ranks - 1) messages.
Schedule ack_barrier_schedule(const RankTopology& rt);

// Line-based debug dump:
//   msg <id> <sender>-><receiver> size=<n> level=<l> deps=<comma list>
std::string dump_schedule(const Schedule& schedule);

// ---------------------------------------------------------------------------
// Reduction operators and functional evaluators.

enum class ReduceOp { kSum, kMax, kMin, kConcat };

constexpr bool is_commutative(ReduceOp op) { return op != ReduceOp::kConcat; }

template <typename T>
T apply_op(ReduceOp op, const T& a, const T& b) {
  switch (op) {
    case ReduceOp::kSum:
      return a + b;
    case ReduceOp::kMax:
      return std::max(a, b);
    case ReduceOp::kMin:
      return std::min(a, b);
    case ReduceOp::kConcat:
      break;
  }
  throw std::invalid_argument("apply_op: operator not defined for this type");
}

inline std::string apply_op(ReduceOp op, const std::string& a,
                            const std::string& b) {
  if (op == ReduceOp::kConcat) return a + b;
  return op == ReduceOp::kMax ? std::max(a, b)
         : op == ReduceOp::kMin
             ? std::min(a, b)
             : throw std::invalid_argument("apply_op: sum of strings");
}

// Every member receives the root's payload.
template <typename T>
std::map<int, T> bcast_eval(const CommTree& tree, const T& root_payload) {
  std::map<int, T> out;
  for (int r : tree.members) out.emplace(r, root_payload);
  return out;
}

// Folds the tree bottom-up: at each node, own value first, then the
// children's contributions in ascending child rank. Deterministic for
// non-commutative ops.
template <typename T>
T reduce_eval(const CommTree& tree, const std::map<int, T>& values,
              ReduceOp op) {
  struct Folder {
    const CommTree& tree;
    const std::map<int, T>& values;
    ReduceOp op;

    T fold(int node) const {
      T acc = values.at(node);
      std::vector<int> kids = tree.children_of(node);
      std::sort(kids.begin(), kids.end());
      for (int c : kids) acc = apply_op(op, acc, fold(c));
      return acc;
    }
  };
  return Folder{tree, values, op}.fold(tree.root);
}

// Root's gathered buffer: every member's item, ordered by rank. Built by
// walking the tree so that each node merges its children's segments.
template <typename T>
std::vector<T> gather_eval(const CommTree& tree,
                           const std::map<int, T>& items) {
  struct Collector {
    const CommTree& tree;
    const std::map<int, T>& items;

    std::map<int, T> collect(int node) const {
      std::map<int, T> buffer;
      buffer.emplace(node, items.at(node));
      for (int c : tree.children_of(node)) {
        for (auto& [rank, item] : collect(c)) {
          buffer.emplace(rank, std::move(item));
        }
      }
      return buffer;
    }
  };
  std::map<int, T> at_root = Collector{tree, items}.collect(tree.root);
  std::vector<T> out;
  out.reserve(at_root.size());
  for (auto& [rank, item] : at_root) out.push_back(std::move(item));
  return out;
}

// Distributes the root's buffer (one item per member, ordered by rank) down
// the tree; every member ends with exactly its own item.
template <typename T>
std::map<int, T> scatter_eval(const CommTree& tree,
                              const std::vector<T>& root_buffer) {
  if (root_buffer.size() != tree.members.size()) {
    throw std::invalid_argument("scatter_eval: buffer size != member count");
  }
  std::map<int, T> segment;
  for (size_t i = 0; i < tree.members.size(); ++i) {
    segment.emplace(tree.members[i], root_buffer[i]);
  }

  struct Distributor {
    const CommTree& tree;
    std::map<int, T>& delivered;

    void walk(int node, std::map<int, T> incoming) const {
      delivered.emplace(node, std::move(incoming.at(node)));
      incoming.erase(node);
      for (int c : tree.children_of(node)) {
        std::map<int, T> forward;
        for (int member : subtree_members(c)) {
          auto it = incoming.find(member);
          forward.emplace(member, std::move(it->second));
          incoming.erase(it);
        }
        walk(c, std::move(forward));
      }
    }

    std::vector<int> subtree_members(int node) const {
      std::vector<int> out{node};
      for (int c : tree.children_of(node)) {
        auto sub = subtree_members(c);
        out.insert(out.end(), sub.begin(), sub.end());
      }
      return out;
    }
  };

  std::map<int, T> delivered;
  Distributor{tree, delivered}.walk(tree.root, std::move(segment));
  return delivered;
}

}  // namespace gridcoll
