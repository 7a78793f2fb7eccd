#include "gridcoll/collectives.hpp"

#include <functional>
#include <stdexcept>

namespace gridcoll {
namespace {

void fail(int id, const std::string& what) {
  throw std::invalid_argument("schedule message " + std::to_string(id) + ": " +
                              what);
}

// Emits child -> parent messages in post-order; a node's send depends on
// every message it received from its children. size_of(child) gives the
// payload of the child -> parent message.
Schedule fan_in_schedule(const CommTree& tree,
                         const std::function<std::int64_t(int)>& size_of) {
  Schedule s;
  std::function<std::vector<int>(int)> emit = [&](int node) {
    std::vector<int> received;
    for (int c : tree.children_of(node)) {
      std::vector<int> into_child = emit(c);
      Message m;
      m.id = static_cast<int>(s.messages.size());
      m.sender = c;
      m.receiver = node;
      m.size = size_of(c);
      m.level = tree.level_of.at(c);
      m.deps = std::move(into_child);
      received.push_back(m.id);
      s.messages.push_back(std::move(m));
    }
    return received;
  };
  emit(tree.root);
  return s;
}

// Emits parent -> child messages in breadth-first order; a node forwards
// only after its own inbound message arrived.
Schedule fan_out_schedule(const CommTree& tree,
                          const std::function<std::int64_t(int)>& size_of) {
  Schedule s;
  std::map<int, int> inbound;
  for (const auto& e : tree.edges()) {
    Message m;
    m.id = static_cast<int>(s.messages.size());
    m.sender = e.parent;
    m.receiver = e.child;
    m.size = size_of(e.child);
    m.level = e.level;
    if (auto it = inbound.find(e.parent); it != inbound.end()) {
      m.deps = {it->second};
    }
    inbound[e.child] = m.id;
    s.messages.push_back(std::move(m));
  }
  return s;
}

}  // namespace

void validate_schedule(const Schedule& schedule) {
  for (size_t i = 0; i < schedule.messages.size(); ++i) {
    const Message& m = schedule.messages[i];
    if (m.id != static_cast<int>(i)) fail(m.id, "ids must be consecutive from 0");
    if (m.sender == m.receiver) fail(m.id, "sender equals receiver");
    if (m.size < 0) fail(m.id, "negative size");
    if (m.level < 0 || m.level >= kNumLevels) fail(m.id, "level out of range");
    for (int d : m.deps) {
      if (d < 0 || d >= m.id) fail(m.id, "dep must reference an earlier message");
    }
  }
}

void validate_schedule(const Schedule& schedule, const RankTopology& rt) {
  validate_schedule(schedule);
  for (const Message& m : schedule.messages) {
    if (m.sender < 0 || m.sender >= rt.num_ranks() || m.receiver < 0 ||
        m.receiver >= rt.num_ranks()) {
      fail(m.id, "rank out of range");
    }
    if (m.level != edge_level(rt, m.sender, m.receiver)) {
      fail(m.id, "declared level " + std::to_string(m.level) +
                     " disagrees with edge_level");
    }
  }
}

Schedule bcast_schedule(const CommTree& tree, std::int64_t size) {
  if (size < 0) throw std::invalid_argument("bcast_schedule: negative size");
  return fan_out_schedule(tree, [size](int) { return size; });
}

Schedule reduce_schedule(const CommTree& tree, std::int64_t size) {
  if (size < 0) throw std::invalid_argument("reduce_schedule: negative size");
  return fan_in_schedule(tree, [size](int) { return size; });
}

Schedule gather_schedule(const CommTree& tree, std::int64_t item_size) {
  if (item_size < 0) {
    throw std::invalid_argument("gather_schedule: negative item size");
  }
  return fan_in_schedule(
      tree, [&](int child) { return tree.subtree_size(child) * item_size; });
}

Schedule scatter_schedule(const CommTree& tree, std::int64_t item_size) {
  if (item_size < 0) {
    throw std::invalid_argument("scatter_schedule: negative item size");
  }
  return fan_out_schedule(
      tree, [&](int child) { return tree.subtree_size(child) * item_size; });
}

Schedule barrier_schedule(const RankTopology& rt,
                          std::span<const int> members) {
  if (members.empty()) {
    throw std::invalid_argument("barrier_schedule: empty member set");
  }
  if (members.size() == 1) return {};

  const int root = *std::min_element(members.begin(), members.end());
  const CommTree tree = multilevel_tree(rt, members, root);

  Schedule s = reduce_schedule(tree, 0);
  std::vector<int> root_inbound;
  for (const Message& m : s.messages) {
    if (m.receiver == root) root_inbound.push_back(m.id);
  }

  // Fan-out: same tree downward; every send additionally waits for the
  // root's complete fan-in.
  const int offset = static_cast<int>(s.messages.size());
  for (Message m : bcast_schedule(tree, 0).messages) {
    m.id += offset;
    for (int& d : m.deps) d += offset;
    m.deps.insert(m.deps.end(), root_inbound.begin(), root_inbound.end());
    s.messages.push_back(std::move(m));
  }
  return s;
}

Schedule ack_barrier_schedule(const RankTopology& rt) {
  const int num_ranks = rt.num_ranks();
  Schedule s;
  if (num_ranks <= 1) return s;

  std::vector<int> ack_ids;
  ack_ids.reserve(num_ranks - 1);
  for (int r = 1; r < num_ranks; ++r) {
    Message m;
    m.id = static_cast<int>(s.messages.size());
    m.sender = r;
    m.receiver = 0;
    m.size = 0;
    m.level = edge_level(rt, r, 0);
    ack_ids.push_back(m.id);
    s.messages.push_back(std::move(m));
  }
  // GO messages go out one at a time, each gated on every ACK.
  for (int r = 1; r < num_ranks; ++r) {
    Message m;
    m.id = static_cast<int>(s.messages.size());
    m.sender = 0;
    m.receiver = r;
    m.size = 0;
    m.level = edge_level(rt, 0, r);
    m.deps = ack_ids;
    s.messages.push_back(std::move(m));
  }
  return s;
}

std::string dump_schedule(const Schedule& schedule) {
  std::string out;
  for (const Message& m : schedule.messages) {
    out += "msg " + std::to_string(m.id) + " " + std::to_string(m.sender) +
           "->" + std::to_string(m.receiver) + " size=" +
           std::to_string(m.size) + " level=" + std::to_string(m.level) +
           " deps=";
    for (size_t i = 0; i < m.deps.size(); ++i) {
      if (i > 0) out += ",";
      out += std::to_string(m.deps[i]);
    }
    out += "\n";
  }
  return out;
}

}  // namespace gridcoll
