// Topology configuration parsing and per-rank group structure.
//
// A job is described as an ordered list of subjobs (one per machine) plus
// link parameters for the three network levels:
//   level 0 = wide-area (between LAN groups)
//   level 1 = local-area (between machines in one LAN group)
//   level 2 = intra-machine
// Subjobs that declare the same `lan` token are merged into one LAN group;
// a subjob without a `lan` token forms its own singleton LAN group. Every
// subjob is its own machine group. Global ranks are assigned contiguously
// in subjob order.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gridcoll {

inline constexpr int kNumLevels = 3;
inline constexpr int kWan = 0;
inline constexpr int kLan = 1;
inline constexpr int kMachine = 2;

struct LinkParams {
  int level = 0;
  double latency = 0.0;    // seconds per message
  double bandwidth = 1.0;  // bytes per second, > 0
  double overhead = 0.0;   // seconds of port occupancy per message
  bool operator==(const LinkParams&) const = default;
};

struct SubjobSpec {
  int index = 0;  // position in config order
  int count = 0;  // processes on this machine, >= 1
  std::string machine_id;
  std::optional<std::string> lan_id;
  bool operator==(const SubjobSpec&) const = default;
};

struct TopologySpec {
  std::vector<SubjobSpec> subjobs;
  std::array<LinkParams, kNumLevels> links{};
  int total_ranks = 0;

  // Non-fatal notes collected while parsing (e.g. repeated machine ids).
  std::vector<std::string> warnings;

  bool operator==(const TopologySpec& other) const {
    return subjobs == other.subjobs && links == other.links &&
           total_ranks == other.total_ranks;
  }
};

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message),
        line_(line) {}

  int line() const noexcept { return line_; }

 private:
  int line_;
};

// Parses a config document. One directive per line, `#` starts a comment:
//   link level=<0|1|2> latency=<sec> bandwidth=<bytes/sec> [overhead=<sec>]
//   subjob count=<int> machine=<token> [lan=<token>]
// Throws ParseError with the offending line number.
TopologySpec parse_topology(std::string_view text);

// Canonical serialization: the three link lines in level order, then the
// subjobs in order. parse_topology(to_config_text(s)) == s.
std::string to_config_text(const TopologySpec& spec);

// Immutable per-rank group structure. vec(r) = {LAN group, machine group};
// two ranks share a machine iff their vectors are equal, and share a LAN
// iff the first entries are equal.
class RankTopology {
 public:
  using Vector = std::array<int, 2>;

  RankTopology(std::vector<Vector> vectors,
               std::vector<std::vector<int>> lan_machines,
               std::vector<std::vector<int>> machine_ranks);

  int num_ranks() const noexcept { return static_cast<int>(vectors_.size()); }
  int num_lan_groups() const noexcept {
    return static_cast<int>(lan_machines_.size());
  }
  int num_machine_groups() const noexcept {
    return static_cast<int>(machine_ranks_.size());
  }

  const Vector& vec(int rank) const { return vectors_.at(rank); }
  int lan_group(int rank) const { return vectors_.at(rank)[0]; }
  int machine_group(int rank) const { return vectors_.at(rank)[1]; }

  // Machine group indices inside a LAN group, ascending.
  const std::vector<int>& machines_in_lan(int lan) const {
    return lan_machines_.at(lan);
  }
  // Ranks of a machine group, ascending (contiguous by construction).
  const std::vector<int>& ranks_in_machine(int machine) const {
    return machine_ranks_.at(machine);
  }

  std::vector<int> ranks_in_lan(int lan) const;
  std::vector<int> all_ranks() const;

 private:
  std::vector<Vector> vectors_;
  std::vector<std::vector<int>> lan_machines_;
  std::vector<std::vector<int>> machine_ranks_;
};

// Derives the per-rank vectors and group maps. LAN groups are numbered by
// first appearance in file order; machine group index = subjob index.
RankTopology topology_vectors(const TopologySpec& spec);

// Smallest vector index at which u and v differ; kMachine if equal.
// u == v is a contract violation.
int edge_level(const RankTopology& rt, int u, int v);

}  // namespace gridcoll
