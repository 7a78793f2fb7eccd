// Closed-form cost estimates for broadcasting over clustered networks, and
// simulation-backed comparisons between tree algorithms.

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gridcoll/topology.hpp"
#include "gridcoll/trees.hpp"

namespace gridcoll {

struct CostParams {
  int total_procs = 1;      // P, power of two
  int clusters = 1;         // C, power of two, 1 <= C <= P
  double message_bytes = 0; // N
  double slow_latency = 0;  // seconds between clusters
  double slow_bandwidth = 1;
  double fast_latency = 0;  // seconds inside a cluster
  double fast_bandwidth = 1;
};

// log2(C) * (l_s + N/b_s) + log2(P/C) * (l_f + N/b_f): the longest path of
// a binomial tree over P evenly clustered processes crosses log2(C) slow
// links. Throws std::invalid_argument unless P and C are powers of two
// with P >= C >= 1 and both bandwidths are positive.
double binomial_cost_estimate(const CostParams& p);

// One slow hop (none when C == 1) plus log2(P/C) * (l_f + N/b_f).
double multilevel_cost_estimate(const CostParams& p);

struct CompareRow {
  std::int64_t message_size = 0;
  std::string algorithm;
  std::string root_label;       // a rank, or "all"
  double total_time = 0.0;      // sum of broadcast makespans over the roots
  double makespan_max = 0.0;    // worst single-root makespan
  std::int64_t wan_msgs = 0;
  std::int64_t lan_msgs = 0;
  std::int64_t local_msgs = 0;
};

// For each (size, algorithm): builds the broadcast tree for every requested
// root, simulates, and aggregates. An empty `roots` span means all ranks.
std::vector<CompareRow> compare(const TopologySpec& spec,
                                std::span<const Algorithm> algorithms,
                                std::span<const std::int64_t> sizes,
                                std::span<const int> roots = {});

}  // namespace gridcoll
