#include "gridcoll/analysis.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

#include "gridcoll/collectives.hpp"
#include "gridcoll/simnet.hpp"

namespace gridcoll {
namespace {

void check_params(const CostParams& p) {
  if (p.total_procs < 1 || p.clusters < 1 || p.clusters > p.total_procs) {
    throw std::invalid_argument("cost estimate: need P >= C >= 1");
  }
  if (!std::has_single_bit(static_cast<unsigned>(p.total_procs)) ||
      !std::has_single_bit(static_cast<unsigned>(p.clusters))) {
    throw std::invalid_argument("cost estimate: P and C must be powers of two");
  }
  if (p.slow_bandwidth <= 0 || p.fast_bandwidth <= 0) {
    throw std::invalid_argument("cost estimate: bandwidths must be positive");
  }
  if (p.message_bytes < 0) {
    throw std::invalid_argument("cost estimate: negative message size");
  }
}

double slow_hop(const CostParams& p) {
  return p.slow_latency + p.message_bytes / p.slow_bandwidth;
}

double fast_term(const CostParams& p) {
  return std::log2(static_cast<double>(p.total_procs) / p.clusters) *
         (p.fast_latency + p.message_bytes / p.fast_bandwidth);
}

}  // namespace

double binomial_cost_estimate(const CostParams& p) {
  check_params(p);
  return std::log2(static_cast<double>(p.clusters)) * slow_hop(p) +
         fast_term(p);
}

double multilevel_cost_estimate(const CostParams& p) {
  check_params(p);
  return (p.clusters >= 2 ? 1.0 : 0.0) * slow_hop(p) + fast_term(p);
}

std::vector<CompareRow> compare(const TopologySpec& spec,
                                std::span<const Algorithm> algorithms,
                                std::span<const std::int64_t> sizes,
                                std::span<const int> roots) {
  const RankTopology rt = topology_vectors(spec);
  const std::vector<int> members = rt.all_ranks();

  std::vector<int> root_list(roots.begin(), roots.end());
  if (root_list.empty()) root_list = members;
  for (int r : root_list) {
    if (r < 0 || r >= rt.num_ranks()) {
      throw std::invalid_argument("compare: root " + std::to_string(r) +
                                  " out of range");
    }
  }

  std::vector<CompareRow> rows;
  for (std::int64_t size : sizes) {
    for (Algorithm algo : algorithms) {
      CompareRow row;
      row.message_size = size;
      row.algorithm = std::string(algorithm_name(algo));
      row.root_label = root_list.size() == 1 ? std::to_string(root_list[0])
                                             : "all";
      for (int root : root_list) {
        const CommTree tree = build_tree(rt, members, root, algo);
        const Schedule schedule = bcast_schedule(tree, size);
        const SimReport report = simulate(schedule, rt, spec.links);
        row.total_time += report.makespan;
        row.makespan_max = std::max(row.makespan_max, report.makespan);
        row.wan_msgs += report.messages_by_level[kWan];
        row.lan_msgs += report.messages_by_level[kLan];
        row.local_msgs += report.messages_by_level[kMachine];
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace gridcoll
