// Command-line front end. The entire command logic lives behind run_cli so
// tests can drive it in-process with captured streams.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "gridcoll/topology.hpp"
#include "gridcoll/trees.hpp"

namespace gridcoll {

struct BenchRow {
  std::int64_t message_size = 0;
  std::string algorithm;
  double total_time = 0.0;    // simulated seconds over every phase
  double makespan_max = 0.0;  // worst single-broadcast makespan
  std::int64_t wan_msgs = 0;
  std::int64_t lan_msgs = 0;
  std::int64_t local_msgs = 0;
};

// Rotating-root broadcast benchmark: one leading multilevel barrier, then
// one broadcast rooted at each rank in turn, each followed by an ACK/GO
// barrier so consecutive broadcasts cannot pipeline. Simulated time is
// accumulated phase by phase. One row per size.
std::vector<BenchRow> bench_rotating_root(const TopologySpec& spec,
                                          Algorithm algorithm,
                                          std::span<const std::int64_t> sizes,
                                          std::string* trace = nullptr);

// Entry point. args[0] is the program name. Data goes to `out` (or the
// --output file); diagnostics go to `err`. Returns the process exit code:
// 0 on success, 2 on usage/validation/parse failures.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace gridcoll
