// Deterministic discrete-event execution of a Schedule under per-level
// link parameters.
//
// One-port model: each rank owns a single port that serializes its send
// initiations and its arrival processing. A send of size s at level l
// starts at t = max(port free, arrival of every dependency), occupies the
// port for overhead_l, and arrives at t + latency_l + s / bandwidth_l.
// Arrival processing occupies the receiver's port for overhead_l. With all
// overheads zero the model reduces to pure latency + bandwidth arithmetic.

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "gridcoll/collectives.hpp"
#include "gridcoll/topology.hpp"

namespace gridcoll {

struct SimReport {
  std::vector<double> finish_time;  // per rank, 0 for idle ranks
  double makespan = 0.0;            // max finish time
  std::array<std::int64_t, kNumLevels> messages_by_level{};
  std::array<std::int64_t, kNumLevels> bytes_by_level{};
  std::vector<double> start_time;    // per message
  std::vector<double> arrival_time;  // per message

  bool operator==(const SimReport&) const = default;
};

struct LevelTraffic {
  std::array<std::int64_t, kNumLevels> messages{};
  std::array<std::int64_t, kNumLevels> bytes{};

  bool operator==(const LevelTraffic&) const = default;
};

// Executes the schedule. Deterministic: equal inputs produce identical
// reports; simultaneous events are ordered by message id. Throws
// std::invalid_argument for schedules that do not validate against `rt`.
SimReport simulate(const Schedule& schedule, const RankTopology& rt,
                   const std::array<LinkParams, kNumLevels>& links);

// Static per-level message and byte counts; always equals the traffic the
// simulator reports for the same schedule.
LevelTraffic count_by_level(const Schedule& schedule, const RankTopology& rt);

// Event trace, one line per send/arrival in time order (ties by message id,
// send before arrival):
//   t=<seconds> <send|arrive> msg=<id> <u>-><v> level=<l>
std::string format_trace(const Schedule& schedule, const SimReport& report);

}  // namespace gridcoll
