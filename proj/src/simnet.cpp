#include "gridcoll/simnet.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <queue>
#include <stdexcept>

namespace gridcoll {
namespace {

struct RecvTask {
  double arrival;
  int id;
  // Earliest arrival first, ties by message id.
  bool operator>(const RecvTask& other) const {
    return arrival != other.arrival ? arrival > other.arrival : id > other.id;
  }
};

struct RankState {
  std::vector<int> sends;  // message ids in declared send order
  size_t next_send = 0;
  std::priority_queue<RecvTask, std::vector<RecvTask>, std::greater<RecvTask>>
      recvs;  // arrived but not yet processed
  double port_free = 0.0;
  double last_send_avail = 0.0;
  double last_recv_done = 0.0;
  bool active = false;
};

std::string format_seconds(double t) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", t);
  return buf;
}

}  // namespace

SimReport simulate(const Schedule& schedule, const RankTopology& rt,
                   const std::array<LinkParams, kNumLevels>& links) {
  validate_schedule(schedule, rt);

  const size_t n = schedule.messages.size();
  SimReport report;
  report.finish_time.assign(rt.num_ranks(), 0.0);
  report.start_time.assign(n, 0.0);
  report.arrival_time.assign(n, 0.0);

  for (const Message& m : schedule.messages) {
    report.messages_by_level[m.level] += 1;
    report.bytes_by_level[m.level] += m.size;
  }

  std::vector<RankState> ranks(rt.num_ranks());
  for (const Message& m : schedule.messages) {
    ranks[m.sender].sends.push_back(m.id);
    ranks[m.sender].active = true;
    ranks[m.receiver].active = true;
  }

  std::vector<bool> send_executed(n, false);
  size_t remaining = 2 * n;  // one send action + one receive action each

  const double inf = std::numeric_limits<double>::infinity();
  while (remaining > 0) {
    // Pick the executable action with the earliest start; ties go to the
    // smaller message id. A send is executable only when it is its rank's
    // next send and every dependency has already arrived.
    double best_time = inf;
    int best_id = -1;
    int best_rank = -1;
    bool best_is_send = false;

    for (size_t r = 0; r < ranks.size(); ++r) {
      RankState& state = ranks[r];
      if (state.next_send < state.sends.size()) {
        const Message& m = schedule.messages[state.sends[state.next_send]];
        double release = 0.0;
        bool ready = true;
        for (int d : m.deps) {
          if (!send_executed[d]) {
            ready = false;
            break;
          }
          release = std::max(release, report.arrival_time[d]);
        }
        if (ready) {
          const double t = std::max(state.port_free, release);
          if (t < best_time || (t == best_time && m.id < best_id)) {
            best_time = t;
            best_id = m.id;
            best_rank = static_cast<int>(r);
            best_is_send = true;
          }
        }
      }
      if (!state.recvs.empty()) {
        const RecvTask& task = state.recvs.top();
        const double t = std::max(state.port_free, task.arrival);
        if (t < best_time || (t == best_time && task.id < best_id)) {
          best_time = t;
          best_id = task.id;
          best_rank = static_cast<int>(r);
          best_is_send = false;
        }
      }
    }
    if (best_id < 0) {
      throw std::invalid_argument("simulate: schedule cannot make progress");
    }

    RankState& state = ranks[best_rank];
    const Message& m = schedule.messages[best_id];
    const LinkParams& link = links[m.level];
    if (best_is_send) {
      report.start_time[m.id] = best_time;
      report.arrival_time[m.id] =
          best_time + link.latency + static_cast<double>(m.size) / link.bandwidth;
      state.port_free = best_time + link.overhead;
      state.last_send_avail = state.port_free;
      ++state.next_send;
      send_executed[m.id] = true;  // its arrival time is now known
      ranks[m.receiver].recvs.push({report.arrival_time[m.id], m.id});
    } else {
      state.port_free = best_time + link.overhead;
      state.last_recv_done = state.port_free;
      state.recvs.pop();
    }
    --remaining;
  }

  for (size_t r = 0; r < ranks.size(); ++r) {
    if (!ranks[r].active) continue;
    report.finish_time[r] =
        std::max(ranks[r].last_send_avail, ranks[r].last_recv_done);
    report.makespan = std::max(report.makespan, report.finish_time[r]);
  }
  return report;
}

LevelTraffic count_by_level(const Schedule& schedule, const RankTopology& rt) {
  validate_schedule(schedule, rt);
  LevelTraffic traffic;
  for (const Message& m : schedule.messages) {
    traffic.messages[m.level] += 1;
    traffic.bytes[m.level] += m.size;
  }
  return traffic;
}

std::string format_trace(const Schedule& schedule, const SimReport& report) {
  struct Event {
    double t;
    int id;
    bool arrive;
  };
  std::vector<Event> events;
  events.reserve(2 * schedule.messages.size());
  for (const Message& m : schedule.messages) {
    events.push_back({report.start_time[m.id], m.id, false});
    events.push_back({report.arrival_time[m.id], m.id, true});
  }
  std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
    if (a.t != b.t) return a.t < b.t;
    if (a.id != b.id) return a.id < b.id;
    return a.arrive < b.arrive;
  });

  std::string out;
  for (const Event& e : events) {
    const Message& m = schedule.messages[e.id];
    out += "t=" + format_seconds(e.t) + (e.arrive ? " arrive" : " send") +
           " msg=" + std::to_string(m.id) + " " + std::to_string(m.sender) +
           "->" + std::to_string(m.receiver) +
           " level=" + std::to_string(m.level) + "\n";
  }
  return out;
}

}  // namespace gridcoll
