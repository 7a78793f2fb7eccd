#include "gridcoll/simnet.hpp"

#include <doctest.h>

#include <random>

#include "oracles.hpp"

using namespace gridcoll;
namespace gt = gridcoll::testing;

namespace {

RankTopology one_machine_rt(int n) {
  return topology_vectors(parse_topology(
      "link level=0 latency=1 bandwidth=1\n"
      "link level=1 latency=1 bandwidth=1\n"
      "link level=2 latency=1 bandwidth=1\n"
      "subjob count=" +
      std::to_string(n) + " machine=a\n"));
}

std::array<LinkParams, kNumLevels> uniform_links(double latency,
                                                 double bandwidth,
                                                 double overhead) {
  std::array<LinkParams, kNumLevels> links;
  for (int lvl = 0; lvl < kNumLevels; ++lvl) {
    links[lvl] = LinkParams{lvl, latency, bandwidth, overhead};
  }
  return links;
}

}  // namespace

TEST_CASE("simulate: two ranks, latency plus transfer time") {
  const RankTopology rt = one_machine_rt(2);
  CommTree tree = flat_tree(rt.all_ranks(), 0);
  apply_edge_levels(tree, rt);
  const Schedule s = bcast_schedule(tree, 1000000);
  const SimReport report = simulate(s, rt, uniform_links(1e-5, 1e8, 0.0));
  CHECK(report.makespan == doctest::Approx(0.01001).epsilon(1e-12));
  CHECK(report.start_time[0] == 0.0);
  CHECK(report.arrival_time[0] == doctest::Approx(0.01001));
  CHECK(report.finish_time[1] == doctest::Approx(0.01001));
}

TEST_CASE("simulate: empty schedule") {
  const RankTopology rt = one_machine_rt(2);
  const SimReport report = simulate(Schedule{}, rt, uniform_links(1, 1, 1));
  CHECK(report.makespan == 0.0);
  CHECK(report.messages_by_level == std::array<std::int64_t, 3>{0, 0, 0});
  CHECK(report.finish_time == std::vector<double>{0.0, 0.0});
}

TEST_CASE("simulate: two-site multilevel broadcast critical path") {
  const TopologySpec spec = parse_topology(
      "link level=0 latency=0.05 bandwidth=1e6\n"
      "link level=1 latency=1e-5 bandwidth=1e8\n"
      "link level=2 latency=1e-5 bandwidth=1e8\n"
      "subjob count=10 machine=alpha\n"
      "subjob count=5 machine=beta lan=east\n"
      "subjob count=5 machine=gamma lan=east\n");
  const RankTopology rt = topology_vectors(spec);
  const CommTree tree = multilevel_tree(rt, rt.all_ranks(), 0);
  const Schedule s = bcast_schedule(tree, 1000000);
  const SimReport report = simulate(s, rt, spec.links);

  // Wide-area hop: 0.05 + 10^6/10^6 = 1.05 s into rank 10, then one LAN
  // hop and two in-machine hops of 0.01001 s each to the deepest leaf.
  CHECK(report.arrival_time[0] == doctest::Approx(1.05).epsilon(1e-12));
  CHECK(report.makespan == doctest::Approx(1.08003).epsilon(1e-9));
}

TEST_CASE("simulate: zero-size messages cost latency plus overhead") {
  const RankTopology rt = one_machine_rt(2);
  CommTree tree = flat_tree(rt.all_ranks(), 0);
  apply_edge_levels(tree, rt);
  const Schedule s = bcast_schedule(tree, 0);
  const SimReport report = simulate(s, rt, uniform_links(0.25, 1e6, 0.125));
  CHECK(report.arrival_time[0] == doctest::Approx(0.25));
  // Receiver processing adds its overhead to the finish time.
  CHECK(report.makespan == doctest::Approx(0.375));
}

TEST_CASE("simulate: one-port sender serializes sends by overhead") {
  const RankTopology rt = one_machine_rt(4);
  CommTree tree = flat_tree(rt.all_ranks(), 0);
  apply_edge_levels(tree, rt);
  const Schedule s = bcast_schedule(tree, 0);
  const SimReport report = simulate(s, rt, uniform_links(10.0, 1e6, 1.0));
  CHECK(report.start_time[0] == doctest::Approx(0.0));
  CHECK(report.start_time[1] == doctest::Approx(1.0));
  CHECK(report.start_time[2] == doctest::Approx(2.0));
  CHECK(report.arrival_time[2] == doctest::Approx(12.0));
}

TEST_CASE("simulate: receiver occupancy serializes with its sends") {
  // Ranks 1 and 2 send to rank 0; rank 0 then relays to rank 3. The relay
  // must wait until rank 0's port processed both arrivals.
  const RankTopology rt = one_machine_rt(4);
  Schedule s;
  s.messages.push_back({0, 1, 0, 0, kMachine, {}});
  s.messages.push_back({1, 2, 0, 0, kMachine, {}});
  s.messages.push_back({2, 0, 3, 0, kMachine, {0, 1}});
  const SimReport report = simulate(s, rt, uniform_links(1.0, 1e6, 0.5));

  // Both arrivals at t=1; processing occupies [1, 1.5) and [1.5, 2).
  CHECK(report.start_time[2] == doctest::Approx(2.0));
  CHECK(report.arrival_time[2] == doctest::Approx(3.0));
  CHECK(report.finish_time[0] == doctest::Approx(2.5));
}

TEST_CASE("simulate: dependencies gate on arrival, ties break by id") {
  const RankTopology rt = one_machine_rt(3);
  Schedule s;
  s.messages.push_back({0, 1, 0, 0, kMachine, {}});
  s.messages.push_back({1, 0, 2, 0, kMachine, {0}});
  const SimReport report = simulate(s, rt, uniform_links(1.0, 1e6, 0.5));
  // Message 0 arrives at rank 0 at t=1, which also releases the relay.
  // The arrival processing carries the smaller id, so it wins the port:
  // the relay send starts at 1.5, not 1.0.
  CHECK(report.start_time[1] == doctest::Approx(1.5));
  CHECK(report.arrival_time[1] == doctest::Approx(2.5));
}

TEST_CASE("simulate: causality holds on random schedules") {
  std::mt19937 rng(51);
  for (int i = 0; i < 40; ++i) {
    const auto topo = gt::random_topology(rng, 12);
    const Schedule s = gt::random_schedule(rng, topo.rt);
    const SimReport report = simulate(s, topo.rt, topo.spec.links);
    for (const auto& m : s.messages) {
      CHECK(report.arrival_time[m.id] >= report.start_time[m.id]);
      for (int d : m.deps) {
        CHECK(report.start_time[m.id] >= report.arrival_time[d]);
      }
    }
    CHECK(report.makespan >= 0.0);
  }
}

TEST_CASE("simulate: identical inputs produce identical reports") {
  std::mt19937 rng(52);
  for (int i = 0; i < 20; ++i) {
    const auto topo = gt::random_topology(rng, 12);
    const Schedule s = gt::random_schedule(rng, topo.rt);
    const SimReport a = simulate(s, topo.rt, topo.spec.links);
    const SimReport b = simulate(s, topo.rt, topo.spec.links);
    CHECK(a == b);
  }
}

TEST_CASE("simulate: raising a latency never lowers the makespan") {
  std::mt19937 rng(53);
  for (int i = 0; i < 25; ++i) {
    const auto topo = gt::random_topology(rng, 12);
    const Schedule s = gt::random_schedule(rng, topo.rt);
    const double before = simulate(s, topo.rt, topo.spec.links).makespan;

    auto links = topo.spec.links;
    std::uniform_int_distribution<int> level_dist(0, kNumLevels - 1);
    links[level_dist(rng)].latency *= 3.0;
    CHECK(simulate(s, topo.rt, links).makespan >= before);
  }
}

TEST_CASE("simulate: raising overhead or cutting bandwidth never helps") {
  std::mt19937 rng(54);
  for (int i = 0; i < 25; ++i) {
    const auto topo = gt::random_topology(rng, 12);
    const Schedule s = gt::random_schedule(rng, topo.rt);
    const double before = simulate(s, topo.rt, topo.spec.links).makespan;

    std::uniform_int_distribution<int> level_dist(0, kNumLevels - 1);
    auto more_overhead = topo.spec.links;
    more_overhead[level_dist(rng)].overhead += 0.01;
    CHECK(simulate(s, topo.rt, more_overhead).makespan >= before);

    auto less_bandwidth = topo.spec.links;
    less_bandwidth[level_dist(rng)].bandwidth /= 4.0;
    CHECK(simulate(s, topo.rt, less_bandwidth).makespan >= before);
  }
}

TEST_CASE("count_by_level matches the simulator's traffic report") {
  std::mt19937 rng(55);
  for (int i = 0; i < 30; ++i) {
    const auto topo = gt::random_topology(rng, 12);
    const Schedule s = gt::random_schedule(rng, topo.rt);
    const LevelTraffic traffic = count_by_level(s, topo.rt);
    const SimReport report = simulate(s, topo.rt, topo.spec.links);
    CHECK(traffic.messages == report.messages_by_level);
    CHECK(traffic.bytes == report.bytes_by_level);
  }
}

TEST_CASE("count_by_level: worked two-site examples") {
  const RankTopology rt =
      topology_vectors(parse_topology(gt::two_site_config()));

  const CommTree ml = multilevel_tree(rt, rt.all_ranks(), 0);
  CHECK(count_by_level(bcast_schedule(ml, 1), rt).messages ==
        std::array<std::int64_t, 3>{1, 1, 17});

  const CommTree two_level =
      two_level_tree(rt, rt.all_ranks(), 0, Boundary::kMachine);
  CHECK(count_by_level(bcast_schedule(two_level, 1), rt).messages[kWan] == 2);

  CHECK(count_by_level(ack_barrier_schedule(rt), rt).messages[kWan] == 20);
}

TEST_CASE("barrier completeness: nobody finishes before the root's fan-in") {
  std::mt19937 rng(56);
  for (int i = 0; i < 10; ++i) {
    const auto topo = gt::random_topology(rng, 12);
    if (topo.rt.num_ranks() < 2) continue;
    const Schedule s = barrier_schedule(topo.rt, topo.rt.all_ranks());
    const SimReport report = simulate(s, topo.rt, topo.spec.links);

    double fan_in_done = 0.0;
    const size_t half = s.messages.size() / 2;
    for (size_t id = 0; id < half; ++id) {
      if (s.messages[id].receiver == 0) {
        fan_in_done = std::max(fan_in_done, report.arrival_time[id]);
      }
    }
    for (int r = 0; r < topo.rt.num_ranks(); ++r) {
      CHECK(report.finish_time[r] >= fan_in_done);
    }
  }
}

TEST_CASE("simulate rejects schedules that disagree with the topology") {
  const RankTopology rt = one_machine_rt(3);
  Schedule s;
  s.messages.push_back({0, 0, 1, 10, kWan, {}});  // level should be kMachine
  CHECK_THROWS_AS(simulate(s, rt, uniform_links(1, 1, 0)),
                  std::invalid_argument);
}

TEST_CASE("event trace format") {
  const RankTopology rt = one_machine_rt(2);
  CommTree tree = flat_tree(rt.all_ranks(), 0);
  apply_edge_levels(tree, rt);
  const Schedule s = bcast_schedule(tree, 1000000);
  const SimReport report = simulate(s, rt, uniform_links(1e-5, 1e8, 0.0));
  CHECK(format_trace(s, report) ==
        "t=0 send msg=0 0->1 level=2\n"
        "t=0.01001 arrive msg=0 0->1 level=2\n");
}
