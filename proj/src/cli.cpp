#include "gridcoll/cli.hpp"

#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "gridcoll/analysis.hpp"
#include "gridcoll/collectives.hpp"
#include "gridcoll/simnet.hpp"

namespace gridcoll {
namespace {

constexpr const char* kCsvHeader =
    "message_size,algorithm,root,total_time,makespan_max,wan_msgs,lan_msgs,"
    "local_msgs";

std::string format_seconds(double t) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", t);
  return buf;
}

struct CliError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError("cannot open topology file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

TopologySpec load_topology(const std::string& path, std::ostream& err) {
  TopologySpec spec;
  try {
    spec = parse_topology(read_file(path));
  } catch (const ParseError& e) {
    throw CliError(path + ": " + e.what());
  }
  for (const auto& w : spec.warnings) err << "warning: " << w << "\n";
  return spec;
}

Algorithm algorithm_from_flag(const std::string& name) {
  if (auto algo = parse_algorithm(name)) return *algo;
  throw CliError("unknown algorithm '" + name +
                 "' (expected binomial, 2level-machine, 2level-lan or "
                 "multilevel)");
}

std::vector<std::int64_t> parse_sizes(const std::string& flag) {
  std::vector<std::int64_t> sizes;
  std::stringstream in(flag);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      size_t pos = 0;
      std::int64_t v = std::stoll(item, &pos);
      if (pos != item.size() || v < 0) throw std::invalid_argument(item);
      sizes.push_back(v);
    } catch (const std::exception&) {
      throw CliError("invalid size '" + item + "' in --sizes");
    }
  }
  if (sizes.empty()) throw CliError("--sizes is empty");
  return sizes;
}

std::vector<int> parse_roots(const std::string& flag, int num_ranks) {
  if (flag == "all") {
    std::vector<int> roots(num_ranks);
    for (int r = 0; r < num_ranks; ++r) roots[r] = r;
    return roots;
  }
  int root = 0;
  try {
    size_t pos = 0;
    root = std::stoi(flag, &pos);
    if (pos != flag.size()) throw std::invalid_argument(flag);
  } catch (const std::exception&) {
    throw CliError("invalid root '" + flag + "' (expected a rank or 'all')");
  }
  if (root < 0 || root >= num_ranks) {
    throw CliError("root " + std::to_string(root) + " out of range (0.." +
                   std::to_string(num_ranks - 1) + ")");
  }
  return {root};
}

void write_output(const std::string& path, const std::string& data,
                  std::ostream& out) {
  if (path.empty()) {
    out << data;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw CliError("cannot open output file '" + path + "'");
  file << data;
}

void write_trace(const std::string& path, const std::string& trace) {
  if (path.empty()) return;
  std::ofstream file(path, std::ios::binary);
  if (!file) throw CliError("cannot open trace file '" + path + "'");
  file << trace;
}

struct CommonFlags {
  std::string topology;
  std::string collective = "bcast";
  std::string algorithm = "multilevel";
  std::string sizes = "1024";
  std::string root = "0";
  std::string output;
  std::string trace;
};

int cmd_run(const CommonFlags& flags, std::ostream& out, std::ostream& err) {
  const TopologySpec spec = load_topology(flags.topology, err);
  const RankTopology rt = topology_vectors(spec);
  const std::vector<int> members = rt.all_ranks();
  const Algorithm algo = algorithm_from_flag(flags.algorithm);
  const auto sizes = parse_sizes(flags.sizes);
  const auto roots = parse_roots(flags.root, rt.num_ranks());

  static const std::vector<std::string> kCollectives{"bcast", "reduce",
                                                     "barrier", "gather",
                                                     "scatter"};
  if (std::find(kCollectives.begin(), kCollectives.end(), flags.collective) ==
      kCollectives.end()) {
    throw CliError("unknown collective '" + flags.collective + "'");
  }

  std::string csv = std::string(kCsvHeader) + "\n";
  std::string trace;
  for (std::int64_t size : sizes) {
    for (int root : roots) {
      Schedule schedule;
      if (flags.collective == "barrier") {
        // A barrier's schedule is fixed by the topology; the algorithm and
        // root flags do not affect it.
        schedule = barrier_schedule(rt, members);
      } else {
        const CommTree tree = build_tree(rt, members, root, algo);
        if (flags.collective == "bcast") {
          schedule = bcast_schedule(tree, size);
        } else if (flags.collective == "reduce") {
          schedule = reduce_schedule(tree, size);
        } else if (flags.collective == "gather") {
          schedule = gather_schedule(tree, size);
        } else {
          schedule = scatter_schedule(tree, size);
        }
      }
      const SimReport report = simulate(schedule, rt, spec.links);
      if (!flags.trace.empty()) trace += format_trace(schedule, report);

      csv += std::to_string(size) + "," + flags.algorithm + "," +
             std::to_string(root) + "," + format_seconds(report.makespan) +
             "," + format_seconds(report.makespan) + "," +
             std::to_string(report.messages_by_level[kWan]) + "," +
             std::to_string(report.messages_by_level[kLan]) + "," +
             std::to_string(report.messages_by_level[kMachine]) + "\n";
    }
  }
  write_output(flags.output, csv, out);
  write_trace(flags.trace, trace);
  return 0;
}

int cmd_bench(const CommonFlags& flags, std::ostream& out, std::ostream& err) {
  const TopologySpec spec = load_topology(flags.topology, err);
  const Algorithm algo = algorithm_from_flag(flags.algorithm);
  const auto sizes = parse_sizes(flags.sizes);

  std::string trace;
  const auto rows = bench_rotating_root(spec, algo, sizes,
                                        flags.trace.empty() ? nullptr : &trace);

  std::string csv = std::string(kCsvHeader) + "\n";
  for (const BenchRow& row : rows) {
    csv += std::to_string(row.message_size) + "," + row.algorithm + ",all," +
           format_seconds(row.total_time) + "," +
           format_seconds(row.makespan_max) + "," +
           std::to_string(row.wan_msgs) + "," + std::to_string(row.lan_msgs) +
           "," + std::to_string(row.local_msgs) + "\n";
  }
  write_output(flags.output, csv, out);
  write_trace(flags.trace, trace);
  return 0;
}

int cmd_tree(const CommonFlags& flags, std::ostream& out, std::ostream& err) {
  const TopologySpec spec = load_topology(flags.topology, err);
  const RankTopology rt = topology_vectors(spec);
  const Algorithm algo = algorithm_from_flag(flags.algorithm);
  if (flags.root == "all") {
    throw CliError("tree requires a single --root rank");
  }
  const auto roots = parse_roots(flags.root, rt.num_ranks());

  const CommTree tree = build_tree(rt, rt.all_ranks(), roots[0], algo);
  write_output(flags.output, to_dot(tree), out);
  return 0;
}

}  // namespace

std::vector<BenchRow> bench_rotating_root(const TopologySpec& spec,
                                          Algorithm algorithm,
                                          std::span<const std::int64_t> sizes,
                                          std::string* trace) {
  const RankTopology rt = topology_vectors(spec);
  const std::vector<int> members = rt.all_ranks();
  const int num_ranks = rt.num_ranks();

  const Schedule barrier = barrier_schedule(rt, members);
  const Schedule ack = ack_barrier_schedule(rt);

  std::vector<BenchRow> rows;
  for (std::int64_t size : sizes) {
    BenchRow row;
    row.message_size = size;
    row.algorithm = std::string(algorithm_name(algorithm));

    auto accumulate = [&](const Schedule& schedule) {
      const SimReport report = simulate(schedule, rt, spec.links);
      if (trace) *trace += format_trace(schedule, report);
      row.total_time += report.makespan;
      row.wan_msgs += report.messages_by_level[kWan];
      row.lan_msgs += report.messages_by_level[kLan];
      row.local_msgs += report.messages_by_level[kMachine];
      return report.makespan;
    };

    accumulate(barrier);
    for (int root = 0; root < num_ranks; ++root) {
      const CommTree tree = build_tree(rt, members, root, algorithm);
      const double span = accumulate(bcast_schedule(tree, size));
      row.makespan_max = std::max(row.makespan_max, span);
      accumulate(ack);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"topology-aware collective communication trees and a network "
               "cost simulator"};
  app.require_subcommand(1);

  CommonFlags flags;
  auto add_common = [&](CLI::App* cmd, bool with_collective, bool with_root,
                        bool with_sizes, bool with_trace) {
    cmd->add_option("--topology", flags.topology, "topology config file")
        ->required();
    cmd->add_option("--algorithm", flags.algorithm,
                    "binomial|2level-machine|2level-lan|multilevel");
    if (with_collective) {
      cmd->add_option("--collective", flags.collective,
                      "bcast|reduce|barrier|gather|scatter");
    }
    if (with_sizes) {
      cmd->add_option("--sizes", flags.sizes, "comma list of message bytes");
    }
    if (with_root) {
      cmd->add_option("--root", flags.root, "root rank or 'all'");
    }
    cmd->add_option("--output", flags.output,
                    "write results here instead of stdout");
    if (with_trace) {
      cmd->add_option("--trace", flags.trace, "write an event trace here");
    }
  };

  CLI::App* run = app.add_subcommand("run", "simulate one collective");
  add_common(run, true, true, true, true);
  CLI::App* bench =
      app.add_subcommand("bench", "rotating-root broadcast benchmark");
  add_common(bench, false, false, true, true);
  CLI::App* tree = app.add_subcommand("tree", "export a tree as DOT");
  add_common(tree, false, true, false, false);

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (run->parsed()) return cmd_run(flags, out, err);
    if (bench->parsed()) return cmd_bench(flags, out, err);
    return cmd_tree(flags, out, err);
  } catch (const CliError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace gridcoll
