#include "gridcoll/topology.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>
#include <unordered_map>

namespace gridcoll {
namespace {

std::string_view trim(std::string_view s) {
  const char* ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_tokens(std::string_view line) {
  std::vector<std::string> out;
  std::istringstream in{std::string(line)};
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

struct KeyValue {
  std::string key;
  std::string value;
};

KeyValue split_key_value(int line_no, const std::string& token) {
  auto eq = token.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == token.size()) {
    throw ParseError(line_no, "expected key=value, got '" + token + "'");
  }
  return {token.substr(0, eq), token.substr(eq + 1)};
}

double parse_double(int line_no, const std::string& key,
                    const std::string& value) {
  try {
    size_t pos = 0;
    double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ParseError(line_no, "invalid number for " + key + ": '" + value + "'");
  }
}

int parse_int(int line_no, const std::string& key, const std::string& value) {
  try {
    size_t pos = 0;
    int v = std::stoi(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ParseError(line_no, "invalid integer for " + key + ": '" + value + "'");
  }
}

void parse_link_line(int line_no, const std::vector<std::string>& tokens,
                     TopologySpec& spec, std::array<bool, kNumLevels>& seen) {
  std::optional<int> level;
  std::optional<double> latency, bandwidth, overhead;
  for (size_t i = 1; i < tokens.size(); ++i) {
    auto [key, value] = split_key_value(line_no, tokens[i]);
    if (key == "level") {
      if (level) throw ParseError(line_no, "duplicate key 'level'");
      level = parse_int(line_no, key, value);
    } else if (key == "latency") {
      if (latency) throw ParseError(line_no, "duplicate key 'latency'");
      latency = parse_double(line_no, key, value);
    } else if (key == "bandwidth") {
      if (bandwidth) throw ParseError(line_no, "duplicate key 'bandwidth'");
      bandwidth = parse_double(line_no, key, value);
    } else if (key == "overhead") {
      if (overhead) throw ParseError(line_no, "duplicate key 'overhead'");
      overhead = parse_double(line_no, key, value);
    } else {
      throw ParseError(line_no, "unknown key '" + key + "' in link directive");
    }
  }
  if (!level) throw ParseError(line_no, "link directive requires level=");
  if (!latency) throw ParseError(line_no, "link directive requires latency=");
  if (!bandwidth) throw ParseError(line_no, "link directive requires bandwidth=");
  if (*level < 0 || *level >= kNumLevels) {
    throw ParseError(line_no,
                     "level must be 0, 1 or 2, got " + std::to_string(*level));
  }
  if (seen[*level]) {
    throw ParseError(line_no, "duplicate link level " + std::to_string(*level));
  }
  if (*latency < 0) throw ParseError(line_no, "latency must be >= 0");
  if (*bandwidth <= 0) throw ParseError(line_no, "bandwidth must be > 0");
  if (overhead && *overhead < 0) {
    throw ParseError(line_no, "overhead must be >= 0");
  }
  seen[*level] = true;
  spec.links[*level] =
      LinkParams{*level, *latency, *bandwidth, overhead.value_or(0.0)};
}

void parse_subjob_line(int line_no, const std::vector<std::string>& tokens,
                       TopologySpec& spec) {
  std::optional<int> count;
  std::optional<std::string> machine, lan;
  for (size_t i = 1; i < tokens.size(); ++i) {
    auto [key, value] = split_key_value(line_no, tokens[i]);
    if (key == "count") {
      if (count) throw ParseError(line_no, "duplicate key 'count'");
      count = parse_int(line_no, key, value);
    } else if (key == "machine") {
      if (machine) throw ParseError(line_no, "duplicate key 'machine'");
      machine = value;
    } else if (key == "lan") {
      if (lan) throw ParseError(line_no, "duplicate key 'lan'");
      lan = value;
    } else {
      throw ParseError(line_no,
                       "unknown key '" + key + "' in subjob directive");
    }
  }
  if (!count) throw ParseError(line_no, "subjob directive requires count=");
  if (!machine) throw ParseError(line_no, "subjob directive requires machine=");
  if (*count < 1) throw ParseError(line_no, "count must be >= 1");

  SubjobSpec sj;
  sj.index = static_cast<int>(spec.subjobs.size());
  sj.count = *count;
  sj.machine_id = *machine;
  sj.lan_id = lan;
  spec.subjobs.push_back(std::move(sj));
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

TopologySpec parse_topology(std::string_view text) {
  TopologySpec spec;
  std::array<bool, kNumLevels> link_seen{};

  int line_no = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    std::string_view line = (nl == std::string_view::npos)
                                ? text.substr(pos)
                                : text.substr(pos, nl - pos);
    pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
    ++line_no;

    if (auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;

    auto tokens = split_tokens(line);
    if (tokens[0] == "link") {
      parse_link_line(line_no, tokens, spec, link_seen);
    } else if (tokens[0] == "subjob") {
      parse_subjob_line(line_no, tokens, spec);
    } else {
      throw ParseError(line_no, "unknown directive '" + tokens[0] + "'");
    }
  }

  for (int lvl = 0; lvl < kNumLevels; ++lvl) {
    if (!link_seen[lvl]) {
      throw ParseError(line_no, "missing link level " + std::to_string(lvl));
    }
  }
  if (spec.subjobs.empty()) {
    throw ParseError(line_no, "config defines no subjobs");
  }

  spec.total_ranks = 0;
  for (const auto& sj : spec.subjobs) spec.total_ranks += sj.count;

  // Equal machine ids are allowed but the subjobs stay distinct machine
  // groups; flag it since it usually means a typo in the config.
  std::unordered_map<std::string, int> first_machine_use;
  for (const auto& sj : spec.subjobs) {
    auto [it, inserted] = first_machine_use.emplace(sj.machine_id, sj.index);
    if (!inserted) {
      spec.warnings.push_back("subjobs " + std::to_string(it->second) + " and " +
                              std::to_string(sj.index) + " share machine id '" +
                              sj.machine_id +
                              "' but remain distinct machine groups");
    }
  }
  return spec;
}

std::string to_config_text(const TopologySpec& spec) {
  std::string out;
  for (int lvl = 0; lvl < kNumLevels; ++lvl) {
    const auto& lk = spec.links[lvl];
    out += "link level=" + std::to_string(lvl) +
           " latency=" + format_double(lk.latency) +
           " bandwidth=" + format_double(lk.bandwidth) +
           " overhead=" + format_double(lk.overhead) + "\n";
  }
  for (const auto& sj : spec.subjobs) {
    out += "subjob count=" + std::to_string(sj.count) + " machine=" +
           sj.machine_id;
    if (sj.lan_id) out += " lan=" + *sj.lan_id;
    out += "\n";
  }
  return out;
}

RankTopology::RankTopology(std::vector<Vector> vectors,
                           std::vector<std::vector<int>> lan_machines,
                           std::vector<std::vector<int>> machine_ranks)
    : vectors_(std::move(vectors)),
      lan_machines_(std::move(lan_machines)),
      machine_ranks_(std::move(machine_ranks)) {}

std::vector<int> RankTopology::ranks_in_lan(int lan) const {
  std::vector<int> ranks;
  for (int machine : machines_in_lan(lan)) {
    const auto& mr = ranks_in_machine(machine);
    ranks.insert(ranks.end(), mr.begin(), mr.end());
  }
  std::sort(ranks.begin(), ranks.end());
  return ranks;
}

std::vector<int> RankTopology::all_ranks() const {
  std::vector<int> ranks(vectors_.size());
  for (size_t i = 0; i < ranks.size(); ++i) ranks[i] = static_cast<int>(i);
  return ranks;
}

RankTopology topology_vectors(const TopologySpec& spec) {
  // LAN group index by first appearance of the lan token; a subjob without
  // a token gets a fresh index of its own.
  std::unordered_map<std::string, int> lan_index;
  std::vector<int> subjob_lan(spec.subjobs.size());
  int next_lan = 0;
  for (const auto& sj : spec.subjobs) {
    if (sj.lan_id) {
      auto [it, inserted] = lan_index.emplace(*sj.lan_id, next_lan);
      if (inserted) ++next_lan;
      subjob_lan[sj.index] = it->second;
    } else {
      subjob_lan[sj.index] = next_lan++;
    }
  }

  std::vector<RankTopology::Vector> vectors;
  vectors.reserve(spec.total_ranks);
  std::vector<std::vector<int>> machine_ranks(spec.subjobs.size());
  std::vector<std::vector<int>> lan_machines(next_lan);

  int rank = 0;
  for (const auto& sj : spec.subjobs) {
    lan_machines[subjob_lan[sj.index]].push_back(sj.index);
    for (int i = 0; i < sj.count; ++i, ++rank) {
      vectors.push_back({subjob_lan[sj.index], sj.index});
      machine_ranks[sj.index].push_back(rank);
    }
  }

  return RankTopology(std::move(vectors), std::move(lan_machines),
                      std::move(machine_ranks));
}

int edge_level(const RankTopology& rt, int u, int v) {
  if (u == v) {
    throw std::invalid_argument("edge_level: u and v must be distinct ranks");
  }
  const auto& vu = rt.vec(u);
  const auto& vv = rt.vec(v);
  for (int i = 0; i < 2; ++i) {
    if (vu[i] != vv[i]) return i;
  }
  return kMachine;
}

}  // namespace gridcoll
