#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "frrsim/analysis.hpp"
#include "frrsim/generators.hpp"
#include "frrsim/scheme.hpp"

namespace frrsim {

// ---------------------------------------------------------------------------
// Configuration model.

struct FlowSpec {
  std::string id;
  std::string source;
  std::string destination;

  bool operator==(const FlowSpec&) const = default;
};

enum class FailureKind { kNone, kExplicit, kAllLinks, kAllNodes };

NLOHMANN_JSON_SERIALIZE_ENUM(FailureKind, {
                                              {FailureKind::kNone, "none"},
                                              {FailureKind::kExplicit, "explicit"},
                                              {FailureKind::kAllLinks, "all_links"},
                                              {FailureKind::kAllNodes, "all_nodes"},
                                          })

struct FailureSpec {
  FailureKind kind = FailureKind::kNone;
  std::vector<std::pair<std::string, std::string>> links;
  std::vector<std::string> nodes;

  bool operator==(const FailureSpec&) const = default;
};

struct CapacitySpec {
  std::pair<std::string, std::string> link;
  double rate = 1.0;

  bool operator==(const CapacitySpec&) const = default;
};

struct ThroughputSpec {
  double default_capacity = 1.0;
  std::vector<CapacitySpec> capacities;
  TimelineParams timeline;

  bool operator==(const ThroughputSpec&) const = default;
};

struct ScenarioConfig {
  std::string name = "scenario";
  TopologyDescriptor topology;
  std::optional<std::uint64_t> seed;
  bool all_pairs = false;
  std::vector<FlowSpec> flows;
  SchemeSpec scheme;
  FailureSpec failures;
  std::optional<ThroughputSpec> throughput;
  std::string output_dir;

  bool operator==(const ScenarioConfig&) const = default;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

namespace detail {

inline std::string escape_pointer_token(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '~') {
      out += "~0";
    } else if (c == '/') {
      out += "~1";
    } else {
      out += c;
    }
  }
  return out;
}

// Strict reader over one JSON value; every error carries the JSON pointer of
// the offending value.
class Reader {
 public:
  Reader(const nlohmann::json& j, std::string pointer) : j_(j), ptr_(std::move(pointer)) {}

  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError((ptr_.empty() ? "/" : ptr_) + ": " + msg);
  }

  const nlohmann::json& json() const { return j_; }
  const std::string& pointer() const { return ptr_; }

  void require_object(std::initializer_list<const char*> allowed) const {
    if (!j_.is_object()) fail("expected an object");
    for (const auto& [key, unused] : j_.items()) {
      bool ok = false;
      for (const char* a : allowed) ok = ok || key == a;
      if (!ok) child_pointer(key, "unknown key");
    }
  }

  bool has(const char* key) const { return j_.contains(key); }

  Reader at(const std::string& key) const {
    if (!j_.contains(key)) fail("missing required key \"" + key + "\"");
    return {j_.at(key), ptr_ + "/" + escape_pointer_token(key)};
  }

  Reader at(std::size_t i) const { return {j_.at(i), ptr_ + "/" + std::to_string(i)}; }

  std::size_t array_size() const {
    if (!j_.is_array()) fail("expected an array");
    return j_.size();
  }

  std::string str() const {
    if (j_.is_string()) return j_.get<std::string>();
    if (j_.is_number_integer()) return j_.dump();
    fail("expected a string");
  }

  double number() const {
    if (!j_.is_number()) fail("expected a number");
    return j_.get<double>();
  }

  std::int64_t integer() const {
    if (!j_.is_number_integer()) fail("expected an integer");
    return j_.get<std::int64_t>();
  }

  std::pair<std::string, std::string> pair() const {
    if (array_size() != 2) fail("expected a pair of node names");
    return {at(0).str(), at(1).str()};
  }

  template <typename Enum>
  Enum enumeration() const {
    if (!j_.is_string()) fail("expected a string");
    const Enum e = j_.get<Enum>();
    if (nlohmann::json(e) != j_) fail("unknown value " + j_.dump());
    return e;
  }

 private:
  [[noreturn]] void child_pointer(const std::string& key, const std::string& msg) const {
    throw ConfigError(ptr_ + "/" + escape_pointer_token(key) + ": " + msg);
  }

  const nlohmann::json& j_;
  std::string ptr_;
};

inline int small_int(const Reader& r, int lo) {
  const auto v = r.integer();
  if (v < lo || v > 1'000'000) r.fail("must be an integer >= " + std::to_string(lo));
  return static_cast<int>(v);
}

inline TopologyDescriptor read_topology(const Reader& r) {
  if (!r.json().is_object()) r.fail("expected an object");
  TopologyDescriptor d;
  d.kind = r.at("kind").enumeration<TopologyKind>();
  switch (d.kind) {
    case TopologyKind::kFigure1: r.require_object({"kind"}); break;
    case TopologyKind::kComplete:
      r.require_object({"kind", "n"});
      d.n = small_int(r.at("n"), 3);
      break;
    case TopologyKind::kTorus:
      r.require_object({"kind", "rows", "cols"});
      d.rows = small_int(r.at("rows"), 3);
      d.cols = small_int(r.at("cols"), 3);
      break;
    case TopologyKind::kHypercube:
      r.require_object({"kind", "dim"});
      d.dim = small_int(r.at("dim"), 2);
      if (d.dim > 16) r.at("dim").fail("must be at most 16");
      break;
    case TopologyKind::kRandom:
      r.require_object({"kind", "n", "p", "min_edge_connectivity"});
      d.n = small_int(r.at("n"), 2);
      d.p = r.at("p").number();
      if (d.p < 0.0 || d.p > 1.0) r.at("p").fail("must lie in [0, 1]");
      if (r.has("min_edge_connectivity")) {
        d.min_edge_connectivity = small_int(r.at("min_edge_connectivity"), 1);
      }
      break;
    case TopologyKind::kFile:
      r.require_object({"kind", "path"});
      d.path = r.at("path").str();
      break;
    case TopologyKind::kInline: {
      r.require_object({"kind", "nodes", "links"});
      const Reader nodes = r.at("nodes");
      for (std::size_t i = 0; i < nodes.array_size(); ++i) d.nodes.push_back(nodes.at(i).str());
      const Reader links = r.at("links");
      for (std::size_t i = 0; i < links.array_size(); ++i) d.links.push_back(links.at(i).pair());
      break;
    }
  }
  return d;
}

inline SchemeSpec read_scheme(const Reader& r) {
  r.require_object({"kind", "k", "paths"});
  SchemeSpec s;
  s.kind = r.at("kind").enumeration<SchemeKind>();
  if (r.has("k")) s.k = small_int(r.at("k"), 1);
  if (r.has("paths")) {
    if (s.kind != SchemeKind::kPartition) r.at("paths").fail("only valid for partition schemes");
    const Reader paths = r.at("paths");
    if (!paths.json().is_object()) paths.fail("expected an object keyed by flow id");
    for (const auto& [flow, unused] : paths.json().items()) {
      const Reader list = paths.at(flow);
      auto& out = s.paths[flow];
      for (std::size_t i = 0; i < list.array_size(); ++i) {
        const Reader path = list.at(i);
        std::vector<std::string> names;
        for (std::size_t k = 0; k < path.array_size(); ++k) names.push_back(path.at(k).str());
        out.push_back(std::move(names));
      }
    }
  }
  return s;
}

inline FailureSpec read_failures(const Reader& r) {
  if (!r.json().is_object()) r.fail("expected an object");
  FailureSpec f;
  f.kind = r.at("kind").enumeration<FailureKind>();
  if (f.kind != FailureKind::kExplicit) {
    r.require_object({"kind"});
    return f;
  }
  r.require_object({"kind", "links", "nodes"});
  if (r.has("links")) {
    const Reader links = r.at("links");
    for (std::size_t i = 0; i < links.array_size(); ++i) f.links.push_back(links.at(i).pair());
  }
  if (r.has("nodes")) {
    const Reader nodes = r.at("nodes");
    for (std::size_t i = 0; i < nodes.array_size(); ++i) f.nodes.push_back(nodes.at(i).str());
  }
  return f;
}

inline double non_negative(const Reader& r) {
  const double v = r.number();
  if (!(v >= 0.0)) r.fail("must be non-negative");
  return v;
}

inline ThroughputSpec read_throughput(const Reader& r) {
  r.require_object({"default_capacity", "capacities", "failure_instant", "effect_delay",
                    "control_plane_delay", "shortcut_delay", "sample_step", "horizon"});
  ThroughputSpec t;
  TimelineParams& p = t.timeline;
  if (r.has("default_capacity")) t.default_capacity = non_negative(r.at("default_capacity"));
  if (r.has("capacities")) {
    const Reader caps = r.at("capacities");
    for (std::size_t i = 0; i < caps.array_size(); ++i) {
      const Reader c = caps.at(i);
      c.require_object({"link", "rate"});
      t.capacities.push_back({c.at("link").pair(), non_negative(c.at("rate"))});
    }
  }
  if (r.has("failure_instant")) p.failure_instant = r.at("failure_instant").number();
  if (r.has("effect_delay")) p.effect_delay = non_negative(r.at("effect_delay"));
  if (r.has("control_plane_delay")) p.control_plane_delay = non_negative(r.at("control_plane_delay"));
  if (r.has("shortcut_delay")) p.shortcut_delay = non_negative(r.at("shortcut_delay"));
  if (r.has("sample_step")) {
    p.sample_step = r.at("sample_step").number();
    if (!(p.sample_step > 0.0)) r.at("sample_step").fail("must be positive");
  }
  if (r.has("horizon")) p.horizon = non_negative(r.at("horizon"));
  return t;
}

// 1-based line of the value a JSON pointer designates, located by scanning
// for its object keys in order. Good enough for diagnostics.
inline std::size_t locate_pointer(const std::string& text, const std::string& pointer) {
  std::size_t pos = 0;
  std::size_t found = std::string::npos;
  std::size_t begin = 1;
  while (begin <= pointer.size()) {
    std::size_t end = pointer.find('/', begin);
    if (end == std::string::npos) end = pointer.size();
    std::string token = pointer.substr(begin, end - begin);
    begin = end + 1;
    if (token.empty() || token.find_first_not_of("0123456789") == std::string::npos) continue;
    const std::size_t at = text.find("\"" + token + "\"", pos);
    if (at == std::string::npos) break;
    found = at;
    pos = at + token.size() + 2;
  }
  if (found == std::string::npos) return 1;
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(found), '\n'));
}

inline std::string pointer_of(const std::string& message) {
  if (message.empty() || message[0] != '/') return {};
  return message.substr(0, message.find(": "));
}

}  // namespace detail

inline ScenarioConfig config_from_json(const nlohmann::json& j) {
  const detail::Reader r(j, "");
  r.require_object(
      {"name", "topology", "seed", "flows", "scheme", "failures", "throughput", "output"});
  ScenarioConfig c;
  if (r.has("name")) c.name = r.at("name").str();
  c.topology = detail::read_topology(r.at("topology"));
  if (r.has("seed")) {
    const auto s = r.at("seed").integer();
    if (s < 0) r.at("seed").fail("must be non-negative");
    c.seed = static_cast<std::uint64_t>(s);
  }
  if (c.topology.kind == TopologyKind::kRandom) {
    if (!c.seed) r.fail("missing required key \"seed\" (random topology)");
    c.topology.seed = *c.seed;
  }
  const detail::Reader flows = r.at("flows");
  if (flows.json().is_string()) {
    if (flows.str() != "all_pairs") flows.fail("expected \"all_pairs\" or a list of flows");
    c.all_pairs = true;
  } else {
    std::set<std::string> ids;
    for (std::size_t i = 0; i < flows.array_size(); ++i) {
      const detail::Reader f = flows.at(i);
      f.require_object({"id", "source", "destination"});
      FlowSpec spec{f.has("id") ? f.at("id").str() : "", f.at("source").str(),
                    f.at("destination").str()};
      if (spec.id.empty()) spec.id = spec.source + "->" + spec.destination;
      if (!ids.insert(spec.id).second) f.fail("duplicate flow id '" + spec.id + "'");
      c.flows.push_back(std::move(spec));
    }
    if (c.flows.empty()) flows.fail("at least one flow is required");
  }
  c.scheme = detail::read_scheme(r.at("scheme"));
  if (r.has("failures")) c.failures = detail::read_failures(r.at("failures"));
  if (r.has("throughput")) c.throughput = detail::read_throughput(r.at("throughput"));
  if (r.has("output")) {
    const detail::Reader out = r.at("output");
    out.require_object({"dir"});
    if (out.has("dir")) c.output_dir = out.at("dir").str();
  }
  return c;
}

inline nlohmann::ordered_json config_to_json(const ScenarioConfig& c) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["name"] = c.name;
  ordered_json topo;
  topo["kind"] = c.topology.kind;
  switch (c.topology.kind) {
    case TopologyKind::kFigure1: break;
    case TopologyKind::kComplete: topo["n"] = c.topology.n; break;
    case TopologyKind::kTorus:
      topo["rows"] = c.topology.rows;
      topo["cols"] = c.topology.cols;
      break;
    case TopologyKind::kHypercube: topo["dim"] = c.topology.dim; break;
    case TopologyKind::kRandom:
      topo["n"] = c.topology.n;
      topo["p"] = c.topology.p;
      topo["min_edge_connectivity"] = c.topology.min_edge_connectivity;
      break;
    case TopologyKind::kFile: topo["path"] = c.topology.path; break;
    case TopologyKind::kInline: {
      topo["nodes"] = c.topology.nodes;
      auto links = ordered_json::array();
      for (const auto& [a, b] : c.topology.links) links.push_back({a, b});
      topo["links"] = std::move(links);
      break;
    }
  }
  j["topology"] = std::move(topo);
  if (c.seed) j["seed"] = *c.seed;
  if (c.all_pairs) {
    j["flows"] = "all_pairs";
  } else {
    auto flows = ordered_json::array();
    for (const auto& f : c.flows) {
      flows.push_back(ordered_json{{"id", f.id}, {"source", f.source}, {"destination", f.destination}});
    }
    j["flows"] = std::move(flows);
  }
  ordered_json scheme;
  scheme["kind"] = c.scheme.kind;
  if (c.scheme.k) scheme["k"] = *c.scheme.k;
  if (!c.scheme.paths.empty()) {
    ordered_json paths = ordered_json::object();
    for (const auto& [flow, list] : c.scheme.paths) paths[flow] = list;
    scheme["paths"] = std::move(paths);
  }
  j["scheme"] = std::move(scheme);
  ordered_json failures;
  failures["kind"] = c.failures.kind;
  if (c.failures.kind == FailureKind::kExplicit) {
    auto links = ordered_json::array();
    for (const auto& [a, b] : c.failures.links) links.push_back({a, b});
    failures["links"] = std::move(links);
    failures["nodes"] = c.failures.nodes;
  }
  j["failures"] = std::move(failures);
  if (c.throughput) {
    const ThroughputSpec& t = *c.throughput;
    ordered_json tp;
    tp["default_capacity"] = t.default_capacity;
    auto caps = ordered_json::array();
    for (const auto& cap : t.capacities) {
      caps.push_back(ordered_json{{"link", {cap.link.first, cap.link.second}}, {"rate", cap.rate}});
    }
    tp["capacities"] = std::move(caps);
    tp["failure_instant"] = t.timeline.failure_instant;
    tp["effect_delay"] = t.timeline.effect_delay;
    tp["control_plane_delay"] = t.timeline.control_plane_delay;
    tp["shortcut_delay"] = t.timeline.shortcut_delay;
    tp["sample_step"] = t.timeline.sample_step;
    tp["horizon"] = t.timeline.horizon;
    j["throughput"] = std::move(tp);
  }
  if (!c.output_dir.empty()) j["output"] = ordered_json{{"dir", c.output_dir}};
  return j;
}

// Parses scenario text; errors read "<origin>:<line>:<col>: ..." for syntax
// and "<origin>:<line>: <json pointer>: ..." for validation.
inline ScenarioConfig parse_config(const std::string& text, const std::string& origin = "config") {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const auto upto = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i < upto; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError(origin + ":" + std::to_string(line) + ":" + std::to_string(col) +
                      ": syntax error: " + e.what());
  }
  try {
    return config_from_json(j);
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    throw ConfigError(origin + ":" + std::to_string(detail::locate_pointer(text, detail::pointer_of(msg))) +
                      ": " + msg);
  }
}

inline ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

// ---------------------------------------------------------------------------
// Resolved scenario.

struct Scenario {
  ScenarioConfig config;
  Topology topology;
  std::vector<Flow> flows;
};

namespace detail {

inline LinkId resolve_link(const Topology& t, const std::pair<std::string, std::string>& l,
                           const std::string& where) {
  const auto a = t.find(l.first);
  const auto b = t.find(l.second);
  if (!a || !b) throw ConfigError(where + ": unknown node in link " + l.first + "-" + l.second);
  const auto id = t.link_between(*a, *b);
  if (!id) throw ConfigError(where + ": no link " + l.first + "-" + l.second);
  return *id;
}

}  // namespace detail

// Builds the topology and checks every name the config mentions against it.
// Relative topology file paths resolve against `base_dir`.
inline Scenario resolve(const ScenarioConfig& config, const std::filesystem::path& base_dir = {}) {
  Scenario s{config, {}, {}};
  TopologyDescriptor d = config.topology;
  if (d.kind == TopologyKind::kFile && !base_dir.empty() &&
      std::filesystem::path(d.path).is_relative()) {
    d.path = (base_dir / d.path).string();
  }
  try {
    s.topology = build_topology(d);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("/topology: ") + e.what());
  }
  const Topology& t = s.topology;
  if (config.all_pairs) {
    s.flows = all_pair_flows(t);
  } else {
    for (std::size_t i = 0; i < config.flows.size(); ++i) {
      const auto& f = config.flows[i];
      const std::string where = "/flows/" + std::to_string(i);
      if (!t.find(f.source)) throw ConfigError(where + "/source: unknown node '" + f.source + "'");
      if (!t.find(f.destination)) {
        throw ConfigError(where + "/destination: unknown node '" + f.destination + "'");
      }
      if (f.source == f.destination) throw ConfigError(where + ": source equals destination");
      s.flows.push_back(make_flow(t, f.id, f.source, f.destination));
    }
  }
  for (const auto& [flow, paths] : config.scheme.paths) {
    const auto it = std::find_if(s.flows.begin(), s.flows.end(),
                                 [&](const Flow& f) { return f.id == flow; });
    const std::string where = "/scheme/paths/" + detail::escape_pointer_token(flow);
    if (it == s.flows.end()) throw ConfigError(where + ": no such flow");
    for (const auto& path : paths) {
      for (const auto& n : path) {
        if (!t.find(n)) throw ConfigError(where + ": unknown node '" + n + "'");
      }
    }
  }
  if (config.failures.kind == FailureKind::kExplicit) {
    for (std::size_t i = 0; i < config.failures.links.size(); ++i) {
      detail::resolve_link(t, config.failures.links[i], "/failures/links/" + std::to_string(i));
    }
    for (std::size_t i = 0; i < config.failures.nodes.size(); ++i) {
      if (!t.find(config.failures.nodes[i])) {
        throw ConfigError("/failures/nodes/" + std::to_string(i) + ": unknown node '" +
                          config.failures.nodes[i] + "'");
      }
    }
  }
  if (config.throughput) {
    for (std::size_t i = 0; i < config.throughput->capacities.size(); ++i) {
      detail::resolve_link(t, config.throughput->capacities[i].link,
                           "/throughput/capacities/" + std::to_string(i) + "/link");
    }
  }
  return s;
}

inline FailureSet explicit_failures(const Scenario& s) {
  FailureSet fs;
  for (const auto& l : s.config.failures.links) {
    fs.fail_link(s.topology, detail::resolve_link(s.topology, l, "/failures"));
  }
  for (const auto& n : s.config.failures.nodes) fs.fail_node(s.topology, s.topology.node(n));
  return fs;
}

inline FailureSweep failure_sweep(const Scenario& s) {
  FailureSweep sweep;
  switch (s.config.failures.kind) {
    case FailureKind::kNone: sweep.kind = FailureSweepKind::kNone; break;
    case FailureKind::kExplicit:
      sweep.kind = FailureSweepKind::kExplicit;
      sweep.explicit_set = explicit_failures(s);
      break;
    case FailureKind::kAllLinks: sweep.kind = FailureSweepKind::kAllLinks; break;
    case FailureKind::kAllNodes: sweep.kind = FailureSweepKind::kAllNodes; break;
  }
  return sweep;
}

inline ScenarioReport run_verifier(const Scenario& s) {
  SchemeCompiler compiler(s.topology, s.config.scheme);
  return verify_theorem1(s.topology, compiler, s.flows, failure_sweep(s));
}

inline Timeline run_timeline(const Scenario& s) {
  if (!s.config.throughput) throw ConfigError("/throughput: required for the timeline");
  if (s.config.failures.kind != FailureKind::kExplicit) {
    throw ConfigError("/failures: the timeline needs an explicit failure set");
  }
  const ThroughputSpec& tp = *s.config.throughput;
  std::map<LinkId, double> overrides;
  for (const auto& c : tp.capacities) {
    overrides[detail::resolve_link(s.topology, c.link, "/throughput/capacities")] = c.rate;
  }
  const FailureSet failures = explicit_failures(s);
  SchemeCompiler compiler(s.topology, s.config.scheme);
  const TimelineRoutes routes = build_timeline_routes(s.topology, compiler, s.flows, failures);
  const auto intact = edge_capacities(s.topology, FailureSet{}, tp.default_capacity, overrides);
  const auto failed = edge_capacities(s.topology, failures, tp.default_capacity, overrides);
  return convergence_timeline(routes, intact, failed, tp.timeline);
}

// ---------------------------------------------------------------------------
// Report writers. All numeric formatting goes through fmt_real so outputs are
// byte-stable.

inline std::string fmt_real(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

inline std::string port_label(const Topology& t, EdgeId e) {
  return e == kInjectionPort ? std::string("inject") : t.edge_label(e);
}

inline nlohmann::ordered_json trace_to_json(const Topology& t, const Trace& tr) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["outcome"] = to_string(tr.outcome);
  j["path"] = path_string(t, tr);
  auto hops = ordered_json::array();
  for (const Hop& h : tr.hops) {
    hops.push_back({t.name(h.node), port_label(t, h.inport), port_label(t, h.outport)});
  }
  j["hops"] = std::move(hops);
  return j;
}

inline nlohmann::ordered_json loads_to_json(const Topology& t, const std::vector<int>& load) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (std::size_t e = 0; e < load.size(); ++e) {
    if (load[e] != 0) j[t.edge_label(edge_id(e))] = load[e];
  }
  return j;
}

inline std::string traces_json(const Topology& t, const ScenarioReport& r) {
  auto j = nlohmann::ordered_json::array();
  for (const auto& c : r.cases) {
    nlohmann::ordered_json row;
    row["flow"] = c.flow;
    row["failure"] = c.failure;
    row["verdict"] = c.verdict();
    auto traces = nlohmann::ordered_json::array();
    for (const auto& tr : c.traces) traces.push_back(trace_to_json(t, tr));
    row["traces"] = std::move(traces);
    j.push_back(std::move(row));
  }
  return j.dump(2) + "\n";
}

// One JSON object per rule change; suffix starts are printed 1-based.
inline std::string audit_jsonl(const Topology& t, const ScenarioReport& r) {
  std::string out;
  for (const auto& c : r.cases) {
    for (const auto& a : c.audit) {
      nlohmann::ordered_json j;
      j["flow"] = c.flow;
      j["failure"] = c.failure;
      j["pass"] = a.pass;
      j["node"] = t.name(a.change.node);
      j["inport"] = port_label(t, a.change.inport);
      j["old_j"] = a.change.old_start + 1;
      j["new_j"] = a.change.new_start + 1;
      if (a.change.pinned) j["pinned"] = t.edge_label(*a.change.pinned);
      out += j.dump() + "\n";
    }
  }
  return out;
}

inline std::string report_csv(const ScenarioReport& r) {
  std::string out =
      "flow,failure,verdict,hops_before,hops_after,stretch_before,stretch_after,rounds,violations\n";
  for (const auto& c : r.cases) {
    std::string violations;
    for (const auto& v : c.violations) violations += (violations.empty() ? "" : ";") + v;
    out += c.flow + "," + c.failure + "," + c.verdict() + "," + std::to_string(c.hops_before) +
           "," + std::to_string(c.hops_after) + "," +
           (c.stretch_before ? fmt_real(*c.stretch_before) : "") + "," +
           (c.stretch_after ? fmt_real(*c.stretch_after) : "") + "," + std::to_string(c.rounds) +
           "," + violations + "\n";
  }
  return out;
}

inline nlohmann::ordered_json summary_json(const std::string& name, const ScenarioReport& r) {
  nlohmann::ordered_json j;
  j["scenario"] = name;
  j["cases"] = r.cases.size();
  j["frr_failures"] = r.frr_failures;
  j["violations"] = r.violation_count();
  j["violations_by_kind"] = nlohmann::ordered_json::object();
  for (const auto& [kind, n] : r.violations_by_kind) j["violations_by_kind"][kind] = n;
  return j;
}

inline std::string report_json(const Topology& t, const std::string& name,
                               const ScenarioReport& r) {
  nlohmann::ordered_json j = summary_json(name, r);
  auto rows = nlohmann::ordered_json::array();
  for (const auto& c : r.cases) {
    nlohmann::ordered_json row;
    row["flow"] = c.flow;
    row["failure"] = c.failure;
    row["verdict"] = c.verdict();
    row["hops_before"] = c.hops_before;
    row["hops_after"] = c.hops_after;
    row["stretch_before"] = c.stretch_before ? nlohmann::ordered_json(fmt_real(*c.stretch_before))
                                             : nlohmann::ordered_json();
    row["stretch_after"] = c.stretch_after ? nlohmann::ordered_json(fmt_real(*c.stretch_after))
                                           : nlohmann::ordered_json();
    row["rounds"] = c.rounds;
    row["violations"] = c.violations;
    row["load_before"] = loads_to_json(t, c.load_before);
    row["load_after"] = loads_to_json(t, c.load_after);
    rows.push_back(std::move(row));
  }
  j["rows"] = std::move(rows);
  return j.dump(2) + "\n";
}

inline std::string timeline_csv(const Timeline& tl) {
  std::string out = "time,flow,rate,regime\n";
  for (const auto& s : tl.samples) {
    out += fmt_real(s.time) + "," + s.flow + "," + fmt_real(s.rate) + "," + to_string(s.regime) +
           "\n";
  }
  return out;
}

inline constexpr const char* kOutputDirEnv = "FRRSIM_OUTPUT_DIR";

// Command line beats environment beats config; "out" when none is given.
inline std::filesystem::path output_dir(const ScenarioConfig& c,
                                        const std::optional<std::string>& cli_override) {
  if (cli_override && !cli_override->empty()) return *cli_override;
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) return env;
  if (!c.output_dir.empty()) return c.output_dir;
  return "out";
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

inline void write_run_outputs(const std::filesystem::path& dir, const Scenario& s,
                              const ScenarioReport& r) {
  write_file(dir / "traces.json", traces_json(s.topology, r));
  write_file(dir / "audit.jsonl", audit_jsonl(s.topology, r));
  write_file(dir / "report.csv", report_csv(r));
  write_file(dir / "report.json", report_json(s.topology, s.config.name, r));
}

}  // namespace frrsim
