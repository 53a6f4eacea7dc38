// frrsim: run, verify and plot ShortCut scenarios from a JSON config.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "frrsim/frrsim.hpp"

namespace {

struct Overrides {
  std::vector<std::string> fail_links;
  std::vector<std::string> fail_nodes;
  bool sweep_links = false;
  bool sweep_nodes = false;
  std::string scheme;
  std::optional<int> k;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<double> control_plane_delay;
};

std::pair<std::string, std::string> split_link(const std::string& s) {
  const auto dash = s.find('-');
  if (dash == std::string::npos || dash == 0 || dash + 1 == s.size()) {
    throw frrsim::ConfigError("--fail expects A-B, got '" + s + "'");
  }
  return {s.substr(0, dash), s.substr(dash + 1)};
}

void add_overrides(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--fail", o.fail_links, "Fail link A-B (repeatable); replaces the config's failures");
  cmd->add_option("--fail-node", o.fail_nodes, "Fail node (repeatable)");
  cmd->add_flag("--all-links", o.sweep_links, "Sweep every single link failure");
  cmd->add_flag("--all-nodes", o.sweep_nodes, "Sweep every single node failure");
  cmd->add_option("--scheme", o.scheme, "FRR scheme")
      ->check(CLI::IsMember({"arborescence", "partition", "greedy"}));
  cmd->add_option("--k", o.k, "Arborescence or path count")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", o.seed, "Seed for random topologies");
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_option("--control-plane-delay", o.control_plane_delay, "Seconds")
      ->check(CLI::NonNegativeNumber);
}

frrsim::ScenarioConfig apply(frrsim::ScenarioConfig c, const Overrides& o) {
  using frrsim::FailureKind;
  if (!o.fail_links.empty() || !o.fail_nodes.empty()) {
    c.failures = {FailureKind::kExplicit, {}, o.fail_nodes};
    for (const auto& l : o.fail_links) c.failures.links.push_back(split_link(l));
  }
  if (o.sweep_links) c.failures = {FailureKind::kAllLinks, {}, {}};
  if (o.sweep_nodes) c.failures = {FailureKind::kAllNodes, {}, {}};
  if (!o.scheme.empty()) {
    const auto kind = nlohmann::json(o.scheme).get<frrsim::SchemeKind>();
    if (kind != c.scheme.kind) c.scheme = {kind, std::nullopt, {}};
  }
  if (o.k) c.scheme.k = *o.k;
  if (o.seed) {
    c.seed = *o.seed;
    if (c.topology.kind == frrsim::TopologyKind::kRandom) c.topology.seed = *o.seed;
  }
  if (o.control_plane_delay) {
    if (!c.throughput) c.throughput.emplace();
    c.throughput->timeline.control_plane_delay = *o.control_plane_delay;
  }
  return c;
}

frrsim::Scenario load(const std::string& path, const Overrides& o) {
  auto config = apply(frrsim::load_config(path), o);
  return frrsim::resolve(config, std::filesystem::path(path).parent_path());
}

std::optional<std::string> out_override(const Overrides& o) {
  if (o.out.empty()) return std::nullopt;
  return o.out;
}

int cmd_run(const std::string& path, const Overrides& o) {
  const auto s = load(path, o);
  const auto report = frrsim::run_verifier(s);
  const auto dir = frrsim::output_dir(s.config, out_override(o));
  frrsim::write_run_outputs(dir, s, report);
  for (const auto& c : report.cases) {
    std::printf("%-12s %-16s %-10s hops %zu -> %zu  rounds %d%s\n", c.flow.c_str(),
                c.failure.c_str(), c.verdict().c_str(), c.hops_before, c.hops_after, c.rounds,
                c.violations.empty() ? "" : "  VIOLATION");
  }
  std::printf("cases %zu  frr_failures %zu  violations %zu  -> %s\n", report.cases.size(),
              report.frr_failures, report.violation_count(), dir.string().c_str());
  return report.violation_count() == 0 ? 0 : 1;
}

int cmd_verify(const std::string& path, const Overrides& o) {
  const auto s = load(path, o);
  const auto report = frrsim::run_verifier(s);
  std::cout << frrsim::summary_json(s.config.name, report).dump(2) << "\n";
  return report.violation_count() == 0 ? 0 : 1;
}

int cmd_timeline(const std::string& path, const Overrides& o) {
  const auto s = load(path, o);
  const auto tl = frrsim::run_timeline(s);
  const auto dir = frrsim::output_dir(s.config, out_override(o));
  frrsim::write_file(dir / "timeline.csv", frrsim::timeline_csv(tl));
  for (const auto& f : s.flows) {
    for (auto r : frrsim::kAllRegimes) {
      std::printf("%-12s %-14s interim %s  zero-rate %s s\n", f.id.c_str(), frrsim::to_string(r),
                  frrsim::fmt_real(tl.interim_rate(r, f.id)).c_str(),
                  frrsim::fmt_real(tl.zero_rate_duration(r, f.id)).c_str());
    }
  }
  std::printf("-> %s\n", (dir / "timeline.csv").string().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fast-reroute simulator with ShortCut loop removal"};
  app.require_subcommand(1);

  std::string config;
  Overrides o;
  for (auto [name, help] : {std::pair{"run", "Run a scenario and write traces, audit and report"},
                            std::pair{"verify", "Check the loop-freedom guarantees; print a summary"},
                            std::pair{"timeline", "Write the three-regime throughput timeline"}}) {
    auto* cmd = app.add_subcommand(name, help);
    cmd->add_option("config", config, "Scenario JSON")->required()->check(CLI::ExistingFile);
    add_overrides(cmd, o);
  }

  frrsim::TopologyDescriptor desc;
  std::string out_file;
  auto* gen = app.add_subcommand("generate", "Emit a topology file");
  gen->add_option("kind", desc.kind, "figure1|complete|torus|hypercube|random")
      ->required()
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, frrsim::TopologyKind>{
              {"figure1", frrsim::TopologyKind::kFigure1},
              {"complete", frrsim::TopologyKind::kComplete},
              {"torus", frrsim::TopologyKind::kTorus},
              {"hypercube", frrsim::TopologyKind::kHypercube},
              {"random", frrsim::TopologyKind::kRandom}}));
  gen->add_option("--n", desc.n, "Node count (complete, random)");
  gen->add_option("--rows", desc.rows, "Torus rows");
  gen->add_option("--cols", desc.cols, "Torus columns");
  gen->add_option("--dim", desc.dim, "Hypercube dimension");
  gen->add_option("--p", desc.p, "Link probability (random)");
  gen->add_option("--seed", desc.seed, "Seed (random)");
  gen->add_option("--min-connectivity", desc.min_edge_connectivity, "Required edge connectivity");
  gen->add_option("-o,--output", out_file, "Write here instead of stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("run")) return cmd_run(config, o);
    if (app.got_subcommand("verify")) return cmd_verify(config, o);
    if (app.got_subcommand("timeline")) return cmd_timeline(config, o);
    const auto text = frrsim::topology_to_json(frrsim::build_topology(desc)).dump(2) + "\n";
    if (out_file.empty()) {
      std::cout << text;
    } else {
      frrsim::write_file(out_file, text);
    }
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "frrsim: %s\n", e.what());
    return 2;
  }
}
