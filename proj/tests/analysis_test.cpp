#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "test_util.hpp"

using namespace frrsim;
using testutil::edge;
using testutil::fail;

namespace {

ForwardingState figure1_partition(const Topology& t) {
  return compile_partition_frr(t, figure1_partition_scheme(t), make_flow(t, "red", "S", "D"));
}

Scenario figure1_scenario() {
  const char* text = R"({
    "name": "figure1",
    "topology": {"kind": "figure1"},
    "flows": [{"id": "red", "source": "S", "destination": "D"},
              {"id": "blue", "source": "S2", "destination": "H"}],
    "scheme": {"kind": "partition", "paths": {
      "red": [["S", "S1", "S2", "S4", "D"], ["S", "S1", "S3", "S4", "D"]],
      "blue": [["S2", "S1", "H"]]}},
    "failures": {"kind": "explicit", "links": [["S2", "S4"]]},
    "throughput": {"default_capacity": 1}
  })";
  return resolve(parse_config(text));
}

// Route set in force for a regime at a given time.
const RouteMap& routes_at(const TimelineRoutes& r, const RouteMap& blackout, const TimelineParams& p,
                          Regime regime, double time) {
  const double te = p.effective_instant();
  const double tc = te + p.control_plane_delay;
  const double ts = te + std::min(p.shortcut_delay, p.control_plane_delay);
  if (time < te) return r.pre_failure;
  if (time >= tc) return r.converged;
  switch (regime) {
    case Regime::kControlPlane: return blackout;
    case Regime::kFrr: return r.frr;
    case Regime::kFrrShortcut: return time < ts ? r.frr : r.shortcut;
  }
  return r.converged;
}

}  // namespace

TEST(Stretch, Examples) {
  const Topology t = figure1();
  const ForwardingState st = figure1_partition(t);
  const FailureSet fs = fail(t, "S2", "S4");
  const FixpointResult r = shortcut_fixpoint(st, t, fs);
  EXPECT_DOUBLE_EQ(stretch(r.initial(), t, fs, st.flow()), 1.5);
  EXPECT_DOUBLE_EQ(stretch(r.final_trace(), t, fs, st.flow()), 1.0);
  EXPECT_DOUBLE_EQ(stretch(route(st, t, {}), t, {}, st.flow()), 1.0);
  EXPECT_THROW(stretch(route(st, t, fail(t, "S4", "D")), t, fail(t, "S4", "D"), st.flow()), Error);
}

TEST(LinkLoads, Examples) {
  const Topology t = figure1();
  const ForwardingState st = figure1_partition(t);
  const Trace looped = route(st, t, fail(t, "S2", "S4"));
  const auto load = link_loads(t, std::span(&looped, 1));
  EXPECT_EQ(load[index(edge(t, "S1", "S2"))], 1);
  EXPECT_EQ(load[index(edge(t, "S2", "S1"))], 1);
  const Trace direct = shortcut_fixpoint(st, t, fail(t, "S2", "S4")).final_trace();
  EXPECT_EQ(link_loads(t, std::span(&direct, 1))[index(edge(t, "S1", "S2"))], 0);
  const auto none = link_loads(t, std::span<const Trace>{});
  EXPECT_EQ(none, std::vector<int>(t.edge_count(), 0));
}

TEST(MaxMin, Examples) {
  const std::vector<double> one{1.0};
  auto shared = maxmin_throughput({{"a", {edge_id(0)}}, {"b", {edge_id(0)}}}, one);
  EXPECT_NEAR(shared["a"], 0.5, 1e-12);
  EXPECT_NEAR(shared["b"], 0.5, 1e-12);

  const std::vector<double> two{1.0, 1.0};
  auto disjoint = maxmin_throughput({{"a", {edge_id(0)}}, {"b", {edge_id(1)}}}, two);
  EXPECT_NEAR(disjoint["a"], 1.0, 1e-12);
  EXPECT_NEAR(disjoint["b"], 1.0, 1e-12);

  auto three = maxmin_throughput(
      {{"a", {edge_id(0)}}, {"b", {edge_id(0)}}, {"c", {edge_id(0), edge_id(1)}}}, two);
  for (const char* f : {"a", "b", "c"}) EXPECT_NEAR(three[f], 1.0 / 3.0, 1e-12);

  EXPECT_NEAR(maxmin_throughput({{"a", {}}}, one)["a"], 0.0, 0.0);
  const std::vector<double> dead{0.0};
  EXPECT_THROW(maxmin_throughput({{"a", {edge_id(0)}}}, dead), Error);
}

TEST(MaxMin, AgreesWithReferenceAndIsFair) {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    const int edges = 2 + static_cast<int>(rng() % 5);
    std::vector<double> cap;
    for (int e = 0; e < edges; ++e) cap.push_back(0.25 * static_cast<double>(1 + rng() % 6));
    RouteMap routes;
    std::map<std::string, std::vector<int>> ref_routes;
    const int flows = 1 + static_cast<int>(rng() % 5);
    for (int f = 0; f < flows; ++f) {
      const std::string id = "f" + std::to_string(f);
      const int len = 1 + static_cast<int>(rng() % 3);
      for (int i = 0; i < len; ++i) {
        const int e = static_cast<int>(rng() % static_cast<unsigned>(edges));
        routes[id].push_back(edge_id(static_cast<std::size_t>(e)));
        ref_routes[id].push_back(e);
      }
    }
    const auto got = maxmin_throughput(routes, cap);
    const auto ref = oracle::water_fill(ref_routes, cap);
    std::vector<double> used(cap.size(), 0.0);
    for (const auto& [id, r] : routes) {
      EXPECT_NEAR(got.at(id), ref.at(id), 1e-9);
      for (EdgeId e : r) used[index(e)] += got.at(id);
    }
    for (std::size_t e = 0; e < cap.size(); ++e) EXPECT_LE(used[e], cap[e] + 1e-9);
    // Every flow below demand has a saturated link on which nobody gets more.
    for (const auto& [id, r] : routes) {
      if (got.at(id) >= 1.0 - 1e-9) continue;
      bool bottleneck = false;
      for (EdgeId e : r) {
        if (used[index(e)] < cap[index(e)] - 1e-9) continue;
        bool is_max = true;
        for (const auto& [other, ro] : routes) {
          if (std::find(ro.begin(), ro.end(), e) != ro.end() && got.at(other) > got.at(id) + 1e-9) {
            is_max = false;
          }
        }
        bottleneck = bottleneck || is_max;
      }
      EXPECT_TRUE(bottleneck) << "trial " << trial << " flow " << id;
    }
  }
}

TEST(Timeline, Figure1Regimes) {
  const Scenario s = figure1_scenario();
  const Timeline tl = run_timeline(s);
  EXPECT_NEAR(tl.zero_rate_duration(Regime::kControlPlane, "red"), 2.0, 1e-9);
  EXPECT_NEAR(tl.zero_rate_duration(Regime::kFrrShortcut, "red"), 0.0, 1e-9);
  EXPECT_NEAR(tl.interim_rate(Regime::kFrr, "red"), 0.5, 1e-9);
  EXPECT_NEAR(tl.interim_rate(Regime::kFrr, "blue"), 0.5, 1e-9);
  EXPECT_NEAR(tl.interim_rate(Regime::kFrrShortcut, "blue"), 1.0, 1e-9);
  EXPECT_NEAR(tl.interim_rate(Regime::kFrrShortcut, "red"), 1.0, 1e-9);
  EXPECT_NEAR(tl.rate_at(Regime::kControlPlane, "red", 1.0), 1.0, 1e-9);
}

TEST(Timeline, DelaySweepSetsZeroWindow) {
  for (double delay : {0.5, 1.0, 2.0}) {
    Scenario s = figure1_scenario();
    s.config.throughput->timeline.control_plane_delay = delay;
    const Timeline tl = run_timeline(s);
    EXPECT_NEAR(tl.zero_rate_duration(Regime::kControlPlane, "red"), delay, 1e-9);
  }
}

TEST(Timeline, ZeroControlPlaneDelayCollapsesRegimes) {
  Scenario s = figure1_scenario();
  s.config.throughput->timeline.control_plane_delay = 0.0;
  const Timeline tl = run_timeline(s);
  std::map<std::pair<double, std::string>, std::set<double>> by_time;
  for (const auto& smp : tl.samples) {
    if (smp.time >= tl.params.effective_instant()) by_time[{smp.time, smp.flow}].insert(smp.rate);
  }
  for (const auto& [key, rates] : by_time) EXPECT_EQ(rates.size(), 1u) << key.first;
}

TEST(Timeline, InstantShortcutMatchesConvergedRates) {
  Scenario s = figure1_scenario();
  s.config.throughput->timeline.shortcut_delay = 0.0;
  const Timeline tl = run_timeline(s);
  const double after = tl.params.effective_instant() + tl.params.control_plane_delay + 1.0;
  for (const auto& smp : tl.samples) {
    if (smp.regime != Regime::kFrrShortcut || smp.time < tl.params.effective_instant()) continue;
    EXPECT_NEAR(smp.rate, tl.rate_at(Regime::kControlPlane, smp.flow, after), 1e-12) << smp.time;
  }
}

TEST(Timeline, ConservationAtEverySample) {
  const Scenario s = figure1_scenario();
  const FailureSet failures = explicit_failures(s);
  SchemeCompiler c(s.topology, s.config.scheme);
  const TimelineRoutes routes = build_timeline_routes(s.topology, c, s.flows, failures);
  RouteMap blackout = routes.pre_failure;
  for (const auto& id : routes.affected) blackout[id].clear();
  const auto intact = edge_capacities(s.topology, {}, 1.0);
  const auto failed = edge_capacities(s.topology, failures, 1.0);
  for (double delay : {0.0, 0.5, 2.0}) {
    TimelineParams p;
    p.control_plane_delay = delay;
    const Timeline tl = convergence_timeline(routes, intact, failed, p);
    std::map<std::pair<int, double>, std::vector<double>> load;
    for (const auto& smp : tl.samples) {
      auto& l = load[{static_cast<int>(smp.regime), smp.time}];
      l.resize(s.topology.edge_count(), 0.0);
      for (EdgeId e : routes_at(routes, blackout, p, smp.regime, smp.time).at(smp.flow)) {
        l[index(e)] += smp.rate;
      }
    }
    for (const auto& [key, l] : load) {
      const auto& cap = key.second < p.effective_instant() ? intact : failed;
      for (std::size_t e = 0; e < l.size(); ++e) EXPECT_LE(l[e], cap[e] + 1e-9);
    }
  }
}

TEST(Timeline, RejectsBadParameters) {
  const Scenario s = figure1_scenario();
  TimelineParams p;
  p.control_plane_delay = -1.0;
  EXPECT_THROW(convergence_timeline({}, {}, {}, p), Error);
  p = {};
  p.sample_step = 0.0;
  EXPECT_THROW(convergence_timeline({}, {}, {}, p), Error);
  Scenario no_tp = s;
  no_tp.config.throughput.reset();
  EXPECT_THROW(run_timeline(no_tp), Error);
}

TEST(Verifier, Figure1Case) {
  const Topology t = figure1();
  SchemeCompiler c(t, {SchemeKind::kPartition, std::nullopt,
                       {{"red", {{"S", "S1", "S2", "S4", "D"}, {"S", "S1", "S3", "S4", "D"}}}}});
  const std::vector<Flow> flows{make_flow(t, "red", "S", "D")};
  const ScenarioReport r =
      verify_theorem1(t, c, flows, {FailureSweepKind::kExplicit, fail(t, "S2", "S4")});
  ASSERT_EQ(r.cases.size(), 1u);
  const CaseResult& cr = r.cases[0];
  EXPECT_EQ(cr.verdict(), "delivered");
  EXPECT_TRUE(cr.violations.empty());
  EXPECT_EQ(cr.rounds, 1);
  EXPECT_EQ(cr.hops_before, 6u);
  EXPECT_EQ(cr.hops_after, 4u);
}

TEST(Verifier, CompleteFiveAllLinks) {
  const Topology t = complete_graph(5);
  SchemeCompiler c(t, {SchemeKind::kArborescence, 4, {}});
  const auto flows = all_pair_flows(t);
  const ScenarioReport r = verify_theorem1(t, c, flows, {FailureSweepKind::kAllLinks, {}});
  EXPECT_EQ(r.cases.size(), 200u);
  EXPECT_EQ(r.violation_count(), 0u);
  EXPECT_EQ(r.frr_failures, 0u);
}

TEST(Verifier, FrrFailureIsExcluded) {
  const Topology t = testutil::line(2);
  SchemeCompiler c(t, {SchemeKind::kArborescence, std::nullopt, {}});
  const std::vector<Flow> flows{make_flow(t, "f", "a", "b")};
  const ScenarioReport r = verify_theorem1(t, c, flows, {FailureSweepKind::kAllLinks, {}});
  EXPECT_EQ(r.frr_failures, 1u);
  EXPECT_EQ(r.violation_count(), 0u);
  EXPECT_EQ(r.cases[0].verdict(), "frr_dropped");
}

TEST(Verifier, SinglePathPartitionFailuresAreFrrFailures) {
  const Topology t = figure1();
  SchemeCompiler c(t, {SchemeKind::kPartition, 1, {}});
  const std::vector<Flow> flows{make_flow(t, "red", "S", "D")};
  const ScenarioReport r = verify_theorem1(t, c, flows, {FailureSweepKind::kAllLinks, {}});
  EXPECT_EQ(r.violation_count(), 0u);
  EXPECT_EQ(r.frr_failures, 4u);  // the four links of P_1
}

TEST(Verifier, CompileErrorsBecomeViolations) {
  const Topology t = figure1();
  SchemeCompiler c(t, {SchemeKind::kArborescence, 2, {}});
  const std::vector<Flow> flows{make_flow(t, "red", "S", "D")};
  const ScenarioReport r = verify_theorem1(t, c, flows, {FailureSweepKind::kNone, {}});
  EXPECT_EQ(r.violations_by_kind.at(violation::kException), 1u);
}

TEST(Verifier, NodeSweepSkipsEndpoints) {
  const Topology t = complete_graph(5);
  const Flow f = make_flow(t, "f", "0", "4");
  const auto sets = enumerate_failures({FailureSweepKind::kAllNodes, {}}, t, f);
  EXPECT_EQ(sets.size(), 3u);
  for (const auto& fs : sets) {
    EXPECT_FALSE(fs.node_failed(f.source));
    EXPECT_FALSE(fs.node_failed(f.destination));
  }
}

// Exhaustive guarantees for every scheme on the small families: delivery,
// simplicity, sub-path, one round, no added load, strictly less load when
// the walk looped, fewer hops.
TEST(Verifier, AllSchemesOnSmallFamilies) {
  for (const auto& fam : testutil::small_families()) {
    for (auto kind : {SchemeKind::kArborescence, SchemeKind::kPartition, SchemeKind::kGreedy}) {
      SchemeCompiler c(fam.topo, {kind, std::nullopt, {}});
      const auto flows = all_pair_flows(fam.topo);
      for (auto sweep : {FailureSweepKind::kAllLinks, FailureSweepKind::kAllNodes}) {
        const ScenarioReport r = verify_theorem1(fam.topo, c, flows, {sweep, {}});
        EXPECT_EQ(r.violation_count(), 0u) << fam.name << " scheme " << static_cast<int>(kind);
        for (const auto& cr : r.cases) {
          if (!cr.frr_delivered) continue;
          EXPECT_LE(cr.hops_after, cr.hops_before);
          if (cr.looped) {
            EXPECT_LT(cr.hops_after, cr.hops_before);
          }
          if (cr.stretch_after) {
            EXPECT_GE(*cr.stretch_after, 1.0);
          }
        }
      }
    }
  }
}
