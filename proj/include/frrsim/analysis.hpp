#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "frrsim/forwarding.hpp"
#include "frrsim/scheme.hpp"
#include "frrsim/shortcut.hpp"
#include "frrsim/topology.hpp"

namespace frrsim {

// ---------------------------------------------------------------------------
// Route metrics.

inline double stretch(const Trace& tr, const Topology& t, const FailureSet& failures,
                      const Flow& f) {
  if (!tr.delivered()) throw Error("stretch: trace was not delivered");
  const auto best = shortest_path_length(t, failures, f.source, f.destination);
  if (!best) throw Error("stretch: destination unreachable in residual graph");
  if (*best == 0) return 1.0;
  return static_cast<double>(tr.hops.size()) / static_cast<double>(*best);
}

// Traversals per directed edge, indexed by EdgeId.
inline std::vector<int> link_loads(const Topology& t, std::span<const Trace> traces) {
  std::vector<int> load(t.edge_count(), 0);
  for (const Trace& tr : traces) {
    for (const Hop& h : tr.hops) ++load[index(h.outport)];
  }
  return load;
}

// ---------------------------------------------------------------------------
// Failure enumeration.

enum class FailureSweepKind { kNone, kExplicit, kAllLinks, kAllNodes };

struct FailureSweep {
  FailureSweepKind kind = FailureSweepKind::kAllLinks;
  FailureSet explicit_set;
};

// Node sweeps skip the flow's own endpoints.
inline std::vector<FailureSet> enumerate_failures(const FailureSweep& sweep, const Topology& t,
                                                  const Flow& f) {
  std::vector<FailureSet> out;
  switch (sweep.kind) {
    case FailureSweepKind::kNone: out.emplace_back(); break;
    case FailureSweepKind::kExplicit: out.push_back(sweep.explicit_set); break;
    case FailureSweepKind::kAllLinks:
      for (std::size_t l = 0; l < t.link_count(); ++l) out.push_back(FailureSet::link(link_id(l)));
      break;
    case FailureSweepKind::kAllNodes:
      for (std::size_t v = 0; v < t.node_count(); ++v) {
        if (node_id(v) == f.source || node_id(v) == f.destination) continue;
        out.push_back(FailureSet::node(node_id(v)));
      }
      break;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Exhaustive loop-freedom check.

namespace violation {
inline constexpr const char* kNotDelivered = "not_delivered";
inline constexpr const char* kNotSimple = "not_simple";
inline constexpr const char* kNotSubpath = "not_subpath";
inline constexpr const char* kRounds = "rounds";
inline constexpr const char* kLateTrigger = "late_trigger";
inline constexpr const char* kLoadIncrease = "load_increase";
inline constexpr const char* kNoLoadReduction = "no_load_reduction";
inline constexpr const char* kInFlight = "in_flight";
inline constexpr const char* kException = "exception";
}  // namespace violation

struct CaseResult {
  std::string flow;
  std::string failure;
  // False when plain FRR already loses the packet; such cases fall outside
  // the guarantee and carry no violations.
  bool frr_delivered = false;
  Outcome frr_outcome = Outcome::kDropped;
  Outcome final_outcome = Outcome::kDropped;
  std::size_t hops_before = 0;
  std::size_t hops_after = 0;
  std::optional<double> stretch_before;
  std::optional<double> stretch_after;
  int rounds = 0;
  int truncation_passes = 0;
  bool looped = false;
  std::vector<std::string> violations;
  std::vector<Trace> traces;
  std::vector<AuditedChange> audit;
  std::vector<int> load_before;
  std::vector<int> load_after;

  // delivered | dropped | loop for the final walk; frr_<outcome> when plain
  // FRR already failed.
  std::string verdict() const {
    if (!frr_delivered) return std::string("frr_") + to_string(frr_outcome);
    return to_string(final_outcome);
  }
};

struct ScenarioReport {
  std::vector<CaseResult> cases;
  std::size_t frr_failures = 0;
  std::map<std::string, std::size_t> violations_by_kind;

  std::size_t violation_count() const {
    std::size_t n = 0;
    for (const auto& [kind, count] : violations_by_kind) n += count;
    return n;
  }
};

// Runs the ShortCut fixpoint for one flow under one failure set and checks
// every guarantee against the plain FRR walk. `baseline` is the failure-free
// walk, used to replay packets that were in flight when the failure hit.
inline CaseResult evaluate_case(const Topology& t, const ForwardingState& state,
                                const Trace& baseline, const FailureSet& failures) {
  const Flow& f = state.flow();
  CaseResult c;
  c.flow = f.id;
  c.failure = failures.label(t);
  FixpointResult fp = shortcut_fixpoint(state, t, failures);
  const Trace& before = fp.initial();
  const Trace& after = fp.final_trace();
  c.frr_outcome = before.outcome;
  c.final_outcome = after.outcome;
  c.frr_delivered = before.delivered();
  c.hops_before = before.hops.size();
  c.hops_after = after.hops.size();
  c.rounds = fp.rounds;
  c.truncation_passes = fp.truncation_passes;
  c.looped = !trace_stats(before).looped_nodes.empty();
  if (before.delivered()) c.stretch_before = stretch(before, t, failures, f);
  if (after.delivered()) c.stretch_after = stretch(after, t, failures, f);
  c.load_before = link_loads(t, std::span(&before, 1));
  c.load_after = link_loads(t, std::span(&after, 1));

  if (c.frr_delivered) {
    auto flag = [&c](const char* kind) { c.violations.emplace_back(kind); };
    if (!after.delivered()) flag(violation::kNotDelivered);
    if (after.delivered() && !is_simple_path(after)) flag(violation::kNotSimple);
    const auto used_before = trace_stats(before).directed_edges_used;
    for (const Hop& h : after.hops) {
      if (!used_before.contains(h.outport)) {
        flag(violation::kNotSubpath);
        break;
      }
    }
    if (c.rounds != (c.looped ? 1 : 0)) flag(violation::kRounds);
    if (c.truncation_passes > 1) flag(violation::kLateTrigger);
    bool increased = false;
    bool reduced = false;
    for (std::size_t e = 0; e < t.edge_count(); ++e) {
      increased = increased || c.load_after[e] > c.load_before[e];
      reduced = reduced || c.load_after[e] < c.load_before[e];
    }
    if (increased) flag(violation::kLoadIncrease);
    if (c.looped && !reduced) flag(violation::kNoLoadReduction);

    // Packets already on the failure-free path: a fresh injection at u and an
    // arrival on the port they were really using must still be delivered,
    // wherever plain FRR delivered them.
    bool in_flight_ok = true;
    auto check = [&](NodeId u, EdgeId in) {
      if (route(state, t, failures, u, in).delivered()) {
        in_flight_ok = in_flight_ok && route(fp.final_state, t, failures, u, in).delivered();
      }
    };
    for (const Hop& h : baseline.hops) {
      if (failures.node_failed(h.node)) continue;
      check(h.node, kInjectionPort);
      if (h.inport != kInjectionPort && !failures.edge_failed(t, h.inport)) check(h.node, h.inport);
    }
    if (!in_flight_ok) flag(violation::kInFlight);
  }
  c.traces = std::move(fp.traces);
  c.audit = std::move(fp.audit);
  return c;
}

inline void tally(ScenarioReport& report, CaseResult c) {
  if (!c.frr_delivered) ++report.frr_failures;
  for (const auto& v : c.violations) ++report.violations_by_kind[v];
  report.cases.push_back(std::move(c));
}

// Every flow against every enumerated failure. Exceptions while compiling or
// evaluating are recorded as violations, never propagated.
inline ScenarioReport verify_theorem1(const Topology& t, SchemeCompiler& scheme,
                                      std::span<const Flow> flows, const FailureSweep& sweep) {
  ScenarioReport report;
  for (const Flow& f : flows) {
    std::optional<ForwardingState> state;
    Trace baseline;
    try {
      state = scheme.compile(f);
      baseline = route(*state, t, FailureSet{});
    } catch (const std::exception& e) {
      CaseResult c;
      c.flow = f.id;
      c.failure = "compile";
      c.frr_delivered = true;
      c.violations.emplace_back(violation::kException);
      tally(report, std::move(c));
      continue;
    }
    for (const FailureSet& failures : enumerate_failures(sweep, t, f)) {
      try {
        tally(report, evaluate_case(t, *state, baseline, failures));
      } catch (const std::exception& e) {
        CaseResult c;
        c.flow = f.id;
        c.failure = failures.label(t);
        c.frr_delivered = true;
        c.violations.emplace_back(violation::kException);
        tally(report, std::move(c));
      }
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Fluid throughput model.

using RouteMap = std::map<std::string, std::vector<EdgeId>>;

// Per directed edge capacity, links under `failures` get zero.
inline std::vector<double> edge_capacities(const Topology& t, const FailureSet& failures,
                                           double default_rate,
                                           const std::map<LinkId, double>& overrides = {}) {
  std::vector<double> cap(t.edge_count(), default_rate);
  for (const auto& [l, rate] : overrides) {
    cap[2 * index(l)] = rate;
    cap[2 * index(l) + 1] = rate;
  }
  for (std::size_t e = 0; e < t.edge_count(); ++e) {
    if (failures.edge_failed(t, edge_id(e))) cap[e] = 0.0;
  }
  return cap;
}

// Progressive filling: all unfrozen flows grow at the same rate until a link
// saturates or a flow meets its demand; flows on saturated links freeze. A
// flow crossing an edge k times consumes k times its rate there. Flows with
// an empty route get zero.
inline std::map<std::string, double> maxmin_throughput(const RouteMap& routes,
                                                       std::span<const double> capacity,
                                                       double demand = 1.0) {
  constexpr double kEps = 1e-12;
  std::map<std::string, double> rate;
  std::map<std::string, std::map<std::size_t, int>> usage;
  for (const auto& [id, edges] : routes) {
    rate[id] = 0.0;
    for (EdgeId e : edges) {
      if (index(e) >= capacity.size()) throw Error("maxmin: route edge without capacity");
      if (capacity[index(e)] <= 0.0) {
        throw Error("maxmin: flow '" + id + "' routed over a zero-capacity link");
      }
      ++usage[id][index(e)];
    }
  }
  std::vector<double> remaining(capacity.begin(), capacity.end());
  std::set<std::string> active;
  for (const auto& [id, edges] : routes) {
    if (!edges.empty()) active.insert(id);
  }
  while (!active.empty()) {
    std::map<std::size_t, int> weight;
    for (const auto& id : active) {
      for (const auto& [e, k] : usage[id]) weight[e] += k;
    }
    double step = std::numeric_limits<double>::infinity();
    for (const auto& id : active) step = std::min(step, demand - rate[id]);
    for (const auto& [e, w] : weight) step = std::min(step, remaining[e] / w);
    step = std::max(step, 0.0);
    for (const auto& id : active) rate[id] += step;
    for (const auto& [e, w] : weight) remaining[e] -= step * w;
    std::set<std::string> frozen;
    for (const auto& id : active) {
      bool done = rate[id] >= demand - kEps;
      for (const auto& [e, k] : usage[id]) {
        done = done || remaining[e] <= kEps * std::max(1.0, capacity[e]);
      }
      if (done) frozen.insert(id);
    }
    for (const auto& id : frozen) active.erase(id);
  }
  return rate;
}

// ---------------------------------------------------------------------------
// Convergence timeline.

enum class Regime { kControlPlane, kFrr, kFrrShortcut };

inline const char* to_string(Regime r) {
  switch (r) {
    case Regime::kControlPlane: return "control_plane";
    case Regime::kFrr: return "frr";
    case Regime::kFrrShortcut: return "frr_shortcut";
  }
  return "?";
}

inline constexpr Regime kAllRegimes[] = {Regime::kControlPlane, Regime::kFrr,
                                         Regime::kFrrShortcut};

struct TimelineParams {
  double failure_instant = 0.0;
  double effect_delay = 2.0;  // failure is fully in effect this long after it occurs
  double control_plane_delay = 2.0;
  double shortcut_delay = 1e-3;
  double sample_step = 0.1;
  double horizon = 8.0;

  double effective_instant() const { return failure_instant + effect_delay; }

  bool operator==(const TimelineParams&) const = default;
};

// Routes per flow in each phase. An empty route means no connectivity.
struct TimelineRoutes {
  RouteMap pre_failure;
  RouteMap frr;
  RouteMap shortcut;
  RouteMap converged;
  std::set<std::string> affected;
};

struct RateSegment {
  Regime regime;
  double begin;
  double end;
  std::map<std::string, double> rates;
};

struct TimelineSample {
  double time;
  std::string flow;
  double rate;
  Regime regime;
};

struct Timeline {
  TimelineParams params;
  std::vector<RateSegment> segments;
  std::vector<TimelineSample> samples;

  double rate_at(Regime r, const std::string& flow, double time) const {
    for (const auto& s : segments) {
      if (s.regime == r && s.begin <= time && time < s.end) return s.rates.at(flow);
    }
    for (auto it = segments.rbegin(); it != segments.rend(); ++it) {
      if (it->regime == r && time >= it->end) return it->rates.at(flow);
    }
    throw Error("timeline: time outside modelled range");
  }

  // Total time the flow spends at zero rate after the failure takes effect.
  double zero_rate_duration(Regime r, const std::string& flow) const {
    double total = 0.0;
    for (const auto& s : segments) {
      if (s.regime == r && s.end > params.effective_instant() && s.rates.at(flow) <= 0.0) {
        total += s.end - std::max(s.begin, params.effective_instant());
      }
    }
    return total;
  }

  // Rate held once the data plane has settled, just before the control plane
  // takes over. Falls back to the converged rate when there is no such window.
  double interim_rate(Regime r, const std::string& flow) const {
    const double te = params.effective_instant();
    const double settled = te + std::min(params.shortcut_delay, params.control_plane_delay);
    const double takeover = te + params.control_plane_delay;
    if (takeover <= settled) return rate_at(r, flow, takeover);
    return rate_at(r, flow, 0.5 * (settled + takeover));
  }
};

inline Timeline convergence_timeline(const TimelineRoutes& routes,
                                     std::span<const double> intact_capacity,
                                     std::span<const double> failed_capacity,
                                     const TimelineParams& p) {
  if (p.effect_delay < 0 || p.control_plane_delay < 0 || p.shortcut_delay < 0) {
    throw Error("timeline: delays must be non-negative");
  }
  if (p.sample_step <= 0 || p.horizon < 0) throw Error("timeline: bad sampling parameters");
  const double te = p.effective_instant();
  const double tc = te + p.control_plane_delay;
  const double ts = te + std::min(p.shortcut_delay, p.control_plane_delay);
  const double end = std::max(p.horizon, tc) + p.sample_step;

  RouteMap blackout = routes.pre_failure;
  for (const auto& id : routes.affected) blackout[id].clear();

  Timeline tl;
  tl.params = p;
  auto add = [&](Regime r, double b, double e, const RouteMap& rm, std::span<const double> cap) {
    if (e <= b) return;
    tl.segments.push_back({r, b, e, maxmin_throughput(rm, cap)});
  };
  const double t0 = std::min(0.0, p.failure_instant);
  for (Regime r : kAllRegimes) {
    add(r, t0, te, routes.pre_failure, intact_capacity);
    switch (r) {
      case Regime::kControlPlane: add(r, te, tc, blackout, failed_capacity); break;
      case Regime::kFrr: add(r, te, tc, routes.frr, failed_capacity); break;
      case Regime::kFrrShortcut:
        add(r, te, ts, routes.frr, failed_capacity);
        add(r, ts, tc, routes.shortcut, failed_capacity);
        break;
    }
    add(r, tc, end, routes.converged, failed_capacity);
  }
  const auto steps = static_cast<long>(std::floor(p.horizon / p.sample_step + 1e-9));
  for (Regime r : kAllRegimes) {
    for (long k = 0; k <= steps; ++k) {
      const double time = std::round((t0 + static_cast<double>(k) * p.sample_step) * 1e9) / 1e9;
      for (const auto& [id, unused] : routes.pre_failure) {
        tl.samples.push_back({time, id, tl.rate_at(r, id, time), r});
      }
    }
  }
  return tl;
}

// Routes for each phase: the failure-free walk, the plain FRR walk, the
// ShortCut fixpoint walk, and the control plane's shortest residual path
// (flows untouched by the failure keep their route).
inline TimelineRoutes build_timeline_routes(const Topology& t, SchemeCompiler& scheme,
                                            std::span<const Flow> flows,
                                            const FailureSet& failures) {
  TimelineRoutes r;
  for (const Flow& f : flows) {
    const ForwardingState state = scheme.compile(f);
    const Trace pre = route(state, t, FailureSet{});
    if (!pre.delivered()) throw Error("timeline: flow '" + f.id + "' undeliverable without failures");
    r.pre_failure[f.id] = pre.edges();
    const bool hit = std::any_of(pre.hops.begin(), pre.hops.end(), [&](const Hop& h) {
      return failures.edge_failed(t, h.outport);
    });
    if (hit) r.affected.insert(f.id);
    const FixpointResult fp = shortcut_fixpoint(state, t, failures);
    r.frr[f.id] = fp.initial().delivered() ? fp.initial().edges() : std::vector<EdgeId>{};
    r.shortcut[f.id] = fp.final_trace().delivered() ? fp.final_trace().edges() : std::vector<EdgeId>{};
    if (!hit) {
      r.converged[f.id] = r.pre_failure[f.id];
    } else if (auto path = shortest_path(t, failures, f.source, f.destination)) {
      std::vector<EdgeId> edges;
      for (std::size_t i = 0; i + 1 < path->size(); ++i) {
        edges.push_back(*t.edge_between((*path)[i], (*path)[i + 1]));
      }
      r.converged[f.id] = std::move(edges);
    } else {
      r.converged[f.id] = {};
    }
  }
  return r;
}

}  // namespace frrsim
