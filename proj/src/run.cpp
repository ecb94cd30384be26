#include "jtight/run.hpp"

#include <istream>
#include <ostream>

#include <json.hpp>

namespace jtight {

using nlohmann::json;

std::string_view trace_level_name(TraceLevel level) {
  switch (level) {
    case TraceLevel::Summary: return "summary";
    case TraceLevel::Structural: return "structural";
    case TraceLevel::Full: return "full";
  }
  return "summary";
}

std::optional<TraceLevel> parse_trace_level(std::string_view name) {
  for (TraceLevel l : {TraceLevel::Summary, TraceLevel::Structural, TraceLevel::Full}) {
    if (trace_level_name(l) == name) return l;
  }
  return std::nullopt;
}

RunTrace run(EdgeSource& h, int j, std::uint64_t seed, const StoppingConfig& stop, TraceLevel level,
             PathFinderOptions options, const StepObserver& observer) {
  PathFinder finder(h, j, seed, std::move(options));
  Monitor monitor(h.n(), h.k(), j, stop);
  RunTrace trace;
  trace.level = level;
  StopReason reason = StopReason::Exhausted;

  while (true) {
    const std::span<const Event> events = finder.step();
    if (finder.finished()) break;
    bool check = false;
    for (const Event& e : events) {
      monitor.observe(e);
      const bool is_query = std::holds_alternative<QueryEvent>(e);
      check = check || is_query || std::holds_alternative<NewStartEvent>(e);
      if (level == TraceLevel::Full || (level == TraceLevel::Structural && !is_query)) trace.events.push_back(e);
    }
    if (observer) observer(finder, monitor, events);
    if (!check) continue;
    if (const auto r = monitor.check_stop(finder.state())) {
      reason = *r;
      break;
    }
    if (finder.state().t >= stop.budget) {
      reason = StopReason::Budget;
      break;
    }
  }

  const PathFinderState& st = finder.state();
  if (level != TraceLevel::Summary) trace.events.push_back(StoppedEvent{st.t, reason});
  RunSummary& s = trace.summary;
  s.n = h.n();
  s.k = h.k();
  s.j = j;
  s.seed = seed;
  s.max_length = st.max_length;
  s.final_length = st.length();
  s.t = st.t;
  s.new_starts = st.new_starts;
  s.edges_found = st.positive_queries;
  s.standard = st.standard;
  s.skipped = st.skipped;
  s.explored = st.explored.size();
  s.discovered = st.discovered.size();
  s.stop_reason = reason;
  s.first_trigger = monitor.first_trigger();
  return trace;
}

namespace {

json set_json(const VertexSet& s) { return json(s.to_vector()); }

VertexSet set_from(const json& j) {
  const auto v = j.get<std::vector<Vertex>>();
  VertexSet s = VertexSet::from_unsorted(v);
  if (!std::is_sorted(v.begin(), v.end())) throw std::runtime_error("trace: vertex set not in canonical order");
  return s;
}

json event_json(const Event& event) {
  return std::visit(
      [](const auto& e) -> json {
        using T = std::decay_t<decltype(e)>;
        json out{{"t", e.t}};
        if constexpr (std::is_same_v<T, NewStartEvent>) {
          out["type"] = "new_start";
          out["set"] = set_json(e.set);
          json parts = json::array();
          for (const VertexSet& p : e.partition.parts) parts.push_back(set_json(p));
          out["partition"] = parts;
        } else if constexpr (std::is_same_v<T, QueryEvent>) {
          out["type"] = "query";
          out["from"] = set_json(e.from);
          out["kset"] = set_json(e.kset);
          out["edge"] = e.edge;
        } else if constexpr (std::is_same_v<T, BatchActivatedEvent>) {
          out["type"] = "batch_activated";
          out["length"] = e.length;
          json sets = json::array();
          for (const JSet& s : e.sets) sets.push_back(set_json(s));
          out["sets"] = sets;
        } else if constexpr (std::is_same_v<T, BatchSkipEvent>) {
          out["type"] = "batch_skip";
          out["length"] = e.length;
          out["set"] = set_json(e.set);
        } else if constexpr (std::is_same_v<T, ExploredEvent>) {
          out["type"] = "explored";
          out["set"] = set_json(e.set);
        } else if constexpr (std::is_same_v<T, EdgeRemovedEvent>) {
          out["type"] = "edge_removed";
          out["length"] = e.length;
        } else {
          out["type"] = "stopped";
          out["reason"] = std::string(stop_reason_name(e.reason));
        }
        return out;
      },
      event);
}

Event event_from(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  const std::uint64_t t = j.at("t").get<std::uint64_t>();
  if (type == "new_start") {
    ExtendablePartition p;
    for (const json& part : j.at("partition")) p.parts.push_back(set_from(part));
    return NewStartEvent{t, set_from(j.at("set")), std::move(p)};
  }
  if (type == "query") return QueryEvent{t, set_from(j.at("from")), set_from(j.at("kset")), j.at("edge").get<bool>()};
  if (type == "batch_activated") {
    BatchActivatedEvent e{t, j.at("length").get<std::size_t>(), {}};
    for (const json& s : j.at("sets")) e.sets.push_back(set_from(s));
    return e;
  }
  if (type == "batch_skip") return BatchSkipEvent{t, j.at("length").get<std::size_t>(), set_from(j.at("set"))};
  if (type == "explored") return ExploredEvent{t, set_from(j.at("set"))};
  if (type == "edge_removed") return EdgeRemovedEvent{t, j.at("length").get<std::size_t>()};
  if (type == "stopped") {
    const auto r = parse_stop_reason(j.at("reason").get<std::string>());
    if (!r) throw std::runtime_error("trace: unknown stop reason");
    return StoppedEvent{t, *r};
  }
  throw std::runtime_error("trace: unknown record type '" + type + "'");
}

constexpr std::array<const char*, 4> kTriggerNames{"S1", "S2", "S3", "S4"};

}  // namespace

void write_trace_jsonl(std::ostream& os, const RunTrace& trace) {
  const RunSummary& s = trace.summary;
  json header{{"type", "header"}, {"schema_version", kTraceSchemaVersion},
              {"level", std::string(trace_level_name(trace.level))},
              {"n", s.n}, {"k", s.k}, {"j", s.j}, {"seed", s.seed}};
  os << header.dump() << '\n';
  for (const Event& e : trace.events) os << event_json(e).dump() << '\n';
  json triggers = json::object();
  for (std::size_t i = 0; i < 4; ++i) {
    triggers[kTriggerNames[i]] = s.first_trigger[i] ? json(*s.first_trigger[i]) : json(nullptr);
  }
  json summary{{"type", "summary"},
               {"n", s.n},
               {"k", s.k},
               {"j", s.j},
               {"seed", s.seed},
               {"max_length", s.max_length},
               {"final_length", s.final_length},
               {"t", s.t},
               {"new_starts", s.new_starts},
               {"edges_found", s.edges_found},
               {"standard", s.standard},
               {"skipped", s.skipped},
               {"explored", s.explored},
               {"discovered", s.discovered},
               {"stop_reason", std::string(stop_reason_name(s.stop_reason))},
               {"first_trigger", triggers}};
  os << summary.dump() << '\n';
}

RunTrace read_trace_jsonl(std::istream& is) {
  RunTrace trace;
  std::string line;
  bool have_header = false, have_summary = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (have_summary) throw std::runtime_error("trace: records after the summary");
    const json j = json::parse(line);
    const std::string type = j.at("type").get<std::string>();
    if (!have_header) {
      if (type != "header") throw std::runtime_error("trace: missing header");
      if (j.at("schema_version").get<int>() != kTraceSchemaVersion) {
        throw std::runtime_error("trace: unsupported schema version");
      }
      const auto level = parse_trace_level(j.at("level").get<std::string>());
      if (!level) throw std::runtime_error("trace: unknown level");
      trace.level = *level;
      have_header = true;
      continue;
    }
    if (type == "summary") {
      RunSummary& s = trace.summary;
      s.n = j.at("n").get<std::uint32_t>();
      s.k = j.at("k").get<int>();
      s.j = j.at("j").get<int>();
      s.seed = j.at("seed").get<std::uint64_t>();
      s.max_length = j.at("max_length").get<std::size_t>();
      s.final_length = j.at("final_length").get<std::size_t>();
      s.t = j.at("t").get<std::uint64_t>();
      s.new_starts = j.at("new_starts").get<std::uint64_t>();
      s.edges_found = j.at("edges_found").get<std::uint64_t>();
      s.standard = j.at("standard").get<std::uint64_t>();
      s.skipped = j.at("skipped").get<std::uint64_t>();
      s.explored = j.at("explored").get<std::uint64_t>();
      s.discovered = j.at("discovered").get<std::uint64_t>();
      const auto r = parse_stop_reason(j.at("stop_reason").get<std::string>());
      if (!r) throw std::runtime_error("trace: unknown stop reason");
      s.stop_reason = *r;
      const json& ft = j.at("first_trigger");
      for (std::size_t i = 0; i < 4; ++i) {
        const json& v = ft.at(kTriggerNames[i]);
        s.first_trigger[i] = v.is_null() ? std::nullopt : std::optional<std::uint64_t>(v.get<std::uint64_t>());
      }
      have_summary = true;
      continue;
    }
    trace.events.push_back(event_from(j));
  }
  if (!have_summary) throw std::runtime_error("trace: missing summary");
  return trace;
}

std::optional<std::string> replay_trace(const RunTrace& trace, EdgeSource& h) {
  if (trace.level != TraceLevel::Full) return "replay needs a full trace";
  const int k = h.k();
  const int j = trace.summary.j;
  const StructuralParams sp = structural_params(k, j);

  struct Entry {
    JSet set;
    std::size_t batch;
  };
  std::vector<Entry> stack;
  absl::flat_hash_set<JSet> explored, discovered;
  absl::flat_hash_set<KSet> queried;
  std::vector<KSet> edges;
  std::vector<VertexSet> blocks;
  std::vector<std::size_t> remaining;
  std::vector<std::uint8_t> on_path(h.n(), 0);
  std::uint64_t t = 0;
  bool expect_batch = false, expect_removal = false;

  auto fail = [&](const std::string& what) {
    return std::optional<std::string>("t=" + std::to_string(t) + ": " + what);
  };

  for (const Event& event : trace.events) {
    if (expect_batch && !std::holds_alternative<BatchActivatedEvent>(event)) {
      return fail("positive query not followed by a batch");
    }
    if (expect_removal && !std::holds_alternative<EdgeRemovedEvent>(event)) {
      return fail("exhausted batch not followed by an edge removal");
    }
    if (const auto* e = std::get_if<NewStartEvent>(&event)) {
      if (!stack.empty()) return fail("new start while the stack is nonempty");
      if (discovered.contains(e->set)) return fail("new start on a discovered j-set");
      if (!e->partition.valid_for(sp) || e->partition.jset() != e->set) return fail("bad start partition");
      discovered.insert(e->set);
      stack.push_back({e->set, 0});
      remaining.assign(1, 1);
      for (Vertex v : e->set) on_path[v] = 1;
    } else if (const auto* e = std::get_if<QueryEvent>(&event)) {
      if (e->t != t + 1) return fail("query clock does not advance by one");
      t = e->t;
      if (stack.empty() || stack.back().set != e->from) return fail("query not from the top of the stack");
      if (e->kset.size() != static_cast<std::size_t>(k) || !e->kset.contains_all(e->from)) {
        return fail("queried k-set does not contain J");
      }
      const VertexSet x = e->kset.minus(e->from);
      for (Vertex v : x) {
        if (on_path[v]) return fail("queried k-set meets the path");
      }
      if (!queried.insert(e->kset).second) return fail("k-set queried twice");
      if (contains_explored_jset(e->from, x, j, explored)) return fail("queried k-set contains an explored j-set");
      if (h.query_edge(e->kset) != e->edge) return fail("query outcome disagrees with the hypergraph");
      if (e->edge) {
        for (std::size_t back = 1; back <= edges.size(); ++back) {
          const long long want = std::max(0LL, static_cast<long long>(k) - static_cast<long long>(back) * (k - j));
          if (static_cast<long long>(edges[edges.size() - back].intersected(e->kset).size()) != want) {
            return fail("new edge does not continue the path");
          }
        }
        edges.push_back(e->kset);
        blocks.push_back(x);
        for (Vertex v : x) on_path[v] = 1;
        expect_batch = true;
      }
    } else if (const auto* e = std::get_if<BatchActivatedEvent>(&event)) {
      if (!expect_batch) return fail("batch without a positive query");
      expect_batch = false;
      if (e->length != edges.size()) return fail("batch index is not the path length");
      if (e->sets.size() > sp.batch_size) return fail("batch too large");
      for (const JSet& s : e->sets) {
        if (!edges.back().contains_all(s) || s.size() != static_cast<std::size_t>(j)) {
          return fail("batch member outside the new edge");
        }
        if (!discovered.insert(s).second) return fail("batch member already discovered");
        stack.push_back({s, e->length});
      }
      remaining.push_back(e->sets.size());
      expect_removal = e->sets.empty();
    } else if (const auto* e = std::get_if<BatchSkipEvent>(&event)) {
      if (!discovered.contains(e->set)) return fail("skipped batch member was not discovered");
    } else if (const auto* e = std::get_if<ExploredEvent>(&event)) {
      if (stack.empty() || stack.back().set != e->set) return fail("explored set is not the top of the stack");
      const std::size_t i = stack.back().batch;
      stack.pop_back();
      explored.insert(e->set);
      if (i + 1 != remaining.size()) return fail("explored set's batch is not the newest");
      if (--remaining[i] == 0) {
        if (i >= 1) {
          expect_removal = true;
        } else {
          if (!edges.empty() || !stack.empty()) return fail("start batch exhausted with a live path");
          std::fill(on_path.begin(), on_path.end(), 0);
          remaining.clear();
        }
      }
    } else if (const auto* e = std::get_if<EdgeRemovedEvent>(&event)) {
      if (!expect_removal) return fail("edge removed without an exhausted batch");
      expect_removal = false;
      if (e->length != edges.size() || edges.empty()) return fail("removed edge index is not the path length");
      for (Vertex v : blocks.back()) on_path[v] = 0;
      blocks.pop_back();
      edges.pop_back();
      remaining.pop_back();
    }
    if (stack.size() > 1 + sp.batch_size * edges.size()) return fail("active stack exceeds 1 + C(k-j,a) l");
  }
  if (t != trace.summary.t) return fail("summary clock disagrees with the events");
  return std::nullopt;
}

}  // namespace jtight
