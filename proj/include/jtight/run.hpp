#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "jtight/hypergraph.hpp"
#include "jtight/monitor.hpp"
#include "jtight/pathfinder.hpp"

namespace jtight {

enum class TraceLevel {
  Summary,     // no events kept
  Structural,  // everything except Query events
  Full,
};

std::string_view trace_level_name(TraceLevel level);
std::optional<TraceLevel> parse_trace_level(std::string_view name);

struct RunSummary {
  std::uint32_t n = 0;
  int k = 0;
  int j = 0;
  std::uint64_t seed = 0;
  std::size_t max_length = 0;
  std::size_t final_length = 0;
  std::uint64_t t = 0;
  std::uint64_t new_starts = 0;
  std::uint64_t edges_found = 0;  // positive queries
  std::uint64_t standard = 0;
  std::uint64_t skipped = 0;
  std::uint64_t explored = 0;
  std::uint64_t discovered = 0;
  StopReason stop_reason = StopReason::Exhausted;
  std::array<std::optional<std::uint64_t>, 4> first_trigger{};  // S1..S4

  friend bool operator==(const RunSummary&, const RunSummary&) = default;
};

struct RunTrace {
  TraceLevel level = TraceLevel::Summary;
  std::vector<Event> events;
  RunSummary summary;

  friend bool operator==(const RunTrace&, const RunTrace&) = default;
};

/// Called after every step with the events that step produced.
using StepObserver = std::function<void(const PathFinder&, const Monitor&, std::span<const Event>)>;

/// One PathFinder run until a stopping condition, the query budget, or the
/// end of the neutral j-sets.
RunTrace run(EdgeSource& h, int j, std::uint64_t seed, const StoppingConfig& stop,
             TraceLevel level = TraceLevel::Summary, PathFinderOptions options = {},
             const StepObserver& observer = {});

inline constexpr int kTraceSchemaVersion = 1;

/// JSON lines: a header record, one record per event, the summary last.
void write_trace_jsonl(std::ostream& os, const RunTrace& trace);
RunTrace read_trace_jsonl(std::istream& is);

/// Rebuilds the snapshots (active stack, explored sets, path) from a Full
/// trace alone and checks them: query outcomes agree with `h`, no k-set is
/// queried twice, every query satisfies the query conditions against the
/// rebuilt snapshot, and the path stays a valid chain of edges. Returns the
/// first problem found, or nullopt.
std::optional<std::string> replay_trace(const RunTrace& trace, EdgeSource& h);

}  // namespace jtight
