#include <doctest.h>

#include <random>
#include <sstream>

#include "jtight/run.hpp"
#include "test_support.hpp"

using namespace jtight;

namespace {

RunTrace sample_trace(TraceLevel level, std::uint64_t seed = 3) {
  LazyHypergraph h(14, 3, 0.12, seed);
  StoppingConfig cfg;
  cfg.track_degrees = true;
  return run(h, 2, seed + 1, cfg, level);
}

RunTrace round_trip(const RunTrace& t) {
  std::stringstream ss;
  write_trace_jsonl(ss, t);
  return read_trace_jsonl(ss);
}

}  // namespace

TEST_CASE("trace levels keep the same summary") {
  const RunTrace full = sample_trace(TraceLevel::Full);
  const RunTrace structural = sample_trace(TraceLevel::Structural);
  const RunTrace summary = sample_trace(TraceLevel::Summary);
  CHECK(full.summary == structural.summary);
  CHECK(full.summary == summary.summary);
  CHECK(summary.events.empty());
  CHECK(structural.events.size() < full.events.size());
  for (const Event& e : structural.events) CHECK_FALSE(std::holds_alternative<QueryEvent>(e));
  std::size_t queries = 0;
  for (const Event& e : full.events) queries += std::holds_alternative<QueryEvent>(e);
  CHECK(queries == full.summary.t);
  REQUIRE(!full.events.empty());
  CHECK(std::holds_alternative<StoppedEvent>(full.events.back()));
}

TEST_CASE("event times never decrease") {
  const RunTrace full = sample_trace(TraceLevel::Full, 8);
  std::uint64_t last = 0;
  for (const Event& e : full.events) {
    CHECK(event_time(e) >= last);
    last = event_time(e);
  }
}

TEST_CASE("JSONL round trip") {
  for (TraceLevel level : {TraceLevel::Summary, TraceLevel::Structural, TraceLevel::Full}) {
    const RunTrace t = sample_trace(level);
    CHECK(round_trip(t) == t);
  }
  // a run that stopped on S1 with trigger times set
  LazyHypergraph h(30, 3, 0.05, 5);
  StoppingConfig cfg;
  cfg.target_length = 3;
  cfg.track_degrees = true;
  const RunTrace t = run(h, 2, 6, cfg, TraceLevel::Full);
  CHECK(round_trip(t) == t);
}

TEST_CASE("JSONL layout") {
  const RunTrace t = sample_trace(TraceLevel::Structural);
  std::stringstream ss;
  write_trace_jsonl(ss, t);
  std::vector<std::string> lines;
  for (std::string line; std::getline(ss, line);) lines.push_back(line);
  REQUIRE(lines.size() == t.events.size() + 2);
  CHECK(lines.front().find("\"type\":\"header\"") != std::string::npos);
  CHECK(lines.front().find("\"schema_version\":1") != std::string::npos);
  CHECK(lines.back().find("\"type\":\"summary\"") != std::string::npos);
}

TEST_CASE("JSONL reader rejects bad input") {
  std::istringstream none("");
  CHECK_THROWS(read_trace_jsonl(none));
  std::istringstream no_header("{\"type\":\"explored\",\"t\":0,\"set\":[0,1]}\n");
  CHECK_THROWS(read_trace_jsonl(no_header));
  std::istringstream version(
      "{\"type\":\"header\",\"schema_version\":99,\"level\":\"full\",\"n\":5,\"k\":3,\"j\":2,\"seed\":1}\n");
  CHECK_THROWS(read_trace_jsonl(version));

  const RunTrace t = sample_trace(TraceLevel::Summary);
  std::stringstream ss;
  write_trace_jsonl(ss, t);
  std::string text = ss.str();
  std::istringstream truncated(text.substr(0, text.find('\n') + 1));
  CHECK_THROWS(read_trace_jsonl(truncated));
}

TEST_CASE("budget stops a run") {
  LazyHypergraph h(40, 3, 0.02, 1);
  StoppingConfig cfg;
  cfg.budget = 100;
  const RunTrace t = run(h, 2, 1, cfg);
  CHECK(t.summary.stop_reason == StopReason::Budget);
  CHECK(t.summary.t == 100);
}

TEST_CASE("replay accepts real traces and survives serialization") {
  std::mt19937_64 rng(71);
  for (const auto& [k, j] : jtest::small_shapes(5)) {
    const std::uint32_t n = 13;
    const double p = std::min(1.0, 2.5 * threshold_p0(n, k, j));
    const std::uint64_t coin = rng();
    LazyHypergraph h(n, k, p, coin);
    const RunTrace t = run(h, j, rng(), StoppingConfig{}, TraceLevel::Full);
    LazyHypergraph again(n, k, p, coin);
    const auto err = replay_trace(round_trip(t), again);
    CAPTURE(k);
    CAPTURE(j);
    CHECK_MESSAGE(!err, (err ? *err : std::string()));
  }
}

TEST_CASE("replay needs a full trace") {
  LazyHypergraph h(14, 3, 0.12, 3);
  CHECK(replay_trace(sample_trace(TraceLevel::Structural), h).has_value());
}

TEST_CASE("replay catches a repeated query") {
  LazyHypergraph h(12, 3, 0.15, 2);
  RunTrace t = run(h, 2, 2, StoppingConfig{}, TraceLevel::Full);
  for (std::size_t i = 0; i + 1 < t.events.size(); ++i) {
    auto* a = std::get_if<QueryEvent>(&t.events[i]);
    auto* b = std::get_if<QueryEvent>(&t.events[i + 1]);
    if (a && b && a->from == b->from && !a->edge && !b->edge) {
      b->kset = a->kset;
      break;
    }
  }
  LazyHypergraph again(12, 3, 0.15, 2);
  CHECK(replay_trace(t, again).has_value());
}

TEST_CASE("name tables") {
  for (TraceLevel l : {TraceLevel::Summary, TraceLevel::Structural, TraceLevel::Full}) {
    CHECK(parse_trace_level(trace_level_name(l)) == l);
  }
  for (StopReason r : {StopReason::S1, StopReason::S2, StopReason::S3, StopReason::S4, StopReason::Exhausted,
                       StopReason::Budget, StopReason::NotApplicable}) {
    CHECK(parse_stop_reason(stop_reason_name(r)) == r);
  }
  CHECK_FALSE(parse_stop_reason("S5").has_value());
}
