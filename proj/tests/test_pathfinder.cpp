#include <doctest.h>

#include <random>

#include "jtight/monitor.hpp"
#include "jtight/oracle.hpp"
#include "jtight/pathfinder.hpp"
#include "jtight/run.hpp"
#include "test_support.hpp"

using namespace jtight;

namespace {

std::vector<VertexSet> singletons(std::initializer_list<Vertex> vs) {
  std::vector<VertexSet> out;
  for (Vertex v : vs) out.push_back({v});
  return out;
}

// Steps until finished, collecting every event.
std::vector<Event> drain(PathFinder& pf, std::size_t max_steps = 1'000'000) {
  std::vector<Event> all;
  for (std::size_t i = 0; i < max_steps; ++i) {
    auto ev = pf.step();
    if (ev.empty()) break;
    all.insert(all.end(), ev.begin(), ev.end());
  }
  return all;
}

template <typename T>
std::vector<T> only(const std::vector<Event>& events) {
  std::vector<T> out;
  for (const Event& e : events) {
    if (const T* x = std::get_if<T>(&e)) out.push_back(*x);
  }
  return out;
}

}  // namespace

TEST_CASE("allowed_candidates: query conditions") {
  const absl::flat_hash_set<JSet> none;
  const absl::flat_hash_set<VertexSet> unqueried;
  const std::vector<Vertex> p12{1, 2};
  const std::vector<Vertex> p123{1, 2, 3};
  CHECK(allowed_candidates(4, 3, {1, 2}, p12, none, unqueried) == singletons({0, 3}));
  CHECK(allowed_candidates(4, 3, {1, 2}, p123, none, unqueried) == singletons({0}));
  const absl::flat_hash_set<JSet> explored{{2, 3}};
  CHECK(allowed_candidates(4, 3, {1, 2}, p12, explored, unqueried) == singletons({0}));
  const absl::flat_hash_set<VertexSet> queried{{0}};
  CHECK(allowed_candidates(4, 3, {1, 2}, p12, none, queried) == singletons({3}));
  // an explored j-set inside J itself does not forbid anything
  const absl::flat_hash_set<JSet> self{{1, 2}};
  CHECK(allowed_candidates(4, 3, {1, 2}, p12, self, unqueried) == singletons({0, 3}));
}

TEST_CASE("activate_batch: the three shapes") {
  SUBCASE("k=3, j=2") {
    const auto sp = structural_params(3, 2);
    const auto got = activate_batch(sp, {1, 2}, ExtendablePartition{{{1}, {2}}}, {1, 2, 3});
    REQUIRE(got.size() == 1);
    CHECK(got[0].set == JSet{2, 3});
    CHECK(got[0].partition == ExtendablePartition{{{2}, {3}}});
  }
  SUBCASE("k=5, j=2") {
    const auto sp = structural_params(5, 2);
    const auto got = activate_batch(sp, {1, 2}, ExtendablePartition{{{1, 2}}}, {1, 2, 3, 4, 5});
    REQUIRE(got.size() == 3);
    CHECK(got[0].set == JSet{3, 4});
    CHECK(got[1].set == JSet{3, 5});
    CHECK(got[2].set == JSet{4, 5});
  }
  SUBCASE("k=4, j=1") {
    const auto sp = structural_params(4, 1);
    const auto got = activate_batch(sp, {1}, ExtendablePartition{{{1}}}, {1, 2, 3, 4});
    REQUIRE(got.size() == 3);
    CHECK(got[0].set == JSet{2});
    CHECK(got[1].set == JSet{3});
    CHECK(got[2].set == JSet{4});
  }
  SUBCASE("bad inputs") {
    const auto sp = structural_params(3, 2);
    CHECK_THROWS_AS(activate_batch(sp, {1, 2}, ExtendablePartition{{{1}, {2}}}, {0, 1, 3}), std::invalid_argument);
    CHECK_THROWS_AS(activate_batch(sp, {1, 2}, ExtendablePartition{{{1, 2}}}, {1, 2, 3}), std::invalid_argument);
  }
}

TEST_CASE("activate_batch: members are valid partitions inside the found edge") {
  std::mt19937_64 rng(21);
  for (const auto& [k, j] : jtest::small_shapes(7)) {
    const auto sp = structural_params(k, j);
    for (int trial = 0; trial < 10; ++trial) {
      const auto seq = jtest::random_sequence(30, static_cast<std::size_t>(k), rng);
      const JSet from = JSet::from_unsorted(std::span<const Vertex>(seq.data(), static_cast<std::size_t>(j)));
      const KSet found = KSet::from_unsorted(seq);
      const auto batch = activate_batch(sp, from, lexicographic_partition(sp, from), found);
      CAPTURE(k);
      CAPTURE(j);
      CHECK(batch.size() == sp.batch_size);
      for (const ActivatedSet& m : batch) {
        CHECK(m.partition.valid_for(sp));
        CHECK(m.partition.jset() == m.set);
        CHECK(found.contains_all(m.set));
        // the new j-set keeps all of K \ J
        CHECK(m.set.contains_all(found.minus(from)) == (sp.r >= 1 || sp.b == 0));
      }
    }
  }
}

TEST_CASE("retreat: lone start with no candidates") {
  ExplicitHypergraph h(5, 3);
  PathFinder pf(h, 2, 1, {{{0, 1}}});
  const auto events = drain(pf);
  REQUIRE(!events.empty());
  const auto starts = only<NewStartEvent>(events);
  CHECK(starts.front().set == JSet{0, 1});
  // {0,1} asks about 3 k-sets, then is explored, and the stack is empty
  const auto explored = only<ExploredEvent>(events);
  CHECK(explored.front().set == JSet{0, 1});
  CHECK(only<EdgeRemovedEvent>(events).empty());
  CHECK(pf.state().max_length == 0);
  CHECK(pf.state().explored.size() == 10);
  for (const auto& q : only<QueryEvent>(events)) CHECK_FALSE(q.edge);
}

TEST_CASE("retreat: batch of one removes the edge") {
  ExplicitHypergraph h = jtest::from_edges(5, 3, {{1, 2, 3}});
  PathFinder pf(h, 2, 3, {{{1, 2}}});
  const auto events = drain(pf);
  const auto removed = only<EdgeRemovedEvent>(events);
  REQUIRE(removed.size() == 1);
  CHECK(removed[0].length == 1);
  // removal comes right after {2,3} is explored
  std::size_t at = 0;
  for (std::size_t i = 0; i < events.size(); ++i) {
    if (std::holds_alternative<EdgeRemovedEvent>(events[i])) at = i;
  }
  REQUIRE(at > 0);
  const auto* before = std::get_if<ExploredEvent>(&events[at - 1]);
  REQUIRE(before != nullptr);
  CHECK(before->set == JSet{2, 3});
  CHECK(pf.state().max_length == 1);
  CHECK(pf.state().length() == 0);
}

TEST_CASE("retreat: k=5, j=2 batch of three removes the edge on the third") {
  ExplicitHypergraph h = jtest::from_edges(7, 5, {{1, 2, 3, 4, 5}});
  PathFinder pf(h, 2, 5, {{{1, 2}}});
  const auto events = drain(pf);
  int batch_explored = 0;
  bool removed = false;
  for (const Event& e : events) {
    if (const auto* x = std::get_if<ExploredEvent>(&e)) {
      if (x->set == JSet{3, 4} || x->set == JSet{3, 5} || x->set == JSet{4, 5}) {
        CHECK_FALSE(removed);
        ++batch_explored;
      }
    }
    if (std::holds_alternative<EdgeRemovedEvent>(e)) {
      CHECK(batch_explored == 3);
      removed = true;
    }
  }
  CHECK(removed);
}

TEST_CASE("run: small hand examples") {
  StoppingConfig stop;
  SUBCASE("empty H") {
    ExplicitHypergraph h(5, 3);
    const RunTrace tr = run(h, 2, 11, stop, TraceLevel::Full);
    CHECK(tr.summary.max_length == 0);
    CHECK(tr.summary.explored == 10);
    CHECK(tr.summary.stop_reason == StopReason::Exhausted);
    CHECK(tr.summary.edges_found == 0);
  }
  SUBCASE("complete on 4 vertices") {
    ExplicitHypergraph h = jtest::complete(4, 3);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      CHECK(run(h, 2, seed, stop).summary.max_length == 2);
    }
    CHECK(longest_path_exact(h, 2).length == 2);
  }
  SUBCASE("two chained edges") {
    ExplicitHypergraph h = jtest::from_edges(4, 3, {{0, 1, 2}, {1, 2, 3}});
    PathFinderOptions opts{{{0, 1}}};
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      CHECK(run(h, 2, seed, stop, TraceLevel::Summary, opts).summary.max_length == 2);
    }
  }
}

TEST_CASE("engine candidates equal the direct evaluation of the query conditions") {
  std::mt19937_64 rng(8);
  int compared = 0;
  for (const auto& [k, j] : jtest::small_shapes(4)) {
    for (int trial = 0; trial < 4; ++trial) {
      const std::uint32_t n = static_cast<std::uint32_t>(k + 4 + rng() % 5);
      const double p = std::min(1.0, 3.0 * threshold_p0(n, k, j));
      LazyHypergraph h(n, k, p, rng());
      PathFinder pf(h, j, rng());
      absl::flat_hash_map<JSet, absl::flat_hash_set<VertexSet>> queried;
      for (int step = 0; step < 3000; ++step) {
        if (pf.state().live() && step % 7 == 0) {
          const JSet& top = pf.state().active.back().set;
          const auto verts = pf.state().path_vertex_list();
          auto direct = allowed_candidates(n, k, top, verts, pf.state().explored, queried[top]);
          auto engine = pf.allowed_candidates();
          std::sort(engine.begin(), engine.end());
          CAPTURE(k);
          CAPTURE(j);
          CHECK(engine == direct);
          ++compared;
        }
        const auto ev = pf.step();
        if (ev.empty()) break;
        for (const Event& e : ev) {
          if (const auto* q = std::get_if<QueryEvent>(&e)) queried[q->from].insert(q->kset.minus(q->from));
        }
      }
    }
  }
  CHECK(compared > 200);
}

TEST_CASE("engine candidates come in sigma_k order") {
  LazyHypergraph h(12, 3, 0.05, 4);
  PathFinder pf(h, 2, 9);
  for (int i = 0; i < 50; ++i) pf.step();
  REQUIRE(pf.state().live());
  const JSet top = pf.state().active.back().set;
  const auto c = pf.allowed_candidates();
  for (std::size_t i = 1; i < c.size(); ++i) {
    const Priority a{pf.sigma_k(top.united(c[i - 1])), top.united(c[i - 1])};
    const Priority b{pf.sigma_k(top.united(c[i])), top.united(c[i])};
    CHECK(a < b);
  }
}

TEST_CASE("current path windows are the found edges") {
  std::mt19937_64 rng(12);
  for (const auto& [k, j] : jtest::small_shapes(5)) {
    const std::uint32_t n = 16;
    LazyHypergraph h(n, k, std::min(1.0, 4.0 * threshold_p0(n, k, j)), rng());
    PathFinder pf(h, j, rng());
    int checked = 0;
    for (int step = 0; step < 5000 && !pf.finished(); ++step) {
      pf.step();
      const auto& st = pf.state();
      if (!st.live()) continue;
      const JTightPath path = st.current_path();
      CAPTURE(k);
      CAPTURE(j);
      CHECK(path.edges() == st.edges);
      CHECK(path.vertices().size() == st.path_vertices);
      ++checked;
    }
    CHECK(checked > 0);
  }
}

TEST_CASE("bookkeeping: batch sizes and discovered counts") {
  std::mt19937_64 rng(30);
  for (const auto& [k, j] : jtest::small_shapes(5)) {
    const std::uint32_t n = 14;
    LazyHypergraph h(n, k, std::min(1.0, 3.0 * threshold_p0(n, k, j)), rng());
    PathFinder pf(h, j, rng());
    const auto events = drain(pf);
    const auto sp = structural_params(k, j);
    for (const auto& b : only<BatchActivatedEvent>(events)) CHECK(b.sets.size() <= sp.batch_size);
    const auto& st = pf.state();
    CHECK(st.discovered.size() == st.new_starts + st.standard - st.skipped);
    CHECK(st.standard == st.positive_queries * sp.batch_size);
    CHECK(st.explored.size() == st.discovered.size());
    CHECK(pf.finished());
  }
}

TEST_CASE("determinism and replay") {
  std::mt19937_64 rng(77);
  for (const auto& [k, j] : jtest::small_shapes(4)) {
    const std::uint32_t n = 15;
    const double p = std::min(1.0, 2.0 * threshold_p0(n, k, j));
    const std::uint64_t coin = rng(), search = rng();
    StoppingConfig stop;
    LazyHypergraph h1(n, k, p, coin);
    LazyHypergraph h2(n, k, p, coin);
    const RunTrace a = run(h1, j, search, stop, TraceLevel::Full);
    const RunTrace b = run(h2, j, search, stop, TraceLevel::Full);
    CAPTURE(k);
    CAPTURE(j);
    CHECK(a == b);
    LazyHypergraph h3(n, k, p, coin);
    const auto err = replay_trace(a, h3);
    CHECK_MESSAGE(!err, (err ? *err : std::string()));
  }
}

TEST_CASE("replay rejects a tampered trace") {
  LazyHypergraph h(12, 3, 0.2, 5);
  RunTrace tr = run(h, 2, 6, StoppingConfig{}, TraceLevel::Full);
  bool flipped = false;
  for (Event& e : tr.events) {
    if (auto* q = std::get_if<QueryEvent>(&e); q && !flipped && !q->edge) {
      q->edge = true;
      flipped = true;
    }
  }
  REQUIRE(flipped);
  LazyHypergraph again(12, 3, 0.2, 5);
  CHECK(replay_trace(tr, again).has_value());
}
