#include "jtight/monitor.hpp"

#include <cmath>
#include <stdexcept>

namespace jtight {
namespace {

std::size_t stop_index(StopReason r) {
  switch (r) {
    case StopReason::S1: return 0;
    case StopReason::S2: return 1;
    case StopReason::S3: return 2;
    case StopReason::S4: return 3;
    default: throw std::invalid_argument("only S1..S4 can be enabled");
  }
}

BigInt binom_signed(long long n, long long m) {
  if (n < 0 || m < 0 || m > n) return 0;
  return binomial_exact(static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(m));
}

}  // namespace

std::vector<double> default_c_ladder(int k, int j) {
  structural_params(k, j);
  double fact_kj = 1.0, fact_k = 1.0;
  for (int i = 2; i <= k - j; ++i) fact_kj *= i;
  for (int i = 2; i <= k; ++i) fact_k *= i;
  std::vector<double> out{40.0 * fact_kj * fact_kj};
  const double growth = std::ldexp(fact_k, 3 * k + 4);
  for (int i = 1; i < j; ++i) out.push_back(out.back() * growth);
  return out;
}

bool StoppingConfig::is_enabled(StopReason r) const { return enabled[stop_index(r)]; }

void StoppingConfig::enable(StopReason r, bool on) { enabled[stop_index(r)] = on; }

std::vector<double> StoppingConfig::ladder(int k, int j) const {
  return c_ladder.empty() ? default_c_ladder(k, j) : c_ladder;
}

void StoppingConfig::validate(int k, int j) const {
  structural_params(k, j);
  if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("beta must lie in (0, 1)");
  if (!(target_length >= 0.0)) throw std::invalid_argument("target_length must be >= 0");
  if (!(t0 > 0.0)) throw std::invalid_argument("T0 must be positive");
  if (budget == 0) throw std::invalid_argument("query budget must be positive");
  const std::vector<double> c = ladder(k, j);
  if (c.size() != static_cast<std::size_t>(j)) throw std::invalid_argument("C ladder needs exactly j constants");
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (!(c[i] > 0.0)) throw std::invalid_argument("C ladder constants must be positive");
    if (i > 0 && !(c[i] > c[i - 1])) throw std::invalid_argument("C ladder must be strictly increasing");
  }
}

StoppingConfig StoppingConfig::supercritical(std::uint32_t n, int k, int j, double eps, double delta) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  StoppingConfig c;
  const double nn = n;
  if (j == 1) {
    c.target_length = (1.0 - delta) * eps * eps * nn / (4.0 * (k - 1.0) * (k - 1.0));
    c.t0 = eps * nn * binomial_double(n - 1, static_cast<std::uint64_t>(k - 1)) / (2.0 * (k - 1));
  } else {
    const double d = k - j;
    c.target_length = (1.0 - delta) * eps * nn / (d * d);
    c.t0 = std::pow(nn, d + 1.0) / eps;
  }
  return c;
}

DegreeTracker::DegreeTracker(int j) : j_(j), by_size_(static_cast<std::size_t>(std::max(j, 1))) {
  if (j < 1) throw std::invalid_argument("DegreeTracker needs j >= 1");
}

void DegreeTracker::touch(const VertexSet& s) {
  if (touched_set_.insert(s).second) touched_.push_back(s);
}

void DegreeTracker::add(const JSet& jset) {
  if (jset.size() != static_cast<std::size_t>(j_)) throw std::invalid_argument("DegreeTracker: wrong j-set size");
  if (!seen_.insert(jset).second) throw std::logic_error("DegreeTracker: j-set discovered twice");
  ++total_;
  touch(VertexSet{});
  for (int i = 1; i < j_; ++i) {
    for_each_subset(jset.span(), static_cast<std::size_t>(i), [&](const VertexSet& sub) {
      ++by_size_[static_cast<std::size_t>(i)][sub];
      touch(sub);
      return true;
    });
  }
}

std::uint64_t DegreeTracker::degree(const VertexSet& subset) const {
  if (subset.empty()) return total_;
  if (subset.size() >= static_cast<std::size_t>(j_)) throw std::invalid_argument("degree is tracked for |I| < j");
  const auto& m = by_size_[subset.size()];
  auto it = m.find(subset);
  return it == m.end() ? 0 : it->second;
}

std::uint64_t DegreeTracker::degree_sum(int i) const {
  if (i == 0) return total_;
  std::uint64_t sum = 0;
  for (const auto& [s, d] : by_size_.at(static_cast<std::size_t>(i))) sum += d;
  return sum;
}

std::uint64_t DegreeTracker::max_degree_within(const JSet& within, int i) const {
  if (i == 0) return total_;
  std::uint64_t best = 0;
  for_each_subset(within.span(), static_cast<std::size_t>(i), [&](const VertexSet& sub) {
    best = std::max(best, degree(sub));
    return true;
  });
  return best;
}

std::vector<VertexSet> DegreeTracker::take_touched() {
  std::vector<VertexSet> out;
  out.swap(touched_);
  touched_set_.clear();
  return out;
}

ForbiddenCounters forbidden_counts(const PathFinderState& state, const DegreeTracker& degrees,
                                   std::uint64_t exact_limit) {
  if (state.active.empty()) throw std::logic_error("forbidden_counts needs a nonempty active stack");
  const long long n = state.n, k = state.params.k, j = state.params.j;
  const JSet& top = state.active.back().set;
  const long long off_j = static_cast<long long>(state.path_vertices) - j;  // |V(P) \ J|

  ForbiddenCounters out;
  out.f1 = binom_signed(n - j, k - j) - binom_signed(n - j - off_j, k - j);
  out.f1_bound = BigInt(state.length()) * (k - j) * binom_signed(n - j - 1, k - j - 1);
  out.f2_bound = 0;
  for (long long z = 0; z < j; ++z) {
    out.f2_bound += binom_signed(j, z) * degrees.max_degree_within(top, static_cast<int>(z)) *
                    binom_signed(n - 2 * j + z, k - 2 * j + z);
  }

  if (binom_signed(n - j, k - j) <= exact_limit) {
    std::vector<Vertex> pool;
    for (Vertex v = 0; v < state.n; ++v) {
      if (!top.contains(v)) pool.push_back(v);
    }
    std::uint64_t count = 0;
    for_each_subset(std::span<const Vertex>(pool), static_cast<std::size_t>(k - j), [&](const VertexSet& x) {
      if (contains_explored_jset(top, x, static_cast<int>(j), state.explored)) ++count;
      return true;
    });
    out.f2_exact = count;
  }
  return out;
}

Monitor::Monitor(std::uint32_t n, int k, int j, StoppingConfig config)
    : n_(n), k_(k), j_(j), config_(std::move(config)) {
  config_.validate(k, j);
  ladder_ = config_.ladder(k, j);
  n_beta_ = std::pow(static_cast<double>(n), config_.beta);
  if (config_.track_degrees || config_.is_enabled(StopReason::S4)) degrees_.emplace(j);
}

void Monitor::observe(const Event& event) {
  if (const auto* ns = std::get_if<NewStartEvent>(&event)) {
    ++r_;
    if (degrees_) degrees_->add(ns->set);
  } else if (const auto* ba = std::get_if<BatchActivatedEvent>(&event)) {
    s_ += ba->sets.size();
    if (degrees_) {
      for (const JSet& s : ba->sets) degrees_->add(s);
    }
  } else if (std::holds_alternative<BatchSkipEvent>(event)) {
    ++s_;
  }
}

double Monitor::s3_threshold(std::uint64_t t) const {
  double fact = 1.0;
  for (int i = 2; i <= k_ - j_; ++i) fact *= i;
  const double scale = std::pow(static_cast<double>(n_), static_cast<double>(k_ - j_));
  return 2.0 * fact * std::sqrt(static_cast<double>(t) * n_beta_ / scale) + n_beta_ / 2.0;
}

double Monitor::s4_threshold(std::uint64_t t, int i) const {
  const double scale = std::pow(static_cast<double>(n_), static_cast<double>(k_ - j_ + i));
  return ladder_.at(static_cast<std::size_t>(i)) * static_cast<double>(t) / scale + n_beta_;
}

std::optional<StopReason> Monitor::check_stop(const PathFinderState& state) {
  const std::uint64_t t = state.t;
  std::array<bool, 4> holds{};
  // the target is a real number; absorb rounding noise such as 0.4*0.4*2000/16 > 10
  holds[0] = static_cast<double>(state.length()) >= config_.target_length * (1.0 - 1e-12);
  holds[1] = static_cast<double>(t) >= config_.t0;
  holds[2] = static_cast<double>(r_) >= s3_threshold(t);
  if (degrees_) {
    for (const VertexSet& s : degrees_->take_touched()) {
      if (static_cast<double>(degrees_->degree(s)) >= s4_threshold(t, static_cast<int>(s.size()))) holds[3] = true;
    }
  }
  for (std::size_t i = 0; i < 4; ++i) {
    if (holds[i] && !first_[i]) first_[i] = t;
  }
  constexpr std::array<StopReason, 4> order{StopReason::S1, StopReason::S2, StopReason::S3, StopReason::S4};
  for (std::size_t i = 0; i < 4; ++i) {
    if (holds[i] && config_.enabled[i]) return order[i];
  }
  return std::nullopt;
}

}  // namespace jtight
