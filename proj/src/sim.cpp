#include "tachyon/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace tachyon {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Strict bounds are approached this far (ms) when a delay is aligned to them.
constexpr double kStrictMargin = 1e-3;

}  // namespace

uint64_t Rng::splitmix(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

double Rng::exponential(double rate) { return -std::log1p(-uniform()) / rate; }

uint64_t Rng::below(uint64_t n) {
  if (n <= 1) return 0;
  uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  uint64_t x;
  do x = next();
  while (x >= limit);
  return x % n;
}

std::size_t Rng::weighted(std::span<const int64_t> weights) {
  uint64_t total = 0;
  for (int64_t w : weights) total += static_cast<uint64_t>(w);
  uint64_t r = below(total);
  for (std::size_t k = 0; k < weights.size(); ++k) {
    auto w = static_cast<uint64_t>(weights[k]);
    if (r < w) return k;
    r -= w;
  }
  return weights.size() - 1;
}

std::string_view to_string(StopReason r) {
  switch (r) {
    case StopReason::Horizon: return "horizon";
    case StopReason::Deadlock: return "deadlock";
    case StopReason::Error: return "error";
  }
  return "?";
}

Simulator::Simulator(const TANetwork& n, SimConfig cfg) : net_(n), cfg_(cfg), trans_(n) {}

EnabledActions Simulator::enabled_actions(const ConcreteState& s) {
  EnabledActions out;
  set_.clear();
  trans_.enumerate(s.locations, s.env, set_);
  for (const Firing& f : set_.firings) {
    Window w;
    if (!window_of(f, s, w) || w.lo > kClockEpsilon) continue;
    if (f.controllable) {
      out.controllable.push_back(trans_.action_key(set_, f));
    } else {
      out.uncontrollable.push_back(trans_.action_key(set_, f));
      out.uncontrollable_weights.push_back(f.weight);
    }
  }
  return out;
}

double Simulator::max_delay(const ConcreteState& s) const {
  double d = kInf;
  for (std::size_t i = 0; i < s.locations.size(); ++i) {
    const Location& loc = net_.instances[i].locations[static_cast<std::size_t>(s.locations[i])];
    for (const auto& c : loc.invariant)
      d = std::min(d, static_cast<double>(bound_value(c.bound)) - s.clocks[static_cast<std::size_t>(c.i)]);
  }
  return std::max(d, 0.0);
}

bool Simulator::invariants_hold(const ConcreteState& s) const {
  for (std::size_t i = 0; i < s.locations.size(); ++i) {
    const Location& loc = net_.instances[i].locations[static_cast<std::size_t>(s.locations[i])];
    for (const auto& c : loc.invariant)
      if (s.clocks[static_cast<std::size_t>(c.i)] > static_cast<double>(bound_value(c.bound)) + kClockEpsilon)
        return false;
  }
  return true;
}

// Delays d >= 0 at which every clock constraint of the firing holds.
bool Simulator::window_of(const Firing& f, const ConcreteState& s, Window& w) const {
  w = {0.0, kInf};
  for (const Participant& p : set_.participants(f)) {
    const Edge& e = net_.instances[static_cast<std::size_t>(p.instance)].edges[static_cast<std::size_t>(p.edge)];
    for (const auto& c : e.clock_guard) {
      double v = static_cast<double>(bound_value(c.bound));
      bool strict = bound_strict(c.bound);
      double xi = s.clocks[static_cast<std::size_t>(c.i)];
      double xj = s.clocks[static_cast<std::size_t>(c.j)];
      if (c.i != 0 && c.j != 0) {
        double diff = xi - xj;
        if (diff > v + kClockEpsilon || (strict && diff >= v)) return false;
      } else if (c.j == 0) {
        w.hi = std::min(w.hi, v - xi - (strict ? kStrictMargin : 0.0));
      } else {
        w.lo = std::max(w.lo, -v - xj + (strict ? kStrictMargin : 0.0));
      }
    }
  }
  return w.lo <= w.hi + kClockEpsilon;
}

double Simulator::draw(const ConcreteState& s, double dmax, Rng& rng) const {
  if (std::isfinite(dmax)) return rng.uniform() * dmax;
  double weight = 0.0;
  for (std::size_t i = 0; i < s.locations.size(); ++i)
    weight += static_cast<double>(net_.instances[i].locations[static_cast<std::size_t>(s.locations[i])].exit_weight);
  return rng.exponential(cfg_.default_rate * weight);
}

double Simulator::sample_delay(const ConcreteState& s, Rng& rng) {
  if (trans_.delay_blocked(s.locations)) return 0.0;
  return draw(s, max_delay(s), rng);
}

Simulator::Step Simulator::step(ConcreteState& s, Rng& rng, Chooser* chooser, TraceEvent* ev) {
  set_.clear();
  trans_.enumerate(s.locations, s.env, set_);
  std::size_t nf = set_.firings.size();
  windows_.resize(nf);
  feasible_.assign(nf, 0);

  bool blocked = trans_.delay_blocked(s.locations);
  double dmax = blocked ? 0.0 : max_delay(s);
  for (std::size_t k = 0; k < nf; ++k) {
    Window& w = windows_[k];
    if (!window_of(set_.firings[k], s, w)) continue;
    if (w.lo > dmax + kClockEpsilon) continue;
    w.hi = std::min(w.hi, dmax);
    feasible_[k] = 1;
  }

  double d = 0.0;
  if (!blocked) {
    d = draw(s, dmax, rng);
    bool inside = false;
    double fwd = kInf;
    double back = -1.0;
    for (std::size_t k = 0; k < nf; ++k) {
      if (!feasible_[k]) continue;
      const Window& w = windows_[k];
      if (d >= w.lo - kClockEpsilon && d <= w.hi + kClockEpsilon) {
        inside = true;
        break;
      }
      if (w.lo > d) fwd = std::min(fwd, w.lo);
      else back = std::max(back, w.hi);
    }
    if (!inside) {
      if (fwd < kInf) d = fwd;
      else if (back >= 0.0) d = back;
      else d = dmax;   // nothing can fire before the invariants expire
    }
  }

  auto advance = [&](double by) {
    for (std::size_t c = 1; c < s.clocks.size(); ++c) s.clocks[c] += by;
    s.time += by;
  };
  double left = cfg_.horizon - s.time;
  if (d > left + kClockEpsilon || !std::isfinite(d)) {
    advance(std::max(left, 0.0));
    if (ev) *ev = TraceEvent{s.time, std::max(left, 0.0), "horizon", "", {}};
    return Step::Horizon;
  }
  advance(d);

  candidates_.clear();
  for (std::size_t k = 0; k < nf; ++k)
    if (feasible_[k] && d >= windows_[k].lo - kClockEpsilon && d <= windows_[k].hi + kClockEpsilon)
      candidates_.push_back(static_cast<int>(k));

  while (!candidates_.empty()) {
    controllable_.clear();
    if (chooser)
      for (int c : candidates_)
        if (set_.firings[static_cast<std::size_t>(c)].controllable) controllable_.push_back(c);
    std::size_t pick;
    if (!controllable_.empty()) {
      int chosen = controllable_[chooser->choose(s, set_, controllable_, rng)];
      pick = static_cast<std::size_t>(std::find(candidates_.begin(), candidates_.end(), chosen) - candidates_.begin());
    } else {
      weights_.clear();
      for (int c : candidates_) weights_.push_back(set_.firings[static_cast<std::size_t>(c)].weight);
      pick = rng.weighted(weights_);
    }
    const Firing& f = set_.firings[static_cast<std::size_t>(candidates_[pick])];

    scratch_.locations = s.locations;
    scratch_.env.slots = s.env.slots;
    scratch_.clocks = s.clocks;
    scratch_.time = s.time;
    resets_.clear();
    trans_.apply(set_, f, scratch_.locations, scratch_.env, &resets_);
    for (const auto& r : resets_) scratch_.clocks[static_cast<std::size_t>(r.clock)] = static_cast<double>(r.value);
    if (!invariants_hold(scratch_)) {
      candidates_.erase(candidates_.begin() + static_cast<std::ptrdiff_t>(pick));
      continue;
    }
    if (ev) {
      ev->time = s.time;
      ev->delay = d;
      ev->kind = "fire";
      ev->action = trans_.describe(set_, f);
      ev->env_diff.clear();
      for (std::size_t v = 0; v < s.env.slots.size(); ++v)
        if (s.env.slots[v] != scratch_.env.slots[v]) ev->env_diff.emplace_back(net_.slots[v].name, scratch_.env.slots[v]);
    }
    std::swap(s, scratch_);
    return Step::Fired;
  }
  if (ev) *ev = TraceEvent{s.time, d, "deadlock", "", {}};
  return Step::Deadlock;
}

EstimateStats summarize(std::vector<double> values) {
  EstimateStats st;
  st.values = std::move(values);
  std::size_t n = st.values.size();
  if (n == 0) {
    st.degenerate_ci = true;
    return st;
  }
  double sum = 0.0;
  st.min = st.max = st.values[0];
  for (double v : st.values) {
    sum += v;
    st.min = std::min(st.min, v);
    st.max = std::max(st.max, v);
  }
  st.mean = sum / static_cast<double>(n);
  if (n < 2) {
    st.degenerate_ci = true;
    return st;
  }
  double ss = 0.0;
  for (double v : st.values) ss += (v - st.mean) * (v - st.mean);
  double sd = std::sqrt(ss / static_cast<double>(n - 1));
  st.ci95 = 1.96 * sd / std::sqrt(static_cast<double>(n));
  return st;
}

EstimateStats estimate(const TANetwork& n, const Expr& value, const SimConfig& cfg,
                       const std::function<std::unique_ptr<Chooser>()>& chooser_for) {
  std::size_t runs = static_cast<std::size_t>(std::max(cfg.runs, 0));
  std::vector<double> values(runs, 0.0);
  std::vector<char> status(runs, 0);   // 1 deadlock, 2 error

  auto worker = [&](std::size_t first, std::size_t stride) {
    Simulator sim(n, cfg);
    std::unique_ptr<Chooser> chooser = chooser_for ? chooser_for() : nullptr;
    for (std::size_t r = first; r < runs; r += stride) {
      Rng rng = Rng::for_run(cfg.seed, r);
      double best = -kInf;
      auto observe = [&](const ConcreteState& s) {
        EvalContext ctx{s.env.slots, {}, s.locations, s.clocks};
        best = std::max(best, static_cast<double>(eval_int(value, ctx)));
      };
      Trace t = sim.run(rng, chooser.get(), observe);
      values[r] = best;
      if (t.reason == StopReason::Deadlock) status[r] = 1;
      if (t.reason == StopReason::Error) status[r] = 2;
    }
  };

  auto threads = static_cast<std::size_t>(std::clamp(cfg.threads, 1, 256));
  threads = std::min(threads, std::max<std::size_t>(runs, 1));
  if (threads == 1) {
    worker(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker, t, threads);
    for (auto& th : pool) th.join();
  }

  EstimateStats st = summarize(std::move(values));
  for (char c : status) {
    if (c == 1) ++st.deadlocks;
    if (c == 2) ++st.errors;
  }
  return st;
}

std::string trace_jsonl(const Trace& t) {
  std::ostringstream os;
  for (const auto& e : t.events) {
    nlohmann::json j{{"time", e.time}, {"delay", e.delay}, {"kind", e.kind}};
    if (!e.action.empty()) j["action"] = e.action;
    if (!e.env_diff.empty()) {
      nlohmann::json d = nlohmann::json::object();
      for (const auto& [k, v] : e.env_diff) d[k] = v;
      j["env"] = d;
    }
    os << j.dump() << '\n';
  }
  nlohmann::json end{{"kind", "end"}, {"reason", std::string(to_string(t.reason))}, {"time", t.final_state.time},
                     {"steps", t.steps}};
  if (!t.error.empty()) end["error"] = t.error;
  os << end.dump() << '\n';
  return os.str();
}

}  // namespace tachyon
