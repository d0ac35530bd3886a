#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tachyon/model.hpp"
#include "tachyon/parser.hpp"
#include "tachyon/transitions.hpp"

namespace tachyon {

/// Seedable generator with portable derived distributions. Each run gets an
/// independent stream derived from (seed, run index).
class Rng {
 public:
  explicit Rng(uint64_t seed = 0) : engine_(splitmix(seed)) {}

  static Rng for_run(uint64_t seed, uint64_t run) { return Rng(splitmix(seed) ^ splitmix(run + 0x632be59bd9b4e019ull)); }
  static uint64_t splitmix(uint64_t x);

  uint64_t next() { return engine_(); }
  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double exponential(double rate);
  /// Uniform integer in [0, n).
  uint64_t below(uint64_t n);
  /// Index drawn proportionally to `weights`.
  std::size_t weighted(std::span<const int64_t> weights);

 private:
  std::mt19937_64 engine_;
};

struct SimConfig {
  double horizon = 0.0;          // ms
  uint64_t seed = 0;
  double default_rate = 1e-3;    // per ms, for locations without invariants
  int runs = 1;
  int threads = 1;
  bool record = false;           // keep a full event trace
  uint64_t max_steps = 200'000'000;
};

enum class StopReason { Horizon, Deadlock, Error };

std::string_view to_string(StopReason r);

struct TraceEvent {
  double time = 0.0;
  double delay = 0.0;
  std::string kind;      // init, fire, horizon, deadlock, error
  std::string action;
  std::vector<std::pair<std::string, int64_t>> env_diff;
};

struct Trace {
  std::vector<TraceEvent> events;
  StopReason reason = StopReason::Horizon;
  std::string error;
  ConcreteState final_state;
  uint64_t steps = 0;
};

/// Picks among enabled controllable firings; consulted only when at least
/// one is enabled.
class Chooser {
 public:
  virtual ~Chooser() = default;
  virtual std::size_t choose(const ConcreteState& s, const FiringSet& set, std::span<const int> controllable,
                             Rng& rng) = 0;
};

struct EnabledActions {
  std::vector<std::string> controllable;
  std::vector<std::string> uncontrollable;
  std::vector<int64_t> uncontrollable_weights;
};

class Simulator {
 public:
  Simulator(const TANetwork& n, SimConfig cfg);

  const TANetwork& network() const { return net_; }
  const SimConfig& config() const { return cfg_; }
  Transitions& transitions() { return trans_; }

  ConcreteState initial() const { return initial_concrete_state(net_); }

  /// Firings enabled without delay, split by controllability of the
  /// initiating edge.
  EnabledActions enabled_actions(const ConcreteState& s);

  /// Raw delay draw (before alignment with guard windows). Zero when an
  /// urgent or committed location is active.
  double sample_delay(const ConcreteState& s, Rng& rng);

  enum class Step { Fired, Horizon, Deadlock };

  /// One delay-then-fire step. Throws EvalError on run-time faults.
  Step step(ConcreteState& s, Rng& rng, Chooser* chooser, TraceEvent* ev = nullptr);

  /// Steps until the horizon or a deadlock. `observe` runs after every step.
  template <class Observe>
  Trace run(Rng& rng, Chooser* chooser, Observe&& observe);
  Trace run(Rng& rng, Chooser* chooser = nullptr) {
    return run(rng, chooser, [](const ConcreteState&) {});
  }

  /// Upper bound on the delay allowed by active invariants (infinity if none).
  double max_delay(const ConcreteState& s) const;
  /// True if every active invariant holds (with clock tolerance).
  bool invariants_hold(const ConcreteState& s) const;

 private:
  struct Window {
    double lo;
    double hi;
  };
  bool window_of(const Firing& f, const ConcreteState& s, Window& w) const;
  double draw(const ConcreteState& s, double dmax, Rng& rng) const;

  const TANetwork& net_;
  SimConfig cfg_;
  Transitions trans_;
  FiringSet set_;
  std::vector<Window> windows_;
  std::vector<char> feasible_;
  std::vector<int> candidates_;
  std::vector<int> controllable_;
  std::vector<int64_t> weights_;
  std::vector<ClockReset> resets_;
  ConcreteState scratch_;
};

template <class Observe>
Trace Simulator::run(Rng& rng, Chooser* chooser, Observe&& observe) {
  Trace tr;
  ConcreteState s = initial();
  if (cfg_.record) tr.events.push_back(TraceEvent{0.0, 0.0, "init", "", {}});
  observe(s);
  if (cfg_.horizon <= 0.0) {
    tr.final_state = std::move(s);
    return tr;
  }
  try {
    while (true) {
      if (tr.steps >= cfg_.max_steps) {
        tr.reason = StopReason::Error;
        tr.error = "step limit exceeded";
        break;
      }
      TraceEvent ev;
      Step r = step(s, rng, chooser, cfg_.record ? &ev : nullptr);
      ++tr.steps;
      if (cfg_.record) tr.events.push_back(std::move(ev));
      if (r == Step::Horizon) {
        tr.reason = StopReason::Horizon;
        break;
      }
      if (r == Step::Deadlock) {
        tr.reason = StopReason::Deadlock;
        break;
      }
      observe(s);
    }
  } catch (const EvalError& e) {
    tr.reason = StopReason::Error;
    tr.error = e.what();
    if (cfg_.record) tr.events.push_back(TraceEvent{s.time, 0.0, "error", e.what(), {}});
  }
  tr.final_state = std::move(s);
  return tr;
}

struct EstimateStats {
  std::vector<double> values;   // per-run maxima
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  double ci95 = 0.0;            // half-width, normal approximation
  bool degenerate_ci = false;   // fewer than two runs
  uint64_t deadlocks = 0;
  uint64_t errors = 0;
};

EstimateStats summarize(std::vector<double> values);

/// Runs `cfg.runs` simulations (fanned out over `cfg.threads`) and records
/// the maximum of `value` along each. `chooser_for` builds one chooser per
/// worker; null means unguided.
EstimateStats estimate(const TANetwork& n, const Expr& value, const SimConfig& cfg,
                       const std::function<std::unique_ptr<Chooser>()>& chooser_for = {});

/// JSON-lines rendering of a trace.
std::string trace_jsonl(const Trace& t);

}  // namespace tachyon
