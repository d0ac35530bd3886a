#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "tachyon/parser.hpp"
#include "tachyon/sim.hpp"

namespace tachyon {

/// Observation abstraction for the learner's state key.
struct Discretization {
  struct Binned {
    std::string name;
    double width = 1.0;

    bool operator==(const Binned&) const = default;
  };
  std::vector<std::string> discrete;   // exact values
  std::vector<Binned> continuous;      // floor(value / width)
  std::vector<Binned> clocks;          // optional clock bins

  bool operator==(const Discretization&) const = default;
};

/// Builds the scheme from a strategy query's observation lists. Names in the
/// continuous list may be variables or clocks. Throws CompileError.
Discretization discretization_for(const TANetwork& n, const Query& q, double bin_width = 1.0);

/// Bin index of a continuous value.
int64_t bin_of(double value, double width);

/// Resolved form used on the hot path.
class StateKeyer {
 public:
  StateKeyer(const TANetwork& n, const Discretization& d);
  std::string key(const ConcreteState& s) const;

 private:
  std::vector<int> discrete_;
  std::vector<std::pair<int, double>> continuous_;
  std::vector<std::pair<int, double>> clocks_;
};

struct ActionValue {
  double q = 0.0;
  uint64_t visits = 0;
};

class QTable {
 public:
  using Row = std::unordered_map<std::string, ActionValue>;

  double get(const std::string& state, const std::string& action) const;
  /// Largest Q over `actions` (0 for unseen pairs); 0 when empty.
  double best(const std::string& state, const std::vector<std::string>& actions) const;
  /// Q += alpha * (reward + gamma * best_next - Q).
  void update(const std::string& state, const std::string& action, double reward, double best_next, double alpha,
              double gamma);

  const std::unordered_map<std::string, Row>& rows() const { return rows_; }
  std::unordered_map<std::string, Row>& rows() { return rows_; }

 private:
  std::unordered_map<std::string, Row> rows_;
};

struct LearnConfig {
  int episodes = 2000;
  double alpha = 0.1;
  double gamma = 0.99;
  // gamma applies once per this much elapsed model time; unset means
  // horizon / 1000, zero or negative means once per decision.
  std::optional<double> discount_time;
  double epsilon_start = 0.3;
  double epsilon_end = 0.01;
  double decay_fraction = 0.8;   // share of episodes over which epsilon decays
  double bin_width = 1.0;
  uint64_t seed = 0;
  double default_rate = 1e-3;
};

/// Memoryless strategy: per state key, the permitted controllable actions.
struct Strategy {
  struct Entry {
    std::vector<std::string> actions;   // every action seen, sorted
    std::vector<double> q;
    std::vector<uint64_t> visits;
    std::vector<std::string> permitted;
  };

  std::string name = "S";
  uint64_t model_hash = 0;
  std::string cost;
  Discretization scheme;
  std::map<std::string, Entry> entries;
  LearnConfig config;
  std::vector<double> curve;            // cost at horizon per episode
};

/// Builds the strategy from a Q table: permitted = argmax set.
Strategy extract_strategy(const QTable& q, double tolerance = 1e-9);

/// Strategy-guided chooser. Unknown states or empty intersections fall back
/// to a uniform choice and are counted.
class StrategyChooser : public Chooser {
 public:
  StrategyChooser(const TANetwork& n, const Strategy& s);
  std::size_t choose(const ConcreteState& s, const FiringSet& set, std::span<const int> controllable,
                     Rng& rng) override;
  uint64_t decisions() const { return decisions_; }
  uint64_t fallbacks() const { return fallbacks_; }

 private:
  const Strategy& strat_;
  StateKeyer keyer_;
  Transitions trans_;
  uint64_t decisions_ = 0;
  uint64_t fallbacks_ = 0;
};

/// Permitted actions at `key` intersected with `enabled`; empty when the
/// state is unknown.
std::vector<std::string> strategy_decide(const Strategy& s, const std::string& key,
                                         const std::vector<std::string>& enabled);

/// Learns a cost-minimizing strategy for a StrategyMin query (resolved).
/// Throws CompileError when the model has no controllable edges.
/// `on_episode`, when set, receives (episode, cost at horizon).
Strategy learn_strategy(const TANetwork& n, const Query& q, const LearnConfig& cfg,
                        const std::function<void(int, double)>& on_episode = {});

uint64_t model_hash(const TANetwork& n);

std::string export_strategy(const Strategy& s);
/// Throws std::runtime_error on malformed input or, when `expected_hash` is
/// non-zero, on a model hash mismatch.
Strategy import_strategy(const std::string& json, uint64_t expected_hash = 0);

}  // namespace tachyon
