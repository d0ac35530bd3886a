#include "tachyon/learner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include <json.hpp>

namespace tachyon {

using nlohmann::json;

Discretization discretization_for(const TANetwork& n, const Query& q, double bin_width) {
  Discretization d;
  for (const auto& name : q.observed_discrete) {
    if (!n.find_slot(name)) throw CompileError(q.span, "observed discrete '" + name + "' must be a variable");
    d.discrete.push_back(name);
  }
  for (const auto& name : q.observed_continuous) {
    if (n.find_slot(name)) d.continuous.push_back({name, bin_width});
    else if (n.find_clock(name)) d.clocks.push_back({name, bin_width});
    else throw CompileError(q.span, "unresolved name '" + name + "'");
  }
  return d;
}

int64_t bin_of(double value, double width) { return static_cast<int64_t>(std::floor(value / width)); }

StateKeyer::StateKeyer(const TANetwork& n, const Discretization& d) {
  for (const auto& name : d.discrete) discrete_.push_back(*n.find_slot(name));
  for (const auto& b : d.continuous) continuous_.emplace_back(*n.find_slot(b.name), b.width);
  for (const auto& b : d.clocks) clocks_.emplace_back(*n.find_clock(b.name), b.width);
}

std::string StateKeyer::key(const ConcreteState& s) const {
  std::string k;
  k.reserve(64);
  char buf[24];
  for (std::size_t i = 0; i < s.locations.size(); ++i) {
    if (i) k += '.';
    std::snprintf(buf, sizeof buf, "%d", s.locations[i]);
    k += buf;
  }
  k += '|';
  for (int slot : discrete_) {
    std::snprintf(buf, sizeof buf, "%lld,", static_cast<long long>(s.env.slots[static_cast<std::size_t>(slot)]));
    k += buf;
  }
  k += '|';
  for (auto [slot, w] : continuous_) {
    auto v = static_cast<double>(s.env.slots[static_cast<std::size_t>(slot)]);
    std::snprintf(buf, sizeof buf, "%lld,", static_cast<long long>(bin_of(v, w)));
    k += buf;
  }
  for (auto [clock, w] : clocks_) {
    std::snprintf(buf, sizeof buf, "c%lld,", static_cast<long long>(bin_of(s.clocks[static_cast<std::size_t>(clock)], w)));
    k += buf;
  }
  return k;
}

double QTable::get(const std::string& state, const std::string& action) const {
  auto r = rows_.find(state);
  if (r == rows_.end()) return 0.0;
  auto a = r->second.find(action);
  return a == r->second.end() ? 0.0 : a->second.q;
}

double QTable::best(const std::string& state, const std::vector<std::string>& actions) const {
  if (actions.empty()) return 0.0;
  double b = -std::numeric_limits<double>::infinity();
  for (const auto& a : actions) b = std::max(b, get(state, a));
  return b;
}

void QTable::update(const std::string& state, const std::string& action, double reward, double best_next,
                    double alpha, double gamma) {
  ActionValue& v = rows_[state][action];
  v.q += alpha * (reward + gamma * best_next - v.q);
  ++v.visits;
}

Strategy extract_strategy(const QTable& q, double tolerance) {
  Strategy s;
  for (const auto& [state, row] : q.rows()) {
    Strategy::Entry e;
    for (const auto& [a, v] : row) e.actions.push_back(a);
    std::sort(e.actions.begin(), e.actions.end());
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& a : e.actions) {
      const ActionValue& v = row.at(a);
      e.q.push_back(v.q);
      e.visits.push_back(v.visits);
      best = std::max(best, v.q);
    }
    for (std::size_t k = 0; k < e.actions.size(); ++k)
      if (e.q[k] >= best - tolerance) e.permitted.push_back(e.actions[k]);
    s.entries.emplace(state, std::move(e));
  }
  return s;
}

std::vector<std::string> strategy_decide(const Strategy& s, const std::string& key,
                                         const std::vector<std::string>& enabled) {
  std::vector<std::string> out;
  auto it = s.entries.find(key);
  if (it == s.entries.end()) return out;
  for (const auto& a : enabled)
    if (std::find(it->second.permitted.begin(), it->second.permitted.end(), a) != it->second.permitted.end())
      out.push_back(a);
  return out;
}

StrategyChooser::StrategyChooser(const TANetwork& n, const Strategy& s) : strat_(s), keyer_(n, s.scheme), trans_(n) {}

std::size_t StrategyChooser::choose(const ConcreteState& s, const FiringSet& set, std::span<const int> controllable,
                                    Rng& rng) {
  ++decisions_;
  std::vector<std::string> enabled;
  enabled.reserve(controllable.size());
  for (int c : controllable) enabled.push_back(trans_.action_key(set, set.firings[static_cast<std::size_t>(c)]));
  std::vector<std::string> ok = strategy_decide(strat_, keyer_.key(s), enabled);
  if (ok.empty()) {
    ++fallbacks_;
    return static_cast<std::size_t>(rng.below(controllable.size()));
  }
  const std::string& pick = ok[rng.below(ok.size())];
  return static_cast<std::size_t>(std::find(enabled.begin(), enabled.end(), pick) - enabled.begin());
}

namespace {

// Epsilon-greedy Q-learning between consecutive decision points; the reward
// is the negated growth of the cost variable since the previous decision.
class LearningChooser : public Chooser {
 public:
  LearningChooser(const TANetwork& n, const Discretization& d, QTable& q, int cost_slot, const LearnConfig& cfg,
                  double discount_time)
      : keyer_(n, d), trans_(n), q_(q), cost_(static_cast<std::size_t>(cost_slot)), cfg_(cfg),
        discount_time_(discount_time) {}

  void begin(double epsilon) {
    epsilon_ = epsilon;
    has_prev_ = false;
  }

  std::size_t choose(const ConcreteState& s, const FiringSet& set, std::span<const int> controllable,
                     Rng& rng) override {
    std::string key = keyer_.key(s);
    enabled_.clear();
    for (int c : controllable) enabled_.push_back(trans_.action_key(set, set.firings[static_cast<std::size_t>(c)]));
    auto cost = static_cast<double>(s.env.slots[cost_]);
    if (has_prev_)
      q_.update(prev_key_, prev_action_, prev_cost_ - cost, q_.best(key, enabled_), cfg_.alpha, discount(s.time));

    std::size_t pick;
    if (rng.uniform() < epsilon_) {
      pick = static_cast<std::size_t>(rng.below(enabled_.size()));
    } else {
      double best = -std::numeric_limits<double>::infinity();
      ties_.clear();
      for (std::size_t k = 0; k < enabled_.size(); ++k) {
        double v = q_.get(key, enabled_[k]);
        if (v > best + 1e-12) {
          best = v;
          ties_.clear();
        }
        if (v >= best - 1e-12) ties_.push_back(k);
      }
      pick = ties_[rng.below(ties_.size())];
    }
    has_prev_ = true;
    prev_key_ = std::move(key);
    prev_action_ = enabled_[pick];
    prev_cost_ = cost;
    prev_time_ = s.time;
    return pick;
  }

  // Per decision, or per elapsed `discount_time` when that is set.
  double discount(double now) const {
    if (discount_time_ <= 0.0) return cfg_.gamma;
    return std::pow(cfg_.gamma, (now - prev_time_) / discount_time_);
  }

  void finish(const ConcreteState& s) {
    if (!has_prev_) return;
    auto cost = static_cast<double>(s.env.slots[cost_]);
    q_.update(prev_key_, prev_action_, prev_cost_ - cost, 0.0, cfg_.alpha, discount(s.time));
    has_prev_ = false;
  }

 private:
  StateKeyer keyer_;
  Transitions trans_;
  QTable& q_;
  std::size_t cost_;
  const LearnConfig& cfg_;
  double discount_time_;
  double epsilon_ = 0.0;
  bool has_prev_ = false;
  std::string prev_key_;
  std::string prev_action_;
  double prev_cost_ = 0.0;
  double prev_time_ = 0.0;
  std::vector<std::string> enabled_;
  std::vector<std::size_t> ties_;
};

}  // namespace

uint64_t model_hash(const TANetwork& n) { return fnv1a(pretty_print(n)); }

Strategy learn_strategy(const TANetwork& n, const Query& q, const LearnConfig& cfg,
                        const std::function<void(int, double)>& on_episode) {
  bool any = false;
  for (const auto& inst : n.instances)
    for (const auto& e : inst.edges) any = any || e.controllable;
  if (!any) throw CompileError(q.span, "model has no decision points");
  auto cost = n.find_slot(q.cost);
  if (!cost) throw CompileError(q.span, "cost '" + q.cost + "' must be an int variable");

  Discretization scheme = discretization_for(n, q, cfg.bin_width);
  SimConfig sc;
  sc.horizon = static_cast<double>(q.horizon);
  sc.seed = cfg.seed;
  sc.default_rate = cfg.default_rate;
  Simulator sim(n, sc);
  QTable table;
  double unit = cfg.discount_time ? *cfg.discount_time : sc.horizon / 1000.0;
  LearningChooser chooser(n, scheme, table, *cost, cfg, unit);

  std::vector<double> curve;
  curve.reserve(static_cast<std::size_t>(std::max(cfg.episodes, 0)));
  double decay = std::max(1.0, cfg.decay_fraction * cfg.episodes);
  for (int ep = 0; ep < cfg.episodes; ++ep) {
    double frac = std::min(1.0, ep / decay);
    chooser.begin(cfg.epsilon_start + (cfg.epsilon_end - cfg.epsilon_start) * frac);
    Rng rng = Rng::for_run(cfg.seed, static_cast<uint64_t>(ep));
    Trace t = sim.run(rng, &chooser);
    if (t.reason == StopReason::Error) throw EvalError(t.error);
    chooser.finish(t.final_state);
    curve.push_back(static_cast<double>(t.final_state.env.slots[static_cast<std::size_t>(*cost)]));
    if (on_episode) on_episode(ep, curve.back());
  }

  Strategy s = extract_strategy(table);
  s.name = q.name.empty() ? "S" : q.name;
  s.model_hash = model_hash(n);
  s.cost = q.cost;
  s.scheme = std::move(scheme);
  s.config = cfg;
  s.curve = std::move(curve);
  return s;
}

namespace {

json binned_json(const std::vector<Discretization::Binned>& v) {
  json a = json::array();
  for (const auto& b : v) a.push_back({{"name", b.name}, {"width", b.width}});
  return a;
}

std::vector<Discretization::Binned> binned_from(const json& a) {
  std::vector<Discretization::Binned> v;
  for (const auto& b : a) v.push_back({b.at("name").get<std::string>(), b.at("width").get<double>()});
  return v;
}

std::string hex(uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace

std::string export_strategy(const Strategy& s) {
  json entries = json::array();
  for (const auto& [key, e] : s.entries) {
    json acts = json::array();
    for (std::size_t k = 0; k < e.actions.size(); ++k)
      acts.push_back({{"action", e.actions[k]}, {"q", e.q[k]}, {"visits", e.visits[k]}});
    entries.push_back({{"key", key}, {"actions", acts}, {"permitted", e.permitted}});
  }
  const LearnConfig& c = s.config;
  json j{{"version", 1},
         {"name", s.name},
         {"model_hash", hex(s.model_hash)},
         {"cost", s.cost},
         {"scheme",
          {{"discrete", s.scheme.discrete},
           {"continuous", binned_json(s.scheme.continuous)},
           {"clocks", binned_json(s.scheme.clocks)}}},
         {"config",
          {{"episodes", c.episodes},
           {"alpha", c.alpha},
           {"gamma", c.gamma},
           {"epsilon_start", c.epsilon_start},
           {"epsilon_end", c.epsilon_end},
           {"decay_fraction", c.decay_fraction},
           {"bin_width", c.bin_width},
           {"seed", c.seed},
           {"default_rate", c.default_rate},
           {"discount_time", c.discount_time ? json(*c.discount_time) : json(nullptr)}}},
         {"entries", entries},
         {"curve", s.curve}};
  return j.dump(1);
}

Strategy import_strategy(const std::string& text, uint64_t expected_hash) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("malformed strategy: ") + e.what());
  }
  try {
    if (j.at("version").get<int>() != 1) throw std::runtime_error("unsupported strategy version");
    Strategy s;
    s.name = j.at("name").get<std::string>();
    s.model_hash = std::stoull(j.at("model_hash").get<std::string>(), nullptr, 16);
    if (expected_hash != 0 && s.model_hash != expected_hash)
      throw std::runtime_error("model hash mismatch: strategy was learned on a different model");
    s.cost = j.at("cost").get<std::string>();
    const json& sc = j.at("scheme");
    s.scheme.discrete = sc.at("discrete").get<std::vector<std::string>>();
    s.scheme.continuous = binned_from(sc.at("continuous"));
    s.scheme.clocks = binned_from(sc.at("clocks"));
    const json& c = j.at("config");
    s.config.episodes = c.at("episodes").get<int>();
    s.config.alpha = c.at("alpha").get<double>();
    s.config.gamma = c.at("gamma").get<double>();
    s.config.epsilon_start = c.at("epsilon_start").get<double>();
    s.config.epsilon_end = c.at("epsilon_end").get<double>();
    s.config.decay_fraction = c.at("decay_fraction").get<double>();
    s.config.bin_width = c.at("bin_width").get<double>();
    s.config.seed = c.at("seed").get<uint64_t>();
    s.config.default_rate = c.at("default_rate").get<double>();
    if (!c.at("discount_time").is_null()) s.config.discount_time = c.at("discount_time").get<double>();
    for (const auto& e : j.at("entries")) {
      Strategy::Entry en;
      for (const auto& a : e.at("actions")) {
        en.actions.push_back(a.at("action").get<std::string>());
        en.q.push_back(a.at("q").get<double>());
        en.visits.push_back(a.at("visits").get<uint64_t>());
      }
      en.permitted = e.at("permitted").get<std::vector<std::string>>();
      s.entries.emplace(e.at("key").get<std::string>(), std::move(en));
    }
    s.curve = j.at("curve").get<std::vector<double>>();
    return s;
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("malformed strategy: ") + e.what());
  }
}

}  // namespace tachyon
