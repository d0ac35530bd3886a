#pragma once

// Discrete firings of a network: single internal edges, binary send/receive
// pairs and broadcast groups, with select bindings expanded. Shared by the
// zone graph and the simulator.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tachyon/model.hpp"

namespace tachyon {

struct Participant {
  int instance = 0;
  int edge = 0;
  int sel_offset = 0;
  int sel_count = 0;
};

struct Firing {
  int part_offset = 0;
  int part_count = 0;
  bool controllable = false;
  int64_t weight = 1;
};

/// Reusable output buffer.
struct FiringSet {
  std::vector<Firing> firings;
  std::vector<Participant> parts;
  std::vector<int64_t> selects;

  void clear() {
    firings.clear();
    parts.clear();
    selects.clear();
  }
  std::span<const Participant> participants(const Firing& f) const {
    return {parts.data() + f.part_offset, static_cast<std::size_t>(f.part_count)};
  }
  std::span<const int64_t> select_values(const Participant& p) const {
    return {selects.data() + p.sel_offset, static_cast<std::size_t>(p.sel_count)};
  }
};

class Transitions {
 public:
  explicit Transitions(const TANetwork& n);

  const TANetwork& network() const { return net_; }

  /// Appends every firing whose data guards hold at (locs, env), ordered by
  /// initiating instance, edge, then select values. Committed locations
  /// restrict the result to firings that leave one. Throws EvalError.
  void enumerate(std::span<const int> locs, const Env& env, FiringSet& out);

  bool any_committed(std::span<const int> locs) const;
  /// Time may not pass while an urgent or committed location is active.
  bool delay_blocked(std::span<const int> locs) const;

  /// Applies updates in participant order (initiator first) against the
  /// pre-firing locations, then moves every participant to its target.
  void apply(const FiringSet& set, const Firing& f, std::vector<int>& locs, Env& env,
             std::vector<ClockReset>* resets, const std::vector<char>* relevant = nullptr) const;

  /// `Inst:Src->Tgt#n{i=1}` for every participant, joined with ` | `.
  std::string describe(const FiringSet& set, const Firing& f) const;
  /// Key of the initiating edge with its select values.
  std::string action_key(const FiringSet& set, const Firing& f) const;

 private:
  struct Candidate {
    int instance;
    int edge;
    int sel_offset;
    int sel_count;
    int channel;   // flattened id, -1 without sync
    SyncKind kind;
  };

  void collect(std::span<const int> locs, const Env& env);
  void push_firing(FiringSet& out, std::span<const Candidate* const> members, std::span<const int> locs,
                   bool committed) const;

  const TANetwork& net_;
  std::vector<Candidate> cands_;
  std::vector<int64_t> sel_scratch_;
  std::vector<int64_t> cand_selects_;
  std::vector<const Candidate*> group_;
};

}  // namespace tachyon
