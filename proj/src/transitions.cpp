#include "tachyon/transitions.hpp"

namespace tachyon {

Transitions::Transitions(const TANetwork& n) : net_(n) {}

bool Transitions::any_committed(std::span<const int> locs) const {
  for (std::size_t i = 0; i < locs.size(); ++i)
    if (net_.instances[i].locations[static_cast<std::size_t>(locs[i])].committed()) return true;
  return false;
}

bool Transitions::delay_blocked(std::span<const int> locs) const {
  for (std::size_t i = 0; i < locs.size(); ++i)
    if (net_.instances[i].locations[static_cast<std::size_t>(locs[i])].urgent()) return true;
  return false;
}

void Transitions::collect(std::span<const int> locs, const Env& env) {
  cands_.clear();
  cand_selects_.clear();
  for (std::size_t i = 0; i < net_.instances.size(); ++i) {
    const Instance& inst = net_.instances[i];
    const Location& loc = inst.locations[static_cast<std::size_t>(locs[i])];
    for (int eid : loc.out) {
      const Edge& e = inst.edges[static_cast<std::size_t>(eid)];
      const std::size_t ns = e.selects.size();
      sel_scratch_.resize(ns);
      for (std::size_t k = 0; k < ns; ++k) sel_scratch_[k] = e.selects[k].lo;
      while (true) {
        EvalContext ctx{env.slots, sel_scratch_, locs, {}};
        if (!e.has_data_guard || eval_bool(e.data_guard, ctx)) {
          int channel = -1;
          if (e.sync != SyncKind::None) {
            const Channel& ch = net_.channels[static_cast<std::size_t>(e.channel)];
            int64_t idx = 0;
            if (ch.length > 0) {
              idx = eval_int(e.channel_index, ctx);
              if (idx < 0 || idx >= ch.length) throw EvalError("channel index out of range");
            }
            channel = ch.base + static_cast<int>(idx);
          }
          Candidate c{static_cast<int>(i), eid, static_cast<int>(cand_selects_.size()), static_cast<int>(ns),
                      channel, e.sync};
          cand_selects_.insert(cand_selects_.end(), sel_scratch_.begin(), sel_scratch_.end());
          cands_.push_back(c);
        }
        // Odometer over select ranges, last select varying fastest.
        bool advanced = false;
        for (std::size_t k = ns; k-- > 0;) {
          if (sel_scratch_[k] < e.selects[k].hi) {
            ++sel_scratch_[k];
            for (std::size_t r = k + 1; r < ns; ++r) sel_scratch_[r] = e.selects[r].lo;
            advanced = true;
            break;
          }
        }
        if (!advanced) break;
      }
    }
  }
}

void Transitions::push_firing(FiringSet& out, std::span<const Candidate* const> members, std::span<const int> locs,
                              bool committed) const {
  if (committed) {
    bool ok = false;
    for (const Candidate* c : members) {
      const Instance& inst = net_.instances[static_cast<std::size_t>(c->instance)];
      if (inst.locations[static_cast<std::size_t>(locs[static_cast<std::size_t>(c->instance)])].committed()) {
        ok = true;
        break;
      }
    }
    if (!ok) return;
  }
  Firing f;
  f.part_offset = static_cast<int>(out.parts.size());
  f.part_count = static_cast<int>(members.size());
  const Candidate* init = members[0];
  const Edge& e = net_.instances[static_cast<std::size_t>(init->instance)].edges[static_cast<std::size_t>(init->edge)];
  f.controllable = e.controllable;
  f.weight = e.weight;
  for (const Candidate* c : members) {
    Participant p{c->instance, c->edge, static_cast<int>(out.selects.size()), c->sel_count};
    for (int k = 0; k < c->sel_count; ++k) out.selects.push_back(cand_selects_[static_cast<std::size_t>(c->sel_offset + k)]);
    out.parts.push_back(p);
  }
  out.firings.push_back(f);
}

void Transitions::enumerate(std::span<const int> locs, const Env& env, FiringSet& out) {
  collect(locs, env);
  const bool committed = any_committed(locs);
  for (const Candidate& c : cands_) {
    if (c.kind == SyncKind::None) {
      const Candidate* m[] = {&c};
      push_firing(out, m, locs, committed);
      continue;
    }
    if (c.kind != SyncKind::Send) continue;
    const Edge& e = net_.instances[static_cast<std::size_t>(c.instance)].edges[static_cast<std::size_t>(c.edge)];
    const Channel& ch = net_.channels[static_cast<std::size_t>(e.channel)];
    if (!ch.broadcast) {
      for (const Candidate& r : cands_) {
        if (r.kind != SyncKind::Receive || r.channel != c.channel || r.instance == c.instance) continue;
        const Candidate* m[] = {&c, &r};
        push_firing(out, m, locs, committed);
      }
      continue;
    }
    // Broadcast: every instance with an enabled receiver joins; instances
    // with several enabled receivers contribute one firing per choice.
    std::vector<std::vector<const Candidate*>> groups;
    int last = -1;
    for (const Candidate& r : cands_) {
      if (r.kind != SyncKind::Receive || r.channel != c.channel || r.instance == c.instance) continue;
      if (r.instance != last) {
        groups.emplace_back();
        last = r.instance;
      }
      groups.back().push_back(&r);
    }
    std::vector<std::size_t> pick(groups.size(), 0);
    while (true) {
      group_.clear();
      group_.push_back(&c);
      for (std::size_t g = 0; g < groups.size(); ++g) group_.push_back(groups[g][pick[g]]);
      push_firing(out, group_, locs, committed);
      std::size_t g = groups.size();
      bool done = true;
      while (g > 0) {
        --g;
        if (++pick[g] < groups[g].size()) {
          done = false;
          break;
        }
        pick[g] = 0;
      }
      if (done) break;
    }
  }
}

void Transitions::apply(const FiringSet& set, const Firing& f, std::vector<int>& locs, Env& env,
                        std::vector<ClockReset>* resets, const std::vector<char>* relevant) const {
  for (const Participant& p : set.participants(f)) {
    const Edge& e = net_.instances[static_cast<std::size_t>(p.instance)].edges[static_cast<std::size_t>(p.edge)];
    if (e.update.empty()) continue;
    ExecContext ctx{set.select_values(p), locs, net_.macros, relevant};
    exec_update(e.update, env, ctx, resets);
  }
  for (const Participant& p : set.participants(f)) {
    const Edge& e = net_.instances[static_cast<std::size_t>(p.instance)].edges[static_cast<std::size_t>(p.edge)];
    locs[static_cast<std::size_t>(p.instance)] = e.target;
  }
}

namespace {

std::string participant_label(const TANetwork& n, const FiringSet& set, const Participant& p) {
  const Instance& inst = n.instances[static_cast<std::size_t>(p.instance)];
  const Edge& e = inst.edges[static_cast<std::size_t>(p.edge)];
  std::string s = inst.name + ":" + e.label;
  auto vals = set.select_values(p);
  if (!vals.empty()) {
    s += "{";
    for (std::size_t k = 0; k < vals.size(); ++k) {
      if (k) s += ",";
      s += e.selects[k].name + "=" + std::to_string(vals[k]);
    }
    s += "}";
  }
  return s;
}

}  // namespace

std::string Transitions::describe(const FiringSet& set, const Firing& f) const {
  std::string s;
  for (const Participant& p : set.participants(f)) {
    if (!s.empty()) s += " | ";
    s += participant_label(net_, set, p);
  }
  return s;
}

std::string Transitions::action_key(const FiringSet& set, const Firing& f) const {
  return participant_label(net_, set, set.participants(f)[0]);
}

}  // namespace tachyon
