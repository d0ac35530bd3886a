#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace tachyon {

/// Encoded bound: (value << 1) | (non-strict ? 1 : 0). Ordered like the bounds
/// themselves, so plain integer comparison is the bound order.
using raw_t = int64_t;

inline constexpr raw_t kInfinity = INT64_MAX / 4;
inline constexpr raw_t kLeZero = 1;

constexpr raw_t bound_le(int64_t v) { return (v * 2) | 1; }
constexpr raw_t bound_lt(int64_t v) { return v * 2; }
constexpr int64_t bound_value(raw_t b) { return b >> 1; }
constexpr bool bound_strict(raw_t b) { return (b & 1) == 0; }

constexpr raw_t bound_add(raw_t a, raw_t b) {
  if (a == kInfinity || b == kInfinity) return kInfinity;
  return (((a >> 1) + (b >> 1)) * 2) | (a & b & 1);
}

/// Negated complement: the bound satisfied exactly where `b` is violated,
/// read for the transposed entry. (x - y < v) fails iff (y - x <= -v).
constexpr raw_t bound_negate(raw_t b) { return bound_strict(b) ? bound_le(-bound_value(b)) : bound_lt(-bound_value(b)); }

std::string bound_to_string(raw_t b);

/// x_i - x_j bounded by `bound`; index 0 is the reference clock.
struct Constraint {
  int i = 0;
  int j = 0;
  raw_t bound = kInfinity;

  bool operator==(const Constraint&) const = default;
};

enum class Relation { Equal, Subset, Superset, Incomparable };

/// Difference-bound matrix over clocks 1..dim-1.
class Dbm {
 public:
  Dbm() = default;
  /// Zone where every clock is zero.
  explicit Dbm(int dim);

  static Dbm zero(int dim) { return Dbm(dim); }
  /// All non-negative valuations.
  static Dbm universe(int dim);
  /// Unconstrained matrix (diagonal zero, everything else infinite); callers
  /// fill entries and canonicalize.
  static Dbm unconstrained(int dim);

  int dim() const { return n_; }
  raw_t at(int i, int j) const { return m_[static_cast<std::size_t>(i * n_ + j)]; }
  void set(int i, int j, raw_t b) { m_[static_cast<std::size_t>(i * n_ + j)] = b; }

  bool empty() const { return empty_; }
  void mark_empty() { empty_ = true; }

  /// Floyd-Warshall closure; returns false (and marks empty) on a negative cycle.
  bool canonicalize();
  bool is_canonical() const;

  void up();
  /// Intersects with x_i - x_j ~ b, keeping canonical form in O(n^2).
  bool constrain(int i, int j, raw_t b);
  bool constrain(const Constraint& c) { return constrain(c.i, c.j, c.bound); }
  void reset(int x, int64_t value);
  void extrapolate(std::span<const int64_t> max_constants);

  Relation relation(const Dbm& other) const;
  bool includes(const Dbm& other) const;

  bool contains(std::span<const int64_t> point) const;
  /// Real-valued membership, with `eps` slack on every bound.
  bool contains(std::span<const double> point, double eps) const;

  bool operator==(const Dbm& o) const { return n_ == o.n_ && empty_ == o.empty_ && (empty_ || m_ == o.m_); }

  std::string to_string(const std::vector<std::string>& clock_names = {}) const;

 private:
  int n_ = 0;
  bool empty_ = false;
  std::vector<raw_t> m_;
};

Dbm dbm_canonicalize(Dbm m);
Dbm dbm_up(Dbm m);
Dbm dbm_constrain(Dbm m, const Constraint& c);
Dbm dbm_reset(Dbm m, int clock, int64_t value);
Relation dbm_relation(const Dbm& a, const Dbm& b);
Dbm dbm_extrapolate(Dbm m, std::span<const int64_t> max_constants);

}  // namespace tachyon
