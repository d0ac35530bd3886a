#include "tachyon/dbm.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace tachyon {

std::string bound_to_string(raw_t b) {
  if (b == kInfinity) return "inf";
  return std::string(bound_strict(b) ? "<" : "<=") + std::to_string(bound_value(b));
}

Dbm::Dbm(int dim) : n_(dim), m_(static_cast<std::size_t>(dim * dim), kLeZero) {}

Dbm Dbm::universe(int dim) {
  Dbm d = unconstrained(dim);
  for (int j = 0; j < dim; ++j) d.set(0, j, kLeZero);
  return d;
}

Dbm Dbm::unconstrained(int dim) {
  Dbm d(dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) d.set(i, j, i == j ? kLeZero : kInfinity);
  return d;
}

bool Dbm::canonicalize() {
  if (empty_) return false;
  for (int k = 0; k < n_; ++k) {
    for (int i = 0; i < n_; ++i) {
      raw_t ik = at(i, k);
      if (ik == kInfinity) continue;
      for (int j = 0; j < n_; ++j) {
        raw_t s = bound_add(ik, at(k, j));
        if (s < at(i, j)) set(i, j, s);
      }
    }
    for (int i = 0; i < n_; ++i) {
      if (at(i, i) < kLeZero) {
        empty_ = true;
        return false;
      }
    }
  }
  return true;
}

bool Dbm::is_canonical() const {
  if (empty_) return true;
  for (int i = 0; i < n_; ++i)
    for (int k = 0; k < n_; ++k)
      for (int j = 0; j < n_; ++j)
        if (bound_add(at(i, k), at(k, j)) < at(i, j)) return false;
  return true;
}

void Dbm::up() {
  if (empty_) return;
  for (int i = 1; i < n_; ++i) set(i, 0, kInfinity);
}

bool Dbm::constrain(int i, int j, raw_t b) {
  if (empty_) return false;
  if (b >= at(i, j)) return true;
  if (bound_add(b, at(j, i)) < kLeZero) {
    empty_ = true;
    return false;
  }
  set(i, j, b);
  for (int k = 0; k < n_; ++k) {
    raw_t ki = at(k, i);
    if (ki == kInfinity) continue;
    raw_t kj = bound_add(ki, b);
    for (int l = 0; l < n_; ++l) {
      raw_t s = bound_add(kj, at(j, l));
      if (s < at(k, l)) set(k, l, s);
    }
  }
  return true;
}

void Dbm::reset(int x, int64_t value) {
  if (empty_) return;
  for (int j = 0; j < n_; ++j) {
    if (j == x) continue;
    set(x, j, bound_add(bound_le(value), at(0, j)));
    set(j, x, bound_add(at(j, 0), bound_le(-value)));
  }
  set(x, x, kLeZero);
}

void Dbm::extrapolate(std::span<const int64_t> k) {
  if (empty_) return;
  bool changed = false;
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < n_; ++j) {
      if (i == j) continue;
      raw_t b = at(i, j);
      if (b == kInfinity) continue;
      if (b > bound_le(k[static_cast<std::size_t>(i)])) {
        set(i, j, kInfinity);
        changed = true;
      } else if (b < bound_lt(-k[static_cast<std::size_t>(j)])) {
        set(i, j, bound_lt(-k[static_cast<std::size_t>(j)]));
        changed = true;
      }
    }
  }
  if (changed) canonicalize();
}

bool Dbm::includes(const Dbm& o) const {
  if (o.empty_) return true;
  if (empty_) return false;
  for (std::size_t i = 0; i < m_.size(); ++i)
    if (o.m_[i] > m_[i]) return false;
  return true;
}

Relation Dbm::relation(const Dbm& o) const {
  if (n_ != o.n_) throw std::invalid_argument("clock-set mismatch");
  bool sub = o.includes(*this);
  bool sup = includes(o);
  if (sub && sup) return Relation::Equal;
  if (sub) return Relation::Subset;
  if (sup) return Relation::Superset;
  return Relation::Incomparable;
}

bool Dbm::contains(std::span<const int64_t> p) const {
  if (empty_) return false;
  for (int i = 0; i < n_; ++i) {
    int64_t xi = i ? p[static_cast<std::size_t>(i - 1)] : 0;
    for (int j = 0; j < n_; ++j) {
      raw_t b = at(i, j);
      if (b == kInfinity || i == j) continue;
      int64_t xj = j ? p[static_cast<std::size_t>(j - 1)] : 0;
      int64_t d = xi - xj;
      if (bound_strict(b) ? d >= bound_value(b) : d > bound_value(b)) return false;
    }
  }
  return true;
}

bool Dbm::contains(std::span<const double> p, double eps) const {
  if (empty_) return false;
  for (int i = 0; i < n_; ++i) {
    double xi = i ? p[static_cast<std::size_t>(i - 1)] : 0.0;
    for (int j = 0; j < n_; ++j) {
      raw_t b = at(i, j);
      if (b == kInfinity || i == j) continue;
      double xj = j ? p[static_cast<std::size_t>(j - 1)] : 0.0;
      if (xi - xj > static_cast<double>(bound_value(b)) + eps) return false;
    }
  }
  return true;
}

std::string Dbm::to_string(const std::vector<std::string>& names) const {
  if (empty_) return "false";
  auto name = [&](int i) {
    if (i == 0) return std::string("0");
    if (static_cast<std::size_t>(i) < names.size()) return names[static_cast<std::size_t>(i)];
    return "x" + std::to_string(i);
  };
  std::ostringstream os;
  bool first = true;
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < n_; ++j) {
      if (i == j || at(i, j) == kInfinity) continue;
      if (i == 0 && at(i, j) == kLeZero) continue;
      if (!first) os << " && ";
      first = false;
      if (j == 0) os << name(i);
      else if (i == 0) os << '-' << name(j);
      else os << name(i) << '-' << name(j);
      os << bound_to_string(at(i, j));
    }
  }
  return first ? "true" : os.str();
}

Dbm dbm_canonicalize(Dbm m) {
  m.canonicalize();
  return m;
}

Dbm dbm_up(Dbm m) {
  m.up();
  return m;
}

Dbm dbm_constrain(Dbm m, const Constraint& c) {
  if (c.i < 0 || c.j < 0 || c.i >= m.dim() || c.j >= m.dim()) throw std::out_of_range("unknown clock");
  m.constrain(c);
  return m;
}

Dbm dbm_reset(Dbm m, int clock, int64_t value) {
  if (clock <= 0 || clock >= m.dim()) throw std::out_of_range("unknown clock");
  m.reset(clock, value);
  return m;
}

Relation dbm_relation(const Dbm& a, const Dbm& b) { return a.relation(b); }

Dbm dbm_extrapolate(Dbm m, std::span<const int64_t> k) {
  if (k.size() != static_cast<std::size_t>(m.dim())) throw std::invalid_argument("missing clock in map");
  m.extrapolate(k);
  return m;
}

}  // namespace tachyon
