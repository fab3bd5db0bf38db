#pragma once

// Single-agent allocation rules: two-allocation separating rules, posted-price
// (taxation) rules, agent utility and the truthful-with-verification check.

#include "pverify/geometry.hpp"

#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace pverify {

class AssignmentSet {
public:
  AssignmentSet(std::vector<std::string> labels, std::optional<std::size_t> null_index = std::nullopt)
      : labels_(std::move(labels)), null_index_(null_index) {
    if (labels_.size() < 2) throw ValidationError("an assignment set needs at least two assignments");
    std::set<std::string> seen(labels_.begin(), labels_.end());
    if (seen.size() != labels_.size()) throw ValidationError("assignment labels must be distinct");
    if (null_index_ && *null_index_ >= labels_.size()) throw ValidationError("null assignment index out of range");
  }

  std::size_t size() const noexcept { return labels_.size(); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  std::optional<std::size_t> null_index() const noexcept { return null_index_; }

  std::optional<std::size_t> index_of(const std::string& label) const {
    for (std::size_t i = 0; i < labels_.size(); ++i)
      if (labels_[i] == label) return i;
    return std::nullopt;
  }

private:
  std::vector<std::string> labels_;
  std::optional<std::size_t> null_index_;
};

/// A probability distribution over assignments.
class Allocation {
public:
  explicit Allocation(Vector probs) : probs_(std::move(probs)) {
    if (probs_.empty()) throw ValidationError("allocation must have at least one coordinate");
    Rational total = 0;
    for (const auto& p : probs_) {
      if (p < 0 || p > 1) throw ValidationError("allocation probability outside [0,1]: " + probs_.str());
      total += p;
    }
    if (total != 1) throw ValidationError("allocation probabilities must sum to 1: " + probs_.str());
  }
  Allocation(std::initializer_list<Rational> probs) : Allocation(Vector(probs)) {}

  static Allocation point_mass(std::size_t dim, std::size_t assignment) {
    return Allocation(Vector::unit(dim, assignment));
  }

  const Vector& probs() const noexcept { return probs_; }
  std::size_t dim() const noexcept { return probs_.size(); }

  bool is_deterministic() const {
    return std::count_if(probs_.begin(), probs_.end(), [](const Rational& p) { return p == 1; }) == 1;
  }

  /// Expected value of this allocation to an agent of the given type.
  Rational value(const Vector& type) const { return probs_.dot(type); }

  friend bool operator==(const Allocation& a, const Allocation& b) { return a.probs_ == b.probs_; }
  friend bool operator<(const Allocation& a, const Allocation& b) { return a.probs_ < b.probs_; }

  std::string str() const { return probs_.str(); }

private:
  Vector probs_;
};

/// All point-mass allocations over m assignments, in assignment order.
inline std::vector<Allocation> point_masses(std::size_t m) {
  std::vector<Allocation> out;
  for (std::size_t i = 0; i < m; ++i) out.push_back(Allocation::point_mass(m, i));
  return out;
}

enum class TieSide { ToI, ToJ };

/// Two-allocation rule with boundary (a_i - a_j) . x = relative_price.
/// Types strictly above the boundary get a_i, strictly below get a_j.
class SeparatingRule {
public:
  SeparatingRule(Allocation a_i, Allocation a_j, Rational relative_price, TieSide tie = TieSide::ToI,
                 std::map<Vector, Allocation> overrides = {})
      : a_i_(std::move(a_i)), a_j_(std::move(a_j)), price_(std::move(relative_price)), tie_(tie) {
    require_same_dim(a_i_.dim(), a_j_.dim());
    if (a_i_ == a_j_) throw ValidationError("separating rule needs two distinct allocations");
    for (auto& [point, alloc] : overrides) add_override(point, alloc);
  }

  const Allocation& a_i() const noexcept { return a_i_; }
  const Allocation& a_j() const noexcept { return a_j_; }
  const Rational& relative_price() const noexcept { return price_; }
  TieSide tie() const noexcept { return tie_; }
  const std::map<Vector, Allocation>& overrides() const noexcept { return overrides_; }

  Vector normal() const { return a_i_.probs() - a_j_.probs(); }
  Hyperplane boundary() const { return Hyperplane(normal(), price_); }

  /// Pins the allocation of a single boundary point.
  void add_override(const Vector& point, const Allocation& alloc) {
    require_same_dim(a_i_.dim(), point.size());
    if (normal().dot(point) != price_)
      throw ValidationError("override point " + point.str() + " is not on the rule boundary");
    if (!(alloc == a_i_) && !(alloc == a_j_))
      throw ValidationError("override must map to one of the rule's two allocations");
    overrides_.insert_or_assign(point, alloc);
  }

  const Allocation& allocate(const Vector& x) const {
    require_same_dim(a_i_.dim(), x.size());
    const Rational v = normal().dot(x);
    if (v > price_) return a_i_;
    if (v < price_) return a_j_;
    if (auto it = overrides_.find(x); it != overrides_.end()) return it->second;
    return tie_ == TieSide::ToI ? a_i_ : a_j_;
  }

private:
  Allocation a_i_;
  Allocation a_j_;
  Rational price_;
  TieSide tie_;
  std::map<Vector, Allocation> overrides_;
};

inline const Allocation& allocate_separating(const SeparatingRule& f, const Vector& x) { return f.allocate(x); }

struct TaxEntry {
  Allocation allocation;
  Rational price;
};

/// Posted prices per allocation; the agent takes the utility-maximizing entry.
/// Ties go to the entry that comes first in `tie_order` (a permutation of entry indices).
class TaxationRule {
public:
  explicit TaxationRule(std::vector<TaxEntry> entries, std::vector<std::size_t> tie_order = {})
      : entries_(std::move(entries)), tie_order_(std::move(tie_order)) {
    if (entries_.empty()) throw ValidationError("taxation rule needs at least one entry");
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      require_same_dim(entries_[0].allocation.dim(), entries_[i].allocation.dim());
      for (std::size_t j = 0; j < i; ++j)
        if (entries_[i].allocation == entries_[j].allocation)
          throw ValidationError("taxation rule allocations must be pairwise distinct");
    }
    if (tie_order_.empty()) {
      tie_order_.resize(entries_.size());
      std::iota(tie_order_.begin(), tie_order_.end(), std::size_t{0});
    }
    std::vector<std::size_t> sorted = tie_order_;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i)
      if (sorted.size() != entries_.size() || sorted[i] != i)
        throw ValidationError("tie order must be a permutation of the entry indices");
  }

  const std::vector<TaxEntry>& entries() const noexcept { return entries_; }
  const std::vector<std::size_t>& tie_order() const noexcept { return tie_order_; }
  std::size_t dim() const noexcept { return entries_.front().allocation.dim(); }

  Rational entry_utility(std::size_t idx, const Vector& type) const {
    return entries_[idx].allocation.value(type) - entries_[idx].price;
  }

  /// Indices of every utility-maximizing entry, in tie order.
  std::vector<std::size_t> best_response_set(const Vector& x) const {
    require_same_dim(dim(), x.size());
    std::vector<Rational> u(entries_.size());
    Rational best = entry_utility(0, x);
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      u[i] = entry_utility(i, x);
      if (u[i] > best) best = u[i];
    }
    std::vector<std::size_t> out;
    for (std::size_t idx : tie_order_)
      if (u[idx] == best) out.push_back(idx);
    return out;
  }

  std::size_t best_index(const Vector& x) const { return best_response_set(x).front(); }

  const Allocation& allocate(const Vector& x) const { return entries_[best_index(x)].allocation; }

private:
  std::vector<TaxEntry> entries_;
  std::vector<std::size_t> tie_order_;
};

inline const TaxEntry& best_entry(const TaxationRule& t, const Vector& x) { return t.entries()[t.best_index(x)]; }

/// Utility f(reported) . true_type - p(reported) under the posted prices.
inline Rational utility(const TaxationRule& t, const Vector& true_type, const Vector& reported_type) {
  require_same_dim(t.dim(), true_type.size());
  const auto& e = best_entry(t, reported_type);
  return e.allocation.value(true_type) - e.price;
}

/// An arbitrary pointwise allocation rule.
class FunctionRule {
public:
  FunctionRule(std::string name, std::function<Allocation(const Vector&)> fn)
      : name_(std::move(name)), fn_(std::move(fn)) {}

  /// Rule that always returns the same allocation.
  static FunctionRule constant(Allocation a) {
    return FunctionRule("constant " + a.str(), [a](const Vector&) { return a; });
  }

  /// Rule that gives each type a point mass on its most valuable assignment (lowest index on ties).
  static FunctionRule favourite_assignment(std::size_t m) {
    return FunctionRule("favourite assignment", [m](const Vector& x) {
      require_same_dim(m, x.size());
      std::size_t best = 0;
      for (std::size_t i = 1; i < m; ++i)
        if (x[i] > x[best]) best = i;
      return Allocation::point_mass(m, best);
    });
  }

  const std::string& name() const noexcept { return name_; }
  Allocation allocate(const Vector& x) const { return fn_(x); }

private:
  std::string name_;
  std::function<Allocation(const Vector&)> fn_;
};

using AnyRule = std::variant<SeparatingRule, TaxationRule, FunctionRule>;

inline Allocation allocate(const SeparatingRule& f, const Vector& x) { return f.allocate(x); }
inline Allocation allocate(const TaxationRule& f, const Vector& x) { return f.allocate(x); }
inline Allocation allocate(const FunctionRule& f, const Vector& x) { return f.allocate(x); }
inline Allocation allocate(const AnyRule& f, const Vector& x) {
  return std::visit([&](const auto& rule) { return allocate(rule, x); }, f);
}

template <class Rule>
concept AllocationRule = requires(const Rule& f, const Vector& x) {
  { allocate(f, x) } -> std::convertible_to<Allocation>;
};

/// Pairs (true type, reported type) the designer can detect or prevent.
class VerificationSet {
public:
  using Predicate = std::function<bool(const Vector& true_type, const Vector& reported)>;

  explicit VerificationSet(Predicate p) : pred_(std::move(p)) {}

  static VerificationSet none() {
    return VerificationSet([](const Vector&, const Vector&) { return false; });
  }
  static VerificationSet all() {
    return VerificationSet([](const Vector&, const Vector&) { return true; });
  }
  /// Misreports that raise some coordinate above its true value are caught.
  static VerificationSet no_overbid() {
    return VerificationSet([](const Vector& t, const Vector& r) {
      for (std::size_t i = 0; i < t.size(); ++i)
        if (r[i] > t[i]) return true;
      return false;
    });
  }
  static VerificationSet of_pairs(std::vector<std::pair<Vector, Vector>> pairs) {
    return VerificationSet([pairs = std::move(pairs)](const Vector& t, const Vector& r) {
      return std::find(pairs.begin(), pairs.end(), std::pair<Vector, Vector>(t, r)) != pairs.end();
    });
  }

  bool operator()(const Vector& true_type, const Vector& reported) const { return pred_(true_type, reported); }

private:
  Predicate pred_;
};

struct Misreport {
  Vector true_type;
  Vector reported;
};

/// First ordered grid pair where a misreport strictly helps and is not verified.
template <AllocationRule Rule>
std::optional<Misreport> find_unverified_misreport(const Rule& f, const VerificationSet& v,
                                                   std::span<const Vector> grid) {
  if (grid.empty()) throw ValidationError("verification grid must be nonempty");
  for (const auto& t : grid) {
    const Rational truthful = allocate(f, t).value(t);
    for (const auto& r : grid) {
      if (allocate(f, r).value(t) > truthful && !v(t, r)) return Misreport{t, r};
    }
  }
  return std::nullopt;
}

template <AllocationRule Rule>
bool is_truthful_with_verification(const Rule& f, const VerificationSet& v, std::span<const Vector> grid) {
  return !find_unverified_misreport(f, v, grid).has_value();
}

}  // namespace pverify
