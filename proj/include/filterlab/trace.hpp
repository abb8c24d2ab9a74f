#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace filterlab {

using Coord = std::size_t;
using CoordSet = std::vector<Coord>;  // sorted ascending, no duplicates

// Half-open coordinate interval [begin, end).
struct Interval {
  Coord begin = 0;
  Coord end = 0;

  std::size_t size() const { return end > begin ? end - begin : 0; }
  bool empty() const { return end <= begin; }
  bool contains(Coord c) const { return begin <= c && c < end; }
  CoordSet coords() const;

  friend bool operator==(const Interval&, const Interval&) = default;
  friend auto operator<=>(const Interval&, const Interval&) = default;
};

std::string to_string(const Interval& iv);

// Sorts and deduplicates; returns the canonical form.
CoordSet make_coord_set(std::vector<Coord> coords);
bool is_subset(const CoordSet& sub, const CoordSet& super);
CoordSet set_intersection(const CoordSet& a, const CoordSet& b);
CoordSet set_union(const CoordSet& a, const CoordSet& b);
CoordSet set_difference(const CoordSet& a, const CoordSet& b);

// A total 0/1 assignment on a finite coordinate set, kept in ascending
// coordinate order. Points of 2^ω, subsets of ω, and cylinder generators are
// all represented this way at finite scale.
class FiniteTrace {
public:
  FiniteTrace() = default;
  // domain need not be sorted; bits[i] belongs to domain[i]. Duplicate
  // coordinates are rejected.
  FiniteTrace(std::vector<Coord> domain, std::vector<bool> bits);

  // bits is a 0/1 string in ascending coordinate order.
  static FiniteTrace from_string(CoordSet domain, std::string_view bits);
  static FiniteTrace on_interval(Interval iv, std::string_view bits);
  // Bit i of mask is the value at domain[i].
  static FiniteTrace from_mask(const CoordSet& domain, std::uint64_t mask);
  // Characteristic function of `ones` on [0, window).
  static FiniteTrace indicator(std::size_t window, const CoordSet& ones);
  static FiniteTrace constant(Interval iv, bool value);

  const CoordSet& domain() const { return domain_; }
  std::size_t size() const { return domain_.size(); }
  bool empty() const { return domain_.empty(); }

  bool bit(std::size_t position) const { return bits_[position]; }
  std::optional<bool> at(Coord c) const;
  // Throws DomainError when c is outside the domain.
  bool value(Coord c) const;

  // Requires size() <= 63.
  std::uint64_t mask() const;
  std::string bit_string() const;
  // The coordinates mapped to 1, i.e. the subset of ω this trace encodes.
  CoordSet ones() const;
  std::size_t count_ones() const;

  // Restriction to domain ∩ coords.
  FiniteTrace restrict_to(const CoordSet& coords) const;
  // Requires iv ⊆ domain; throws DomainError naming the interval otherwise.
  FiniteTrace restrict_to(const Interval& iv) const;
  // Union of two traces with disjoint domains.
  FiniteTrace concat(const FiniteTrace& other) const;
  // True iff the traces agree on dom(this) ∩ dom(other).
  bool agrees_with(const FiniteTrace& other) const;
  bool covers(const Interval& iv) const;

  friend bool operator==(const FiniteTrace&, const FiniteTrace&) = default;
  friend std::strong_ordering operator<=>(const FiniteTrace& a, const FiniteTrace& b);

private:
  CoordSet domain_;
  std::vector<bool> bits_;
};

std::string to_string(const FiniteTrace& t);

// A set of traces sharing one domain; V(J) is the union of their cylinders.
class CylinderFamily {
public:
  CylinderFamily() = default;
  explicit CylinderFamily(CoordSet domain) : domain_(make_coord_set(std::move(domain))) {}
  explicit CylinderFamily(Interval iv) : domain_(iv.coords()) {}
  CylinderFamily(CoordSet domain, const std::vector<FiniteTrace>& traces);

  // Throws ValidationError if t's domain differs from the family's.
  void insert(const FiniteTrace& t);
  void insert_mask(std::uint64_t mask) { insert(FiniteTrace::from_mask(domain_, mask)); }
  bool contains(const FiniteTrace& t) const { return traces_.contains(t); }

  const CoordSet& domain() const { return domain_; }
  const std::set<FiniteTrace>& traces() const { return traces_; }
  std::size_t size() const { return traces_.size(); }
  bool empty() const { return traces_.empty(); }

  friend bool operator==(const CylinderFamily&, const CylinderFamily&) = default;

private:
  CoordSet domain_;
  std::set<FiniteTrace> traces_;
};

}  // namespace filterlab
