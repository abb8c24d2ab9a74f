#include "filterlab/trace.hpp"

#include "filterlab/errors.hpp"

#include <algorithm>
#include <numeric>

namespace filterlab {

CoordSet Interval::coords() const {
  CoordSet out(size());
  std::iota(out.begin(), out.end(), begin);
  return out;
}

std::string to_string(const Interval& iv) {
  return "[" + std::to_string(iv.begin) + "," + std::to_string(iv.end) + ")";
}

CoordSet make_coord_set(std::vector<Coord> coords) {
  std::sort(coords.begin(), coords.end());
  coords.erase(std::unique(coords.begin(), coords.end()), coords.end());
  return coords;
}

bool is_subset(const CoordSet& sub, const CoordSet& super) {
  return std::includes(super.begin(), super.end(), sub.begin(), sub.end());
}

CoordSet set_intersection(const CoordSet& a, const CoordSet& b) {
  CoordSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

CoordSet set_union(const CoordSet& a, const CoordSet& b) {
  CoordSet out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

CoordSet set_difference(const CoordSet& a, const CoordSet& b) {
  CoordSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

FiniteTrace::FiniteTrace(std::vector<Coord> domain, std::vector<bool> bits) {
  if (domain.size() != bits.size())
    throw ValidationError("trace has " + std::to_string(bits.size()) + " bits for a domain of " +
                          std::to_string(domain.size()) + " coordinates");
  std::vector<std::size_t> order(domain.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return domain[a] < domain[b]; });
  domain_.reserve(domain.size());
  bits_.reserve(bits.size());
  for (auto i : order) {
    if (!domain_.empty() && domain_.back() == domain[i])
      throw ValidationError("duplicate coordinate " + std::to_string(domain[i]) + " in trace domain");
    domain_.push_back(domain[i]);
    bits_.push_back(bits[i]);
  }
}

FiniteTrace FiniteTrace::from_string(CoordSet domain, std::string_view bits) {
  std::vector<bool> values;
  values.reserve(bits.size());
  for (char c : bits) {
    if (c != '0' && c != '1') throw ValidationError("trace bits must be '0'/'1', got '" + std::string(1, c) + "'");
    values.push_back(c == '1');
  }
  if (!std::is_sorted(domain.begin(), domain.end()))
    throw ValidationError("trace domain must be listed in ascending order");
  return FiniteTrace(std::move(domain), std::move(values));
}

FiniteTrace FiniteTrace::on_interval(Interval iv, std::string_view bits) {
  return from_string(iv.coords(), bits);
}

FiniteTrace FiniteTrace::from_mask(const CoordSet& domain, std::uint64_t mask) {
  FiniteTrace t;
  t.domain_ = domain;
  t.bits_.resize(domain.size());
  for (std::size_t i = 0; i < domain.size(); ++i) t.bits_[i] = ((mask >> i) & 1U) != 0;
  return t;
}

FiniteTrace FiniteTrace::indicator(std::size_t window, const CoordSet& ones) {
  FiniteTrace t;
  t.domain_ = Interval{0, window}.coords();
  t.bits_.assign(window, false);
  for (Coord c : ones) {
    if (c >= window) throw DomainError("coordinate " + std::to_string(c) + " outside window [0," + std::to_string(window) + ")");
    t.bits_[c] = true;
  }
  return t;
}

FiniteTrace FiniteTrace::constant(Interval iv, bool value) {
  FiniteTrace t;
  t.domain_ = iv.coords();
  t.bits_.assign(iv.size(), value);
  return t;
}

std::optional<bool> FiniteTrace::at(Coord c) const {
  auto it = std::lower_bound(domain_.begin(), domain_.end(), c);
  if (it == domain_.end() || *it != c) return std::nullopt;
  return bits_[static_cast<std::size_t>(it - domain_.begin())];
}

bool FiniteTrace::value(Coord c) const {
  auto v = at(c);
  if (!v) throw DomainError("coordinate " + std::to_string(c) + " outside trace domain");
  return *v;
}

std::uint64_t FiniteTrace::mask() const {
  if (domain_.size() > 63) throw DomainError("trace too long for a bit mask");
  std::uint64_t m = 0;
  for (std::size_t i = 0; i < bits_.size(); ++i)
    if (bits_[i]) m |= std::uint64_t{1} << i;
  return m;
}

std::string FiniteTrace::bit_string() const {
  std::string s;
  s.reserve(bits_.size());
  for (bool b : bits_) s.push_back(b ? '1' : '0');
  return s;
}

CoordSet FiniteTrace::ones() const {
  CoordSet out;
  for (std::size_t i = 0; i < bits_.size(); ++i)
    if (bits_[i]) out.push_back(domain_[i]);
  return out;
}

std::size_t FiniteTrace::count_ones() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), true));
}

FiniteTrace FiniteTrace::restrict_to(const CoordSet& coords) const {
  FiniteTrace t;
  std::size_t j = 0;
  for (std::size_t i = 0; i < domain_.size(); ++i) {
    while (j < coords.size() && coords[j] < domain_[i]) ++j;
    if (j < coords.size() && coords[j] == domain_[i]) {
      t.domain_.push_back(domain_[i]);
      t.bits_.push_back(bits_[i]);
    }
  }
  return t;
}

bool FiniteTrace::covers(const Interval& iv) const {
  if (iv.empty()) return true;
  auto lo = std::lower_bound(domain_.begin(), domain_.end(), iv.begin);
  auto hi = std::lower_bound(domain_.begin(), domain_.end(), iv.end);
  return static_cast<std::size_t>(hi - lo) == iv.size();
}

FiniteTrace FiniteTrace::restrict_to(const Interval& iv) const {
  if (!covers(iv)) throw DomainError("trace does not cover interval " + to_string(iv));
  FiniteTrace t;
  auto lo = static_cast<std::size_t>(std::lower_bound(domain_.begin(), domain_.end(), iv.begin) - domain_.begin());
  t.domain_.assign(domain_.begin() + static_cast<std::ptrdiff_t>(lo),
                   domain_.begin() + static_cast<std::ptrdiff_t>(lo + iv.size()));
  t.bits_.assign(bits_.begin() + static_cast<std::ptrdiff_t>(lo),
                 bits_.begin() + static_cast<std::ptrdiff_t>(lo + iv.size()));
  return t;
}

FiniteTrace FiniteTrace::concat(const FiniteTrace& other) const {
  std::vector<Coord> d = domain_;
  std::vector<bool> b = bits_;
  d.insert(d.end(), other.domain_.begin(), other.domain_.end());
  b.insert(b.end(), other.bits_.begin(), other.bits_.end());
  return FiniteTrace(std::move(d), std::move(b));
}

bool FiniteTrace::agrees_with(const FiniteTrace& other) const {
  std::size_t i = 0, j = 0;
  while (i < domain_.size() && j < other.domain_.size()) {
    if (domain_[i] < other.domain_[j]) {
      ++i;
    } else if (other.domain_[j] < domain_[i]) {
      ++j;
    } else {
      if (bits_[i] != other.bits_[j]) return false;
      ++i;
      ++j;
    }
  }
  return true;
}

std::strong_ordering operator<=>(const FiniteTrace& a, const FiniteTrace& b) {
  if (auto c = std::lexicographical_compare_three_way(a.domain_.begin(), a.domain_.end(),
                                                      b.domain_.begin(), b.domain_.end());
      c != 0)
    return c;
  return std::lexicographical_compare_three_way(a.bits_.begin(), a.bits_.end(), b.bits_.begin(),
                                                b.bits_.end());
}

std::string to_string(const FiniteTrace& t) {
  std::string s = "{";
  for (std::size_t i = 0; i < t.domain().size(); ++i) {
    if (i) s += ",";
    s += std::to_string(t.domain()[i]);
  }
  return s + "}:" + t.bit_string();
}

CylinderFamily::CylinderFamily(CoordSet domain, const std::vector<FiniteTrace>& traces)
    : domain_(make_coord_set(std::move(domain))) {
  for (const auto& t : traces) insert(t);
}

void CylinderFamily::insert(const FiniteTrace& t) {
  if (t.domain() != domain_)
    throw ValidationError("trace " + to_string(t) + " does not match the family domain");
  traces_.insert(t);
}

}  // namespace filterlab
