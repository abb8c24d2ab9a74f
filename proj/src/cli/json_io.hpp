#pragma once

#include "filterlab/antichains.hpp"
#include "filterlab/bias.hpp"
#include "filterlab/cli.hpp"
#include "filterlab/filters.hpp"
#include "filterlab/rational.hpp"
#include "filterlab/small_sets.hpp"
#include "filterlab/talagrand.hpp"
#include "filterlab/trace.hpp"

#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace filterlab::cli {

// A JSON value together with its pointer; every accessor reports failures
// as SpecError at that pointer.
class Node {
public:
  Node(const Json& value, std::string pointer) : value_(&value), pointer_(std::move(pointer)) {}

  const Json& json() const { return *value_; }
  const std::string& pointer() const { return pointer_; }
  [[noreturn]] void fail(const std::string& message) const;

  // Object access. allow() rejects keys outside the list.
  void allow(std::initializer_list<std::string_view> keys) const;
  bool has(std::string_view key) const;
  Node at(std::string_view key) const;
  std::optional<Node> find(std::string_view key) const;

  // Array access.
  std::vector<Node> items() const;

  std::string text() const;
  Rational rational() const;
  std::uint64_t u64() const;
  std::size_t index() const { return static_cast<std::size_t>(u64()); }
  bool boolean() const;
  CoordSet coords() const;
  std::vector<std::size_t> indices() const;

private:
  const Json* value_;
  std::string pointer_;
};

BiasSequence read_bias(const Node& n);
// {"domain": [...], "bits": "0101"} or {"window": N, "ones": [...]}.
FiniteTrace read_trace(const Node& n);
// Bit string over [begin, begin + len).
FiniteTrace read_bits(const Node& n, Coord begin);
// {"domain": [...], "traces": ["01", ...]}
CylinderFamily read_family(const Node& n);
EpsilonSchedule read_epsilon(const Node& n);
AntichainFamily read_antichain_family(const Node& n, std::size_t cap);
FilterBase read_filter(const Node& n, std::size_t cap);
HalvingGrid read_grid(const Node& n);
ConstraintList read_constraints(const Node& n);
SelectionStrategy read_strategy(const Node& n, const std::optional<std::uint64_t>& seed_override);

std::string sha256_hex(std::string_view bytes);

Json write(const Rational& r);
Json write(const Interval& iv);
Json write(const FiniteTrace& t);  // {"domain": [...], "bits": "..."}
Json write_bias(const BiasSequence& p);
Json write_family(const CylinderFamily& J);

}  // namespace filterlab::cli
