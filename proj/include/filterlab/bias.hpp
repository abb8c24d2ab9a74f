#pragma once

#include "filterlab/rational.hpp"
#include "filterlab/trace.hpp"

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace filterlab {

// Tail classes describe p_n for n at or beyond the explicit prefix.
struct ConstantTail {
  Rational value;
  friend bool operator==(const ConstantTail&, const ConstantTail&) = default;
};
// p_n = scale * n^{-exponent} for n >= 1.
struct PowerLawTail {
  Rational scale;
  Rational exponent;
  friend bool operator==(const PowerLawTail&, const PowerLawTail&) = default;
};
// p_n = scale * ratio^n.
struct GeometricTail {
  Rational scale;
  Rational ratio;
  friend bool operator==(const GeometricTail&, const GeometricTail&) = default;
};
struct UnspecifiedTail {
  friend bool operator==(const UnspecifiedTail&, const UnspecifiedTail&) = default;
};

using TailClass = std::variant<ConstantTail, PowerLawTail, GeometricTail, UnspecifiedTail>;

std::string tail_name(const TailClass& tail);

// Coordinate biases p_0, p_1, ... of the product measure μ_p̂: an explicit
// rational prefix plus a tail class. Primary sequences keep every resolved
// value in (0, 1/2]; derived (conjugate) sequences may also contain 0.
class BiasSequence {
public:
  BiasSequence() : BiasSequence(uniform()) {}

  // Validates the primary range (0, 1/2].
  static BiasSequence make(std::vector<Rational> prefix, TailClass tail);
  // Validates the extended range [0, 1/2].
  static BiasSequence derived(std::vector<Rational> prefix, TailClass tail);
  static BiasSequence uniform();
  static BiasSequence constant(Rational c);

  const std::vector<Rational>& prefix() const { return prefix_; }
  const TailClass& tail() const { return tail_; }
  bool is_derived() const { return derived_; }

  // nullopt when the tail cannot resolve coordinate n exactly.
  std::optional<Rational> at(Coord n) const;
  // Throws BiasUndefinedError when at(n) is empty.
  Rational bias(Coord n) const;

  // p̂↾X re-indexed: coordinate j of the result is p_{X[j]}.
  BiasSequence restricted_to(const CoordSet& coords) const;

  friend bool operator==(const BiasSequence&, const BiasSequence&) = default;

private:
  BiasSequence(std::vector<Rational> prefix, TailClass tail, bool derived)
      : prefix_(std::move(prefix)), tail_(std::move(tail)), derived_(derived) {}
  void validate() const;

  std::vector<Rational> prefix_;
  TailClass tail_;
  bool derived_ = false;
};

}  // namespace filterlab
