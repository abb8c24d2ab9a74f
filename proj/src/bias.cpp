#include "filterlab/bias.hpp"

#include "filterlab/errors.hpp"

namespace filterlab {

namespace {

const Rational kHalf{1, 2};

bool in_range(const Rational& v, bool allow_zero) {
  return (allow_zero ? v.sign() >= 0 : v.sign() > 0) && v <= kHalf;
}

std::string range_text(bool allow_zero) { return allow_zero ? "[0, 1/2]" : "(0, 1/2]"; }

}  // namespace

std::string tail_name(const TailClass& tail) {
  struct {
    std::string operator()(const ConstantTail&) const { return "constant"; }
    std::string operator()(const PowerLawTail&) const { return "power_law"; }
    std::string operator()(const GeometricTail&) const { return "geometric"; }
    std::string operator()(const UnspecifiedTail&) const { return "unspecified"; }
  } visitor;
  return std::visit(visitor, tail);
}

BiasSequence BiasSequence::make(std::vector<Rational> prefix, TailClass tail) {
  BiasSequence p(std::move(prefix), std::move(tail), false);
  p.validate();
  return p;
}

BiasSequence BiasSequence::derived(std::vector<Rational> prefix, TailClass tail) {
  BiasSequence p(std::move(prefix), std::move(tail), true);
  p.validate();
  return p;
}

BiasSequence BiasSequence::uniform() { return BiasSequence({}, ConstantTail{kHalf}, false); }

BiasSequence BiasSequence::constant(Rational c) { return make({}, ConstantTail{std::move(c)}); }

void BiasSequence::validate() const {
  for (std::size_t i = 0; i < prefix_.size(); ++i)
    if (!in_range(prefix_[i], derived_))
      throw ValidationError("bias p_" + std::to_string(i) + " = " + prefix_[i].str() + " outside " +
                            range_text(derived_));
  if (const auto* c = std::get_if<ConstantTail>(&tail_)) {
    if (!in_range(c->value, derived_))
      throw ValidationError("constant tail " + c->value.str() + " outside " + range_text(derived_));
  } else if (const auto* g = std::get_if<GeometricTail>(&tail_)) {
    if (g->scale.sign() <= 0) throw ValidationError("geometric tail scale must be positive");
    if (g->ratio.sign() <= 0 || g->ratio >= Rational(1))
      throw ValidationError("geometric tail ratio must lie in (0, 1)");
  } else if (const auto* pl = std::get_if<PowerLawTail>(&tail_)) {
    if (pl->scale.sign() <= 0) throw ValidationError("power-law tail scale must be positive");
    if (pl->exponent.sign() <= 0) throw ValidationError("power-law tail exponent must be positive");
  }
}

std::optional<Rational> BiasSequence::at(Coord n) const {
  if (n < prefix_.size()) return prefix_[n];
  std::optional<Rational> v;
  if (const auto* c = std::get_if<ConstantTail>(&tail_)) {
    v = c->value;
  } else if (const auto* g = std::get_if<GeometricTail>(&tail_)) {
    v = g->scale * pow(g->ratio, n);
  } else if (const auto* pl = std::get_if<PowerLawTail>(&tail_)) {
    // Only integer exponents give exact rational values.
    if (n == 0 || pl->exponent.denominator() != 1 || !pl->exponent.numerator().fits_ulong_p())
      return std::nullopt;
    v = pl->scale / pow(Rational(static_cast<long>(n)), pl->exponent.numerator().get_ui());
  }
  if (v && !in_range(*v, derived_)) return std::nullopt;
  return v;
}

Rational BiasSequence::bias(Coord n) const {
  auto v = at(n);
  if (!v)
    throw BiasUndefinedError("bias undefined at coordinate " + std::to_string(n) + " (prefix length " +
                             std::to_string(prefix_.size()) + ", " + tail_name(tail_) + " tail)");
  return *v;
}

BiasSequence BiasSequence::restricted_to(const CoordSet& coords) const {
  std::vector<Rational> prefix;
  prefix.reserve(coords.size());
  for (Coord c : coords) prefix.push_back(bias(c));
  return BiasSequence(std::move(prefix), UnspecifiedTail{}, derived_);
}

}  // namespace filterlab
