#include "filterlab/measure.hpp"

#include "filterlab/errors.hpp"

#include <algorithm>

namespace filterlab {

namespace {

const Rational kOne{1};
const Rational kHalf{1, 2};

std::uint64_t position_mask(const CoordSet& subset, const CoordSet& domain) {
  std::uint64_t m = 0;
  std::size_t j = 0;
  for (Coord c : subset) {
    while (j < domain.size() && domain[j] < c) ++j;
    if (j == domain.size() || domain[j] != c)
      throw DomainError("coordinate " + std::to_string(c) + " outside the enumeration domain");
    m |= std::uint64_t{1} << j;
  }
  return m;
}

// (1−2p) / (2(1−p)): solves (1−p)(1−q) = 1/2.
Rational max_conjugate(const Rational& p) { return (kOne - Rational(2) * p) / (Rational(2) * (kOne - p)); }

// 1 − (1−q)/(1−p).
Rational union_conjugate(const Rational& p, const Rational& q, Coord n) {
  if (p > q)
    throw DomainError("not dominated at coordinate " + std::to_string(n) + ": p = " + p.str() +
                      " > q = " + q.str());
  return kOne - (kOne - q) / (kOne - p);
}

// Rational lower bound on base^(num/den) for base >= 1, accurate to 2^-64
// relative precision.
Rational root_lower_bound(const mpz_class& base, const mpz_class& num, const mpz_class& den) {
  mpz_class scaled;
  mpz_pow_ui(scaled.get_mpz_t(), base.get_mpz_t(), num.get_ui());
  scaled <<= 64 * den.get_ui();
  mpz_class root;
  mpz_root(root.get_mpz_t(), scaled.get_mpz_t(), den.get_ui());
  mpz_class scale = 1;
  scale <<= 64;
  return Rational::from_integers(root, scale);
}

}  // namespace

void check_enumeration_cap(std::size_t size, std::size_t cap) {
  if (size > cap || size > kMaxEnumerationCap) throw EnumerationCapError(size, std::min(cap, kMaxEnumerationCap));
}

Rational trace_measure(const BiasSequence& p, const FiniteTrace& t) {
  Rational out{1};
  for (std::size_t i = 0; i < t.size(); ++i) {
    const Rational pi = p.bias(t.domain()[i]);
    out *= t.bit(i) ? pi : kOne - pi;
  }
  return out;
}

std::vector<Rational> mask_weights(const BiasSequence& p, const CoordSet& domain, std::size_t cap) {
  check_enumeration_cap(domain.size(), cap);
  std::vector<Rational> w(std::size_t{1} << domain.size());
  w[0] = kOne;
  for (std::size_t i = 0; i < domain.size(); ++i) {
    const Rational pi = p.bias(domain[i]);
    const Rational qi = kOne - pi;
    const std::size_t half = std::size_t{1} << i;
    for (std::size_t m = 0; m < half; ++m) {
      w[m | half] = w[m] * pi;
      w[m] *= qi;
    }
  }
  return w;
}

Rational family_measure(const BiasSequence& p, const CylinderFamily& J, std::size_t cap) {
  check_enumeration_cap(J.domain().size(), cap);
  Rational total;
  for (const auto& t : J.traces()) total += trace_measure(p, t);
  return total;
}

Rational hit_measure(const BiasSequence& p, const std::vector<CoordSet>& stage_sets, const CoordSet& I,
                     std::size_t cap) {
  std::vector<std::uint64_t> sets;
  sets.reserve(stage_sets.size());
  for (const auto& a : stage_sets) {
    if (!is_subset(a, I)) throw DomainError("stage set is not contained in the enumeration domain");
    sets.push_back(position_mask(a, I));
  }
  check_enumeration_cap(I.size(), cap);
  if (sets.empty()) return Rational{};
  const auto w = mask_weights(p, I, cap);
  Rational total;
  for (std::uint64_t m = 0; m < w.size(); ++m)
    if (std::any_of(sets.begin(), sets.end(), [m](std::uint64_t a) { return (m & a) == a; })) total += w[m];
  return total;
}

BiasSequence conjugate_bias(const BiasSequence& p, const ConjugateMap& map) {
  if (std::holds_alternative<MaxMap>(map)) {
    std::vector<Rational> prefix;
    prefix.reserve(p.prefix().size());
    for (const auto& pi : p.prefix()) prefix.push_back(max_conjugate(pi));
    TailClass tail = UnspecifiedTail{};
    if (const auto* c = std::get_if<ConstantTail>(&p.tail())) tail = ConstantTail{max_conjugate(c->value)};
    return BiasSequence::derived(std::move(prefix), std::move(tail));
  }

  const auto& q = std::get<UnionMap>(map).target;
  const std::size_t length = std::max(p.prefix().size(), q.prefix().size());
  std::vector<Rational> prefix;
  for (Coord n = 0; n < length; ++n) {
    auto pn = p.at(n);
    auto qn = q.at(n);
    if (!pn || !qn) break;
    prefix.push_back(union_conjugate(*pn, *qn, n));
  }
  TailClass tail = UnspecifiedTail{};
  const auto* pc = std::get_if<ConstantTail>(&p.tail());
  const auto* qc = std::get_if<ConstantTail>(&q.tail());
  if (pc && qc && prefix.size() == length) tail = ConstantTail{union_conjugate(pc->value, qc->value, length)};
  return BiasSequence::derived(std::move(prefix), std::move(tail));
}

BiasSequence pushforward_target(const ConjugateMap& map) {
  if (const auto* u = std::get_if<UnionMap>(&map)) return u->target;
  return BiasSequence::uniform();
}

bool pushforward_check(const BiasSequence& p, const BiasSequence& aux, const ConjugateMap& map,
                       const FiniteTrace& s, std::size_t cap) {
  check_enumeration_cap(2 * s.size(), cap);
  const auto wp = mask_weights(p, s.domain(), cap);
  const auto wa = mask_weights(aux, s.domain(), cap);
  const std::uint64_t target_mask = s.mask();
  Rational preimage;
  for (std::uint64_t x = 0; x < wp.size(); ++x) {
    if ((x & ~target_mask) != 0) continue;
    for (std::uint64_t y = 0; y < wa.size(); ++y)
      if ((x | y) == target_mask) preimage += wp[x] * wa[y];
  }
  return preimage == trace_measure(pushforward_target(map), s);
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::converges: return "converges";
    case Verdict::diverges: return "diverges";
    case Verdict::unknown: return "unknown";
  }
  return "unknown";
}

Certificate tail_certificate(const BiasSequence& p, unsigned long exponent, Coord start) {
  if (exponent == 0) throw DomainError("certificate exponent must be positive");
  if (start < p.prefix().size())
    throw DomainError("certificate start " + std::to_string(start) + " lies inside the explicit prefix of length " +
                      std::to_string(p.prefix().size()));
  Certificate cert;
  const Rational k{static_cast<long>(exponent)};

  if (const auto* c = std::get_if<ConstantTail>(&p.tail())) {
    if (c->value.is_zero()) {
      cert.verdict = Verdict::converges;
      cert.tail_bound = Rational{};
      cert.note = "zero tail";
    } else {
      cert.verdict = Verdict::diverges;
      cert.note = "constant tail: terms do not tend to zero";
    }
  } else if (const auto* g = std::get_if<GeometricTail>(&p.tail())) {
    // Σ_{n≥N} (C r^n)^k = C^k r^{kN} / (1 − r^k); dominates the sum over n > N.
    const Rational rk = pow(g->ratio, exponent);
    cert.verdict = Verdict::converges;
    cert.tail_bound = pow(g->scale, exponent) * pow(rk, start) / (kOne - rk);
    cert.note = "geometric series";
  } else if (const auto* pl = std::get_if<PowerLawTail>(&p.tail())) {
    const Rational s = k * pl->exponent;
    if (s <= kOne) {
      cert.verdict = Verdict::diverges;
      cert.note = "power law with k*alpha <= 1";
    } else {
      cert.verdict = Verdict::converges;
      const Rational ck = pow(pl->scale, exponent);
      const Rational excess = s - kOne;
      if (start == 0) {
        // Σ_{n≥1} n^{-s} <= 1 + 1/(s−1).
        cert.tail_bound = ck * (kOne + kOne / excess);
        cert.note = "integral test from n = 1";
      } else {
        // Σ_{n>N} n^{-s} <= ∫_N^∞ x^{-s} dx = N^{1−s}/(s−1).
        const mpz_class base = static_cast<unsigned long>(start);
        Rational lower_power;
        if (excess.denominator() == 1) {
          lower_power = pow(Rational(static_cast<long>(start)), excess.numerator().get_ui());
          cert.note = "integral test";
        } else {
          lower_power = root_lower_bound(base, excess.numerator(), excess.denominator());
          cert.note = "integral test, N^(1-k*alpha) rounded upward";
        }
        cert.tail_bound = ck / (lower_power * excess);
      }
    }
  } else {
    cert.verdict = Verdict::unknown;
    cert.note = "unspecified tail";
  }
  return cert;
}

}  // namespace filterlab
