#pragma once

#include "filterlab/bias.hpp"
#include "filterlab/rational.hpp"
#include "filterlab/trace.hpp"

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace filterlab {

// Operations enumerating 2^I refuse |I| above this unless the caller passes a
// larger cap.
inline constexpr std::size_t kDefaultEnumerationCap = 20;
// Hard ceiling on any override; 2^30 exact weights do not fit in memory anyway.
inline constexpr std::size_t kMaxEnumerationCap = 30;

void check_enumeration_cap(std::size_t size, std::size_t cap);

// ∏_{i ∈ dom(t)} (p_i if t(i)=1 else 1−p_i).
Rational trace_measure(const BiasSequence& p, const FiniteTrace& t);

// weights[mask] = trace_measure(p, from_mask(domain, mask)) for every mask,
// built by doubling (2^|domain| multiplications in total).
std::vector<Rational> mask_weights(const BiasSequence& p, const CoordSet& domain,
                                   std::size_t cap = kDefaultEnumerationCap);

// μ_p̂(V(J)). Traces sharing a domain are disjoint events, so this is a sum.
Rational family_measure(const BiasSequence& p, const CylinderFamily& J,
                        std::size_t cap = kDefaultEnumerationCap);

// μ({X : ∃a ∈ stage_sets, a ⊆ X}) computed by enumerating 2^I.
Rational hit_measure(const BiasSequence& p, const std::vector<CoordSet>& stage_sets,
                     const CoordSet& I, std::size_t cap = kDefaultEnumerationCap);

// φ(X,Y) = max(X,Y) pushes μ_p̂ × μ_q̂ to the uniform measure when
// (1−p_n)(1−q_n) = 1/2.
struct MaxMap {};
// φ(X,Y) = X ∪ Y pushes μ_p̂ × μ_r̂ to μ_q̂ when r_n = 1 − (1−q_n)/(1−p_n).
struct UnionMap {
  BiasSequence target;
};
using ConjugateMap = std::variant<MaxMap, UnionMap>;

// The conjugate sequence for the given map; entries lie in [0, 1/2].
// Throws DomainError("not dominated ...") for UnionMap when p_n > q_n.
BiasSequence conjugate_bias(const BiasSequence& p, const ConjugateMap& map);

// The measure the map pushes μ_p̂ × μ_aux forward to (uniform for MaxMap).
BiasSequence pushforward_target(const ConjugateMap& map);

// Exact check of μ_target([s]) = (μ_p̂ × μ_aux)(φ⁻¹[s]) by enumerating all
// pairs of traces over dom(s). Requires 2|dom(s)| <= cap.
bool pushforward_check(const BiasSequence& p, const BiasSequence& aux, const ConjugateMap& map,
                       const FiniteTrace& s, std::size_t cap = kDefaultEnumerationCap);

enum class Verdict { converges, diverges, unknown };
std::string to_string(Verdict v);

struct Certificate {
  Verdict verdict = Verdict::unknown;
  // Upper bound on Σ_{n>N} p_n^k when the verdict is `converges`.
  std::optional<Rational> tail_bound;
  std::string note;
};

// Convergence certificate for Σ p_n^k over the tail class beyond `start`.
// Requires start >= prefix length.
Certificate tail_certificate(const BiasSequence& p, unsigned long exponent, Coord start);

}  // namespace filterlab
