#pragma once

// Small sets (I_n, J_n): null sets of Borel–Cantelli form, the two-cover
// decomposition of a null prefix cover, the heavy-prefix refinement against a
// witness, and covers built from increasing closed sets.

#include "filterlab/bias.hpp"
#include "filterlab/measure.hpp"
#include "filterlab/rational.hpp"
#include "filterlab/trace.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace filterlab {

struct CoverStage {
  Interval interval;
  CylinderFamily family;  // traces over `interval`
};

// Stages are 0-based. At finite scale a point x "hits stage n" iff
// x↾I_n ∈ J_n; the infinite set is {x : infinitely many hits}.
class SmallCover {
public:
  SmallCover() = default;

  // Recomputes every weight w_n = μ(V(J_n)).
  static SmallCover build(std::vector<CoverStage> stages, const BiasSequence& p, Rational tail_bound = {},
                          bool certified = true, std::size_t cap = kDefaultEnumerationCap);
  // As build(), but checks declared weights against the recomputed ones.
  static SmallCover load(std::vector<CoverStage> stages, const std::vector<Rational>& declared_weights,
                         Rational tail_bound, bool certified, const BiasSequence& p,
                         std::size_t cap = kDefaultEnumerationCap);

  const std::vector<CoverStage>& stages() const { return stages_; }
  const std::vector<Rational>& weights() const { return weights_; }
  const Rational& tail_bound() const { return tail_bound_; }
  bool certified() const { return certified_; }
  std::size_t size() const { return stages_.size(); }
  bool empty() const { return stages_.empty(); }

private:
  std::vector<CoverStage> stages_;
  std::vector<Rational> weights_;
  Rational tail_bound_;
  bool certified_ = true;
};

// {n : x↾I_n ∈ J_n}. Throws DomainError naming the first interval that x
// does not cover.
std::vector<std::size_t> stage_hits(const FiniteTrace& x, const SmallCover& cover);

// Σ_{n≥n0} w_n + tail_bound.
Rational borel_cantelli_bound(const SmallCover& cover, std::size_t from_stage);

// F_j ⊆ 2^j: level j holds traces with domain [0, j).
struct PrefixCover {
  std::map<std::size_t, std::set<FiniteTrace>> levels;
  std::map<std::size_t, Rational> weights;
  Rational tail_bound;

  // Validates domains and recomputes the weights.
  static PrefixCover build(std::map<std::size_t, std::set<FiniteTrace>> levels, const BiasSequence& p,
                           Rational tail_bound = {}, std::size_t cap = kDefaultEnumerationCap);
  Rational weight(std::size_t level) const;
};

// opens[n] lists the basic-open generators s^n_m of G_n; each generator's
// domain must be an initial segment [0, len).
PrefixCover prefix_from_open_cover(const std::vector<std::vector<FiniteTrace>>& opens, const BiasSequence& p,
                                   std::size_t cap = kDefaultEnumerationCap);

// Positive terms ε_k, an upper bound on the sum of the unlisted ones and,
// for geometric schedules, the ratio used to extend the listed terms.
class EpsilonSchedule {
public:
  EpsilonSchedule() = default;
  EpsilonSchedule(std::vector<Rational> terms, Rational tail_bound, std::optional<Rational> ratio = std::nullopt);
  // first * ratio^k for k < count; tail bound is the exact geometric remainder.
  static EpsilonSchedule geometric(const Rational& first, const Rational& ratio, std::size_t count);

  std::optional<Rational> term(std::size_t k) const;
  // Upper bound on Σ_{k≥from} ε_k.
  Rational sum_from(std::size_t from) const;
  // Σ 2^k ε_k < ∞ is certified only by a geometric tail with ratio < 1/2.
  bool supports_refinement() const;

  const std::vector<Rational>& terms() const { return terms_; }
  const Rational& tail_bound() const { return tail_bound_; }
  const std::optional<Rational>& ratio() const { return ratio_; }

private:
  std::vector<Rational> terms_;
  Rational tail_bound_;
  std::optional<Rational> ratio_;
};

struct StageLedger {
  std::size_t stage = 0;
  Interval interval;
  Interval levels;           // prefix levels i whose F_i feed this stage
  std::size_t epsilon_index = 0;
  Rational epsilon;
  Rational weight;           // μ(V(J))
  Rational proof_bound;      // q(start) · Σ_{i ∈ levels} w_i
  bool within_epsilon = false;
};

struct Decomposition {
  // c_0 = n_0 = 0, c_1 = m_1, c_2 = n_1, c_3 = m_2, ...
  std::vector<Coord> cuts;
  std::vector<Coord> n_cuts;  // n_0, n_1, ...
  std::vector<Coord> m_cuts;  // m_0 = 0, m_1, m_2, ...

  // Stage k of cover_a is J_k over [n_k, n_{k+1}); stage k of cover_b is
  // J'_{k+1} over [m_{k+1}, m_{k+2}). Both are bounded by ε_k.
  SmallCover cover_a;
  SmallCover cover_b;
  std::vector<StageLedger> ledger_a;
  std::vector<StageLedger> ledger_b;

  // J'_0 over [0, m_1): a finite leading stage with no ε bound.
  std::optional<CoverStage> preamble;
  Rational preamble_weight;

  bool certified = true;
  std::optional<std::size_t> exhausted_at;
  std::vector<std::string> diagnostics;
};

// Splits the prefix cover into two small covers along the alternating cut
// recursion with q(n) = ∏_{i<n} p_i^{-1}. Never throws on window
// exhaustion; the partial result is returned with certified = false.
Decomposition decompose_null_cover(const PrefixCover& prefix, const EpsilonSchedule& eps, const BiasSequence& p,
                                   std::size_t window, std::size_t cap = kDefaultEnumerationCap);

struct HeavySet {
  Interval interval;              // where the returned traces live
  std::set<FiniteTrace> traces;
  Rational threshold;
  Rational heavy_measure;         // μ(V(S))
  Rational family_measure;        // μ(V(J))
  bool markov_holds = false;      // threshold · μ(V(S)) <= μ(V(J))
};

// {t ∈ 2^{[a,split)} : μ(V({s : t⌢s ∈ J})) > threshold} for J over [a, b).
HeavySet heavy_prefixes(const CylinderFamily& J, Coord split, const Rational& threshold, const BiasSequence& p,
                        std::size_t cap = kDefaultEnumerationCap);
// {t ∈ 2^{[split,b)} : μ(V({s : s⌢t ∈ J})) > threshold} for J over [a, b).
HeavySet heavy_suffixes(const CylinderFamily& J, Coord split, const Rational& threshold, const BiasSequence& p,
                        std::size_t cap = kDefaultEnumerationCap);

// Per stage k the union S_k ∪ S'_k over [n_k, m_{k+1}), with threshold
// 2^{-(k+1)} on both sides.
struct HeavyStage {
  Interval interval;
  std::set<FiniteTrace> traces;
  std::optional<HeavySet> prefix_part;  // S_k from cover_a stage k
  std::optional<HeavySet> suffix_part;  // S'_k from cover_b stage k-1
};
std::vector<HeavyStage> build_heavy_stages(const Decomposition& d, const BiasSequence& p,
                                           std::size_t cap = kDefaultEnumerationCap);

struct RefinedStage {
  std::size_t u = 0;
  std::size_t cover_stage = 0;  // k_u
  Interval interval;            // U_u = [m_{k_u+1}, n_{k_u+1})
  Rational weight;
  Rational bound;               // 2^{-u}
  bool mature = false;
  bool within_bound = false;
};

struct Refinement {
  SmallCover cover;  // (U_u, T_u)
  std::vector<RefinedStage> stages;
  bool certified = true;
};

// The witness cover (U_u, T_u) built from the stages k_u of cover_a hit by X.
// Stages u >= maturity must satisfy μ(V(T_u)) < 2^{-u}; at those stages X must
// avoid the heavy sets, otherwise DomainError names the stage.
Refinement refine_with_witness(const SmallCover& cover_a, const SmallCover& cover_b,
                               const std::vector<HeavyStage>& heavy, const FiniteTrace& x, std::size_t maturity,
                               const BiasSequence& p, std::size_t cap = kDefaultEnumerationCap);

// Z(n) = X(n) on ⋃U, Y(n) elsewhere. X and Y share their domain.
FiniteTrace blend(const FiniteTrace& x, const FiniteTrace& y, const std::vector<Interval>& u_stages);

// closed[n][m] = C^n_m ⊆ 2^m.
using ClosedStages = std::vector<std::map<std::size_t, std::set<FiniteTrace>>>;

struct FsigmaStage {
  std::size_t n = 0;
  Interval interval;       // U_n = [k_n, k_{n+1})
  Rational closed_weight;  // μ(V(C^n_{k_{n+1}}))
  Rational weighted;       // q(k_n) · closed_weight
  Rational weight;         // μ(V(T_n)) <= weighted
  bool within_budget = false;  // weighted <= 2^{-n}
};

struct FsigmaCover {
  SmallCover cover;
  std::vector<FsigmaStage> stages;
  Rational weighted_sum;
  bool certified = true;
};

FsigmaCover fsigma_to_small(const ClosedStages& closed, const std::vector<Coord>& cuts, const BiasSequence& p,
                            std::size_t cap = kDefaultEnumerationCap);

}  // namespace filterlab
