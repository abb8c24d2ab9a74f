#pragma once

#include "filterlab/bias.hpp"
#include "filterlab/filters.hpp"
#include "filterlab/measure.hpp"
#include "filterlab/rational.hpp"
#include "filterlab/trace.hpp"

#include <string>
#include <vector>

namespace filterlab {

struct AntichainStage {
  CoordSet support;              // I_n
  std::vector<CoordSet> sets;    // A_n, members nonempty and ⊆ I_n
};

// Stages (I_n, A_n) with pairwise disjoint supports; X hits stage n iff some
// a ∈ A_n satisfies a ⊆ X.
class AntichainFamily {
public:
  AntichainFamily() = default;
  static AntichainFamily build(std::vector<AntichainStage> stages, const BiasSequence& p = BiasSequence::uniform(),
                               Rational tail_bound = {}, std::size_t cap = kDefaultEnumerationCap);
  // As build(), but declared weights must match hit_measure exactly.
  static AntichainFamily load(std::vector<AntichainStage> stages, const std::vector<Rational>& declared_weights,
                              const BiasSequence& p, Rational tail_bound = {},
                              std::size_t cap = kDefaultEnumerationCap);

  const std::vector<AntichainStage>& stages() const { return stages_; }
  const std::vector<Rational>& weights() const { return weights_; }
  const Rational& tail_bound() const { return tail_bound_; }
  std::size_t size() const { return stages_.size(); }

private:
  std::vector<AntichainStage> stages_;
  std::vector<Rational> weights_;
  Rational tail_bound_;
};

// {s ∈ J : every u ⊇ s (coordinatewise) lies in J}.
CylinderFamily upward_kernel(const CylinderFamily& J, std::size_t cap = kDefaultEnumerationCap);

// ⊆-minimal supports s⁻¹(1) of the traces, sorted lexicographically.
std::vector<CoordSet> minimal_antichain(const CylinderFamily& j_prime);

// True iff a ⊆ X↾dom for some member a.
bool hits_stage(const FiniteTrace& x, const AntichainStage& stage);

// {n : ∃a ∈ A_n, a ⊆ X}. Throws DomainError when X misses a support.
std::vector<std::size_t> support(const FiniteTrace& x, const AntichainFamily& fam);

// Supports of the base, deduplicated in first-seen order.
std::vector<std::vector<std::size_t>> star_image(const std::vector<FiniteTrace>& base, const AntichainFamily& fam);

// True iff every stage block m >= start contains a stage hit by X. The
// partition's last cut must equal the number of stages.
bool fsigma_filter_cover(const AntichainFamily& fam, const IntervalPartition& stage_partition, const FiniteTrace& x,
                         std::size_t start);

struct RapidReport {
  bool normalized = false;
  std::vector<Coord> f;               // f(n) = 1 + max coordinate of A_n; Z is counted on [0, f(n))
  std::vector<std::size_t> counts;    // |Z ∩ [0, f(n))|
  std::vector<std::string> violations;
  bool rapid_bound_holds = false;     // counts[n] <= n for every stage
  bool escape_guaranteed = false;     // normalized and rapid_bound_holds
  std::vector<std::size_t> hits;
};

// Stage i of the family is stage n = first_index + i of the normalization.
RapidReport rapid_escape(const AntichainFamily& fam, const FiniteTrace& z, std::size_t first_index = 0);

// Ascending greedy: keeps each coordinate of [0, window) whose addition leaves
// |Z ∩ [0, f(n))| <= n for every stage.
FiniteTrace greedy_rapid_witness(const AntichainFamily& fam, std::size_t window, std::size_t first_index = 0);

}  // namespace filterlab
