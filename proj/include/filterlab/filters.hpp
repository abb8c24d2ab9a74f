#pragma once

#include "filterlab/bias.hpp"
#include "filterlab/talagrand.hpp"
#include "filterlab/trace.hpp"

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace filterlab {

// Blocks I_n = [c_n, c_{n+1}) for cuts 0 = c_0 < c_1 < ...
class IntervalPartition {
public:
  IntervalPartition() = default;
  static IntervalPartition make(std::vector<Coord> cuts);

  const std::vector<Coord>& cuts() const { return cuts_; }
  std::size_t size() const { return cuts_.empty() ? 0 : cuts_.size() - 1; }
  Interval block(std::size_t n) const { return {cuts_[n], cuts_[n + 1]}; }
  std::vector<Interval> blocks() const;
  Coord end() const { return cuts_.empty() ? 0 : cuts_.back(); }

  friend bool operator==(const IntervalPartition&, const IntervalPartition&) = default;

private:
  std::vector<Coord> cuts_;
};

// Finite-window filter base. "All but finitely many" is read as "all but at
// most `margin` many", and "infinite" as "meets [margin, window)".
struct FilterBase {
  std::size_t window = 0;
  std::vector<FiniteTrace> generators;  // each over [0, window)
  std::size_t margin = 1;

  // Generators are deduplicated, keeping the first occurrence.
  static FilterBase make(std::size_t window, const std::vector<CoordSet>& sets, std::size_t margin = 1);
  static FilterBase from_traces(std::size_t window, std::vector<FiniteTrace> generators, std::size_t margin = 1);
};

bool fip_check(const FilterBase& base);
bool is_positive(const FilterBase& base, const CoordSet& x);

// {X ∩ Y} re-indexed along the ascending elements of X; the margin becomes
// the number of elements of X below the old margin. Throws DomainError when
// X is not positive.
FilterBase trace_filter(const FilterBase& base, const CoordSet& x);

// μ_p̂([t]) = μ_{p̂↾X}([t↾X]) · μ_{p̂↾(ω∖X)}([t↾(ω∖X)]).
bool factorization_check(const BiasSequence& p, const CoordSet& x, const FiniteTrace& t);

struct BaireProbe {
  std::string label;             // "g3" or "g1&g4"
  std::vector<std::size_t> generator_indices;
  std::vector<std::size_t> misses;  // block indices the probe does not meet
};

struct BaireReport {
  std::vector<BaireProbe> probes;
  bool witnesses = false;  // every probe misses at most `margin` blocks
};

// Probes every generator and every pairwise intersection of generators.
BaireReport baire_check(const FilterBase& base, const IntervalPartition& part);

struct BaireSearch {
  std::optional<IntervalPartition> partition;
  std::string reason;
};

// Greedy left to right: a block closes at the earliest point where every probe
// has met it. The unclosed remainder of the window is dropped.
BaireSearch baire_search(const FilterBase& base);

struct FrechetKind {
  std::size_t k_max = 0;
};
struct GridHittingKind {
  HalvingGrid grid;
  std::size_t level = 1;
};
using CanonicalKind = std::variant<FrechetKind, GridHittingKind>;

// frechet: [j, N) for j <= k_max. grid_hitting: every transversal of the
// level-k cells, i.e. the minimal sets meeting each I_{k,l}.
FilterBase canonical_filter(const CanonicalKind& kind, std::size_t window, std::size_t cap = 20);

bool meets_every_cell(const FiniteTrace& x, const HalvingGrid& grid, std::size_t level);

}  // namespace filterlab
