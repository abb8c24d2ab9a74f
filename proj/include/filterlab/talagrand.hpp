#pragma once

#include "filterlab/rational.hpp"
#include "filterlab/trace.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace filterlab {

using CellKey = std::pair<std::size_t, std::size_t>;  // (k, l)

// Disjoint cells I_{k,l} with |I_{k,l}| = 2^k, k >= 1.
class HalvingGrid {
public:
  HalvingGrid() = default;
  static HalvingGrid make(std::map<CellKey, CoordSet> cells);
  // Consecutive intervals starting at `origin`, level-major: I_{1,0}, I_{1,1}, ..., I_{2,0}, ...
  static HalvingGrid contiguous(std::size_t k_max, std::size_t l_max, Coord origin = 0);

  const std::map<CellKey, CoordSet>& cells() const { return cells_; }
  const CoordSet& cell(std::size_t k, std::size_t l) const;
  std::vector<std::size_t> levels() const;
  // Cells at level k in order of l.
  std::vector<CoordSet> row(std::size_t k) const;
  const CoordSet& coords() const { return coords_; }
  std::size_t total_size() const { return coords_.size(); }

private:
  std::map<CellKey, CoordSet> cells_;
  CoordSet coords_;
};

class ConstraintList {
public:
  ConstraintList() = default;
  explicit ConstraintList(std::vector<CoordSet> constraints);

  const std::vector<CoordSet>& constraints() const { return constraints_; }
  // Σ 2^{-|J_k|}
  const Rational& budget() const { return budget_; }
  std::size_t size() const { return constraints_.size(); }
  bool empty() const { return constraints_.empty(); }

private:
  std::vector<CoordSet> constraints_;
  Rational budget_;
};

// H(m) = C(2n−m, n−m) / C(2n, n): the share of n-subsets of a 2n-set that
// contain a fixed m-set. Zero for m > n; requires m <= 2n.
Rational halving_bound(std::size_t n, std::size_t m);

struct AvoidanceBounds {
  Rational union_bound;    // 1 − Σ 2^{-|J|}
  Rational product_bound;  // ∏ (1 − 2^{-|J|})
};
AvoidanceBounds avoidance_bounds(const ConstraintList& cs);

inline constexpr std::size_t kExhaustiveLimit = 16;

struct Exhaustive {};
struct MonteCarlo {
  std::uint64_t seed = 0;
  std::uint64_t trials = 0;
  unsigned threads = 0;  // 0 = hardware concurrency
};
using SelectionStrategy = std::variant<Exhaustive, MonteCarlo>;

struct HalfSelection {
  std::optional<std::map<CellKey, CoordSet>> halves;
  bool monte_carlo = false;
  std::uint64_t explored = 0;  // exhaustive: complete selections examined
  std::uint64_t seed = 0;
  std::uint64_t trials = 0;
  std::uint64_t successes = 0;
  std::optional<std::uint64_t> first_success;
  Rational frequency;  // successes / trials
  AvoidanceBounds bounds;
};

// Picks I'_{k,l} ⊆ I_{k,l} of half size with no constraint inside ⋃ I'.
// Failure to find one is a value; a constraint outside the grid throws.
HalfSelection select_halves(const HalvingGrid& grid, const ConstraintList& cs, const SelectionStrategy& strategy);

// a_k = min_l |X ∩ I_{k,l}|, keyed by level.
std::map<std::size_t, std::size_t> intersection_profile(const FiniteTrace& x, const HalvingGrid& grid);

struct SuccessorStep {
  FiniteTrace x_prime;               // ⋃_i (Y_i ∩ band_i)
  std::optional<FiniteTrace> next;   // union of the selected halves
  HalfSelection selection;
  std::map<CellKey, CoordSet> parts; // X' ∩ I_{k,l} for in-band cells
  std::vector<CellKey> emptied_cells;
  std::vector<bool> meets_generator;
  bool avoids_constraints = false;
  bool certified = false;
  std::vector<std::string> diagnostics;
};

// Generators Y_1..Y_n over a common window; schedule k_1 < ... < k_{n+1} of
// grid levels; band i is the cells with k_i <= k <= k_{i+1}.
SuccessorStep successor_step(const std::vector<FiniteTrace>& generators, const HalvingGrid& grid,
                             const std::vector<std::size_t>& schedule, const ConstraintList& cs,
                             const SelectionStrategy& strategy = Exhaustive{});

}  // namespace filterlab
