#include "filterlab/talagrand.hpp"

#include "filterlab/counter_rng.hpp"
#include "filterlab/errors.hpp"
#include "filterlab/measure.hpp"

#include <algorithm>
#include <gmpxx.h>
#include <limits>
#include <thread>

namespace filterlab {

namespace {

const Rational kOne{1};

std::string cell_name(const CellKey& key) {
  return "I_{" + std::to_string(key.first) + "," + std::to_string(key.second) + "}";
}

FiniteTrace trace_on(const CoordSet& window, const CoordSet& ones) {
  std::vector<bool> bits(window.size());
  for (std::size_t j = 0; j < window.size(); ++j) bits[j] = std::binary_search(ones.begin(), ones.end(), window[j]);
  return FiniteTrace(window, std::move(bits));
}

struct Part {
  CellKey key;
  CoordSet coords;
  std::size_t take = 0;
};

// Constraints in local bit positions; constraints that leave the parts can
// never be covered and are dropped.
struct LocalProblem {
  std::vector<Part> parts;
  std::map<Coord, std::size_t> index;
  std::vector<std::vector<std::size_t>> constraints;
};

LocalProblem localize(std::vector<Part> parts, const ConstraintList& cs) {
  LocalProblem lp;
  for (const auto& part : parts)
    for (Coord c : part.coords) lp.index.emplace(c, lp.index.size());
  for (const auto& J : cs.constraints()) {
    std::vector<std::size_t> local;
    bool inside = true;
    for (Coord c : J) {
      auto it = lp.index.find(c);
      if (it == lp.index.end()) {
        inside = false;
        break;
      }
      local.push_back(it->second);
    }
    if (inside) lp.constraints.push_back(std::move(local));
  }
  lp.parts = std::move(parts);
  return lp;
}

bool violates(const LocalProblem& lp, const std::vector<char>& chosen) {
  return std::any_of(lp.constraints.begin(), lp.constraints.end(), [&](const std::vector<std::size_t>& J) {
    return std::all_of(J.begin(), J.end(), [&](std::size_t i) { return chosen[i] != 0; });
  });
}

// take-subsets of coords in lexicographic order.
std::vector<CoordSet> combinations(const CoordSet& coords, std::size_t take) {
  std::vector<CoordSet> out;
  CoordSet current;
  auto rec = [&](auto&& self, std::size_t from) -> void {
    if (current.size() == take) {
      out.push_back(current);
      return;
    }
    for (std::size_t i = from; i + (take - current.size()) <= coords.size(); ++i) {
      current.push_back(coords[i]);
      self(self, i + 1);
      current.pop_back();
    }
  };
  rec(rec, 0);
  return out;
}

void select_exhaustive(const LocalProblem& lp, HalfSelection& out) {
  std::size_t total = 0;
  for (const auto& part : lp.parts) total += part.coords.size();
  if (total > kExhaustiveLimit) throw EnumerationCapError(total, kExhaustiveLimit);

  std::vector<std::vector<CoordSet>> options;
  for (const auto& part : lp.parts) options.push_back(combinations(part.coords, part.take));

  std::vector<char> chosen(lp.index.size(), 0);
  std::vector<const CoordSet*> picked(lp.parts.size(), nullptr);
  auto dfs = [&](auto&& self, std::size_t i) -> bool {
    if (violates(lp, chosen)) return false;
    if (i == lp.parts.size()) {
      ++out.explored;
      return true;
    }
    for (const auto& half : options[i]) {
      for (Coord c : half) chosen[lp.index.at(c)] = 1;
      picked[i] = &half;
      const bool found = self(self, i + 1);
      for (Coord c : half) chosen[lp.index.at(c)] = 0;
      if (found) return true;
    }
    return false;
  };
  if (dfs(dfs, 0)) {
    std::map<CellKey, CoordSet> halves;
    for (std::size_t i = 0; i < lp.parts.size(); ++i) halves[lp.parts[i].key] = *picked[i];
    out.halves = std::move(halves);
  }
}

// Draws one uniform take-subset per part for the given trial.
std::vector<CoordSet> draw_trial(const LocalProblem& lp, std::uint64_t seed, std::uint64_t trial) {
  std::vector<CoordSet> halves;
  halves.reserve(lp.parts.size());
  for (std::size_t c = 0; c < lp.parts.size(); ++c) {
    CoordSet pool = lp.parts[c].coords;
    CounterRng rng(seed, static_cast<std::uint32_t>(c), trial);
    const std::size_t take = lp.parts[c].take;
    for (std::size_t j = 0; j < take; ++j) {
      const auto r = j + rng.below(static_cast<std::uint32_t>(pool.size() - j));
      std::swap(pool[j], pool[r]);
    }
    pool.resize(take);
    std::sort(pool.begin(), pool.end());
    halves.push_back(std::move(pool));
  }
  return halves;
}

bool trial_succeeds(const LocalProblem& lp, const std::vector<CoordSet>& halves) {
  std::vector<char> chosen(lp.index.size(), 0);
  for (const auto& h : halves)
    for (Coord c : h) chosen[lp.index.at(c)] = 1;
  return !violates(lp, chosen);
}

void select_monte_carlo(const LocalProblem& lp, const MonteCarlo& mc, HalfSelection& out) {
  if (mc.trials == 0) throw ValidationError("monte carlo needs at least one trial");
  for (const auto& part : lp.parts)
    if (part.coords.size() > std::numeric_limits<std::uint32_t>::max())
      throw ValidationError("cell too large for sampling");
  out.monte_carlo = true;
  out.seed = mc.seed;
  out.trials = mc.trials;

  unsigned threads = mc.threads ? mc.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, mc.trials));
  struct Tally {
    std::uint64_t successes = 0;
    std::optional<std::uint64_t> first;
  };
  std::vector<Tally> tallies(threads);
  auto work = [&](unsigned w) {
    const std::uint64_t begin = mc.trials * w / threads;
    const std::uint64_t end = mc.trials * (w + 1) / threads;
    for (std::uint64_t t = begin; t < end; ++t) {
      if (trial_succeeds(lp, draw_trial(lp, mc.seed, t))) {
        ++tallies[w].successes;
        if (!tallies[w].first) tallies[w].first = t;
      }
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
    for (auto& th : pool) th.join();
  }
  for (const auto& t : tallies) {
    out.successes += t.successes;
    if (t.first && !out.first_success) out.first_success = t.first;
  }
  out.frequency = Rational::from_integers(mpz_class(std::to_string(out.successes)),
                                          mpz_class(std::to_string(out.trials)));
  if (out.first_success) {
    const auto halves = draw_trial(lp, mc.seed, *out.first_success);
    std::map<CellKey, CoordSet> selected;
    for (std::size_t i = 0; i < lp.parts.size(); ++i) selected[lp.parts[i].key] = halves[i];
    out.halves = std::move(selected);
  }
}

HalfSelection select_parts(std::vector<Part> parts, const ConstraintList& cs, const SelectionStrategy& strategy) {
  HalfSelection out;
  out.bounds = avoidance_bounds(cs);
  const auto lp = localize(std::move(parts), cs);
  if (const auto* mc = std::get_if<MonteCarlo>(&strategy))
    select_monte_carlo(lp, *mc, out);
  else
    select_exhaustive(lp, out);
  return out;
}

}  // namespace

HalvingGrid HalvingGrid::make(std::map<CellKey, CoordSet> cells) {
  HalvingGrid g;
  CoordSet all;
  for (auto& [key, coords] : cells) {
    const std::size_t k = key.first;
    if (k == 0) throw ValidationError("grid level 0 is excluded (cell size 1 cannot be halved)");
    if (k >= 63) throw ValidationError("grid level " + std::to_string(k) + " is too large");
    coords = make_coord_set(std::move(coords));
    if (coords.size() != (std::size_t{1} << k))
      throw ValidationError(cell_name(key) + " has " + std::to_string(coords.size()) + " points, expected 2^" +
                            std::to_string(k));
    const auto merged = set_union(all, coords);
    if (merged.size() != all.size() + coords.size()) throw ValidationError(cell_name(key) + " overlaps another cell");
    all = merged;
  }
  g.cells_ = std::move(cells);
  g.coords_ = std::move(all);
  return g;
}

HalvingGrid HalvingGrid::contiguous(std::size_t k_max, std::size_t l_max, Coord origin) {
  std::map<CellKey, CoordSet> cells;
  Coord next = origin;
  for (std::size_t k = 1; k <= k_max; ++k) {
    for (std::size_t l = 0; l < l_max; ++l) {
      const std::size_t size = std::size_t{1} << k;
      cells[{k, l}] = Interval{next, next + size}.coords();
      next += size;
    }
  }
  return make(std::move(cells));
}

const CoordSet& HalvingGrid::cell(std::size_t k, std::size_t l) const {
  auto it = cells_.find({k, l});
  if (it == cells_.end()) throw DomainError("grid has no cell " + cell_name({k, l}));
  return it->second;
}

std::vector<std::size_t> HalvingGrid::levels() const {
  std::vector<std::size_t> out;
  for (const auto& [key, coords] : cells_)
    if (out.empty() || out.back() != key.first) out.push_back(key.first);
  return out;
}

std::vector<CoordSet> HalvingGrid::row(std::size_t k) const {
  std::vector<CoordSet> out;
  for (auto it = cells_.lower_bound({k, 0}); it != cells_.end() && it->first.first == k; ++it)
    out.push_back(it->second);
  return out;
}

ConstraintList::ConstraintList(std::vector<CoordSet> constraints) {
  for (std::size_t i = 0; i < constraints.size(); ++i) {
    auto& J = constraints[i];
    if (J.empty()) throw ValidationError("constraint " + std::to_string(i) + " is empty");
    J = make_coord_set(std::move(J));
    budget_ += inverse_power_of_two(J.size());
  }
  constraints_ = std::move(constraints);
}

Rational halving_bound(std::size_t n, std::size_t m) {
  if (m > 2 * n) throw DomainError("halving bound needs m <= 2n");
  if (m > n) return Rational{};
  mpz_class num;
  mpz_class den;
  mpz_bin_uiui(num.get_mpz_t(), 2 * n - m, n - m);
  mpz_bin_uiui(den.get_mpz_t(), 2 * n, n);
  return Rational::from_integers(num, den);
}

AvoidanceBounds avoidance_bounds(const ConstraintList& cs) {
  AvoidanceBounds b{kOne - cs.budget(), kOne};
  for (const auto& J : cs.constraints()) b.product_bound *= kOne - inverse_power_of_two(J.size());
  return b;
}

HalfSelection select_halves(const HalvingGrid& grid, const ConstraintList& cs, const SelectionStrategy& strategy) {
  for (std::size_t i = 0; i < cs.size(); ++i)
    if (!is_subset(cs.constraints()[i], grid.coords()))
      throw ValidationError("constraint " + std::to_string(i) + " leaves the grid");
  std::vector<Part> parts;
  for (const auto& [key, coords] : grid.cells()) parts.push_back({key, coords, coords.size() / 2});
  return select_parts(std::move(parts), cs, strategy);
}

std::map<std::size_t, std::size_t> intersection_profile(const FiniteTrace& x, const HalvingGrid& grid) {
  if (!is_subset(grid.coords(), x.domain())) throw DomainError("window too short for the grid");
  std::map<std::size_t, std::size_t> profile;
  for (const auto& [key, coords] : grid.cells()) {
    const auto count = static_cast<std::size_t>(
        std::count_if(coords.begin(), coords.end(), [&](Coord c) { return x.value(c); }));
    auto [it, fresh] = profile.emplace(key.first, count);
    if (!fresh) it->second = std::min(it->second, count);
  }
  return profile;
}

SuccessorStep successor_step(const std::vector<FiniteTrace>& generators, const HalvingGrid& grid,
                             const std::vector<std::size_t>& schedule, const ConstraintList& cs,
                             const SelectionStrategy& strategy) {
  if (generators.empty()) throw ValidationError("successor step needs at least one generator");
  if (schedule.size() != generators.size() + 1)
    throw ValidationError("schedule needs " + std::to_string(generators.size() + 1) + " levels, got " +
                          std::to_string(schedule.size()));
  const auto& window = generators.front().domain();
  for (const auto& y : generators)
    if (y.domain() != window) throw ValidationError("generators must share one window");
  if (!is_subset(grid.coords(), window)) throw DomainError("grid overflows the generator window");
  const auto levels = grid.levels();
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (i > 0 && schedule[i] <= schedule[i - 1]) throw ValidationError("schedule must be strictly increasing");
    if (!std::binary_search(levels.begin(), levels.end(), schedule[i]))
      throw DomainError("schedule level " + std::to_string(schedule[i]) + " is not a grid level");
  }
  for (std::size_t i = 0; i < cs.size(); ++i)
    if (!is_subset(cs.constraints()[i], grid.coords()))
      throw ValidationError("constraint " + std::to_string(i) + " leaves the grid");

  SuccessorStep out;
  for (std::size_t i = 0; i + 1 < generators.size(); ++i)
    if (!is_subset(generators[i + 1].ones(), generators[i].ones()))
      out.diagnostics.push_back("generator " + std::to_string(i + 1) + " is not contained in generator " +
                                std::to_string(i));

  CoordSet xp;
  for (std::size_t i = 0; i < generators.size(); ++i) {
    const auto ones = generators[i].ones();
    for (const auto& [key, coords] : grid.cells())
      if (schedule[i] <= key.first && key.first <= schedule[i + 1])
        xp = set_union(xp, set_intersection(coords, ones));
  }
  out.x_prime = trace_on(window, xp);

  std::vector<Part> parts;
  for (const auto& [key, coords] : grid.cells()) {
    if (key.first < schedule.front() || key.first > schedule.back()) continue;
    auto p = set_intersection(coords, xp);
    if (p.size() <= 1) {
      out.emptied_cells.push_back(key);
      out.diagnostics.push_back("cell " + cell_name(key) + " keeps " + std::to_string(p.size()) +
                                " point(s) of X'; its half is empty");
    }
    out.parts[key] = p;
    const std::size_t take = p.size() / 2;
    parts.push_back({key, std::move(p), take});
  }

  out.selection = select_parts(std::move(parts), cs, strategy);
  if (!out.selection.halves) {
    out.diagnostics.push_back("no half selection avoids every constraint");
    out.meets_generator.assign(generators.size(), false);
    return out;
  }

  CoordSet chosen;
  for (const auto& [key, half] : *out.selection.halves) chosen = set_union(chosen, half);
  out.next = trace_on(window, chosen);

  for (std::size_t i = 0; i < generators.size(); ++i) {
    const bool meets = !set_intersection(chosen, generators[i].ones()).empty();
    out.meets_generator.push_back(meets);
    if (!meets) out.diagnostics.push_back("X_next misses generator " + std::to_string(i));
  }
  out.avoids_constraints = std::none_of(cs.constraints().begin(), cs.constraints().end(),
                                        [&](const CoordSet& J) { return is_subset(J, chosen); });
  if (!out.avoids_constraints) out.diagnostics.push_back("X_next contains a constraint set");
  out.certified = out.avoids_constraints && std::all_of(out.meets_generator.begin(), out.meets_generator.end(),
                                                        [](bool b) { return b; });
  return out;
}

}  // namespace filterlab
