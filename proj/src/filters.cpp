#include "filterlab/filters.hpp"

#include "filterlab/errors.hpp"
#include "filterlab/measure.hpp"

#include <algorithm>

namespace filterlab {

namespace {

bool meets_beyond(const CoordSet& set, std::size_t margin, std::size_t window) {
  return std::any_of(set.begin(), set.end(), [&](Coord c) { return c >= margin && c < window; });
}

CoordSet full_window(std::size_t window) { return Interval{0, window}.coords(); }

// Re-indexes t↾coords to positions 0..|coords|-1.
FiniteTrace reindexed(const FiniteTrace& t, const CoordSet& coords) {
  std::vector<Coord> dom(coords.size());
  std::vector<bool> bits(coords.size());
  for (std::size_t j = 0; j < coords.size(); ++j) {
    dom[j] = j;
    bits[j] = t.value(coords[j]);
  }
  return FiniteTrace(std::move(dom), std::move(bits));
}

}  // namespace

IntervalPartition IntervalPartition::make(std::vector<Coord> cuts) {
  if (cuts.empty() || cuts.front() != 0) throw ValidationError("partition cuts must start at 0");
  for (std::size_t i = 1; i < cuts.size(); ++i)
    if (cuts[i] <= cuts[i - 1]) throw ValidationError("partition cuts must be strictly increasing");
  IntervalPartition p;
  p.cuts_ = std::move(cuts);
  return p;
}

std::vector<Interval> IntervalPartition::blocks() const {
  std::vector<Interval> out;
  for (std::size_t n = 0; n < size(); ++n) out.push_back(block(n));
  return out;
}

FilterBase FilterBase::make(std::size_t window, const std::vector<CoordSet>& sets, std::size_t margin) {
  std::vector<FiniteTrace> gens;
  for (const auto& s : sets) {
    const auto set = make_coord_set(s);
    if (!set.empty() && set.back() >= window)
      throw ValidationError("generator element " + std::to_string(set.back()) + " outside window [0," +
                            std::to_string(window) + ")");
    gens.push_back(FiniteTrace::indicator(window, set));
  }
  return from_traces(window, std::move(gens), margin);
}

FilterBase FilterBase::from_traces(std::size_t window, std::vector<FiniteTrace> generators, std::size_t margin) {
  FilterBase b;
  b.window = window;
  b.margin = margin;
  const auto dom = full_window(window);
  for (auto& g : generators) {
    if (g.domain() != dom) throw ValidationError("generator " + to_string(g) + " is not over the window");
    if (std::find(b.generators.begin(), b.generators.end(), g) == b.generators.end())
      b.generators.push_back(std::move(g));
  }
  return b;
}

bool fip_check(const FilterBase& base) {
  // The full intersection is the smallest, so it decides every subfamily.
  CoordSet common = full_window(base.window);
  for (const auto& g : base.generators) common = set_intersection(common, g.ones());
  return meets_beyond(common, base.margin, base.window);
}

bool is_positive(const FilterBase& base, const CoordSet& x) {
  FilterBase extended = base;
  extended.generators.push_back(FiniteTrace::indicator(base.window, make_coord_set(x)));
  return fip_check(extended);
}

FilterBase trace_filter(const FilterBase& base, const CoordSet& x_in) {
  const auto x = make_coord_set(x_in);
  if (!x.empty() && x.back() >= base.window) throw DomainError("X leaves the window");
  if (!is_positive(base, x)) throw DomainError("X is not positive for the filter base");
  std::vector<CoordSet> sets;
  for (const auto& g : base.generators) {
    CoordSet s;
    for (std::size_t j = 0; j < x.size(); ++j)
      if (g.value(x[j])) s.push_back(j);
    sets.push_back(std::move(s));
  }
  const auto margin =
      static_cast<std::size_t>(std::count_if(x.begin(), x.end(), [&](Coord c) { return c < base.margin; }));
  return FilterBase::make(x.size(), sets, margin);
}

bool factorization_check(const BiasSequence& p, const CoordSet& x, const FiniteTrace& t) {
  const auto inside = set_intersection(t.domain(), make_coord_set(x));
  const auto outside = set_difference(t.domain(), inside);
  const Rational left = trace_measure(p.restricted_to(inside), reindexed(t, inside));
  const Rational right = trace_measure(p.restricted_to(outside), reindexed(t, outside));
  return trace_measure(p, t) == left * right;
}

BaireReport baire_check(const FilterBase& base, const IntervalPartition& part) {
  if (part.end() > base.window) throw DomainError("partition extends beyond the window");
  std::vector<std::pair<BaireProbe, CoordSet>> probes;
  const auto n = base.generators.size();
  for (std::size_t i = 0; i < n; ++i)
    probes.push_back({{"g" + std::to_string(i), {i}, {}}, base.generators[i].ones()});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      probes.push_back({{"g" + std::to_string(i) + "&g" + std::to_string(j), {i, j}, {}},
                        set_intersection(base.generators[i].ones(), base.generators[j].ones())});

  BaireReport report;
  report.witnesses = true;
  for (auto& [probe, set] : probes) {
    for (std::size_t b = 0; b < part.size(); ++b) {
      const auto iv = part.block(b);
      const bool meets = std::any_of(set.begin(), set.end(), [&](Coord c) { return iv.contains(c); });
      if (!meets) probe.misses.push_back(b);
    }
    if (probe.misses.size() > base.margin) report.witnesses = false;
    report.probes.push_back(std::move(probe));
  }
  return report;
}

BaireSearch baire_search(const FilterBase& base) {
  std::vector<CoordSet> probes;
  const auto n = base.generators.size();
  for (std::size_t i = 0; i < n; ++i) probes.push_back(base.generators[i].ones());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      probes.push_back(set_intersection(base.generators[i].ones(), base.generators[j].ones()));

  // member[c] lists the probes containing c.
  std::vector<std::vector<std::size_t>> member(base.window);
  for (std::size_t q = 0; q < probes.size(); ++q)
    for (Coord c : probes[q]) member[c].push_back(q);

  std::vector<Coord> cuts{0};
  std::vector<char> met(probes.size(), 0);
  std::size_t open = probes.size();
  for (Coord c = 0; c < base.window; ++c) {
    for (std::size_t q : member[c])
      if (!met[q]) {
        met[q] = 1;
        --open;
      }
    if (open == 0) {
      cuts.push_back(c + 1);
      std::fill(met.begin(), met.end(), 0);
      open = probes.size();
    }
  }

  BaireSearch out;
  if (cuts.size() < 2) {
    out.reason = "no block closes within the window [0," + std::to_string(base.window) + ")";
    return out;
  }
  out.partition = IntervalPartition::make(std::move(cuts));
  return out;
}

FilterBase canonical_filter(const CanonicalKind& kind, std::size_t window, std::size_t cap) {
  if (const auto* f = std::get_if<FrechetKind>(&kind)) {
    if (f->k_max >= window) throw DomainError("frechet k_max must lie inside the window");
    std::vector<CoordSet> sets;
    for (std::size_t j = 0; j <= f->k_max; ++j) sets.push_back(Interval{j, window}.coords());
    return FilterBase::make(window, sets);
  }

  const auto& g = std::get<GridHittingKind>(kind);
  if (!g.grid.coords().empty() && g.grid.coords().back() >= window) throw DomainError("grid overflows the window");
  const auto row = g.grid.row(g.level);
  if (row.empty()) throw DomainError("grid has no cells at level " + std::to_string(g.level));
  // log2 of the transversal count is level * |row|.
  check_enumeration_cap(g.level * row.size(), cap);
  std::vector<CoordSet> sets{{}};
  for (const auto& cell : row) {
    std::vector<CoordSet> grown;
    grown.reserve(sets.size() * cell.size());
    for (const auto& s : sets)
      for (Coord c : cell) {
        auto t = s;
        t.push_back(c);
        grown.push_back(std::move(t));
      }
    sets = std::move(grown);
  }
  return FilterBase::make(window, sets);
}

bool meets_every_cell(const FiniteTrace& x, const HalvingGrid& grid, std::size_t level) {
  const auto row = grid.row(level);
  return std::all_of(row.begin(), row.end(), [&](const CoordSet& cell) {
    return std::any_of(cell.begin(), cell.end(), [&](Coord c) { return x.at(c).value_or(false); });
  });
}

}  // namespace filterlab
