#include "filterlab/antichains.hpp"

#include "filterlab/errors.hpp"

#include <algorithm>

namespace filterlab {

namespace {

void validate(const std::vector<AntichainStage>& stages) {
  CoordSet used;
  for (std::size_t n = 0; n < stages.size(); ++n) {
    const auto& st = stages[n];
    const std::string where = "stage " + std::to_string(n);
    if (st.support != make_coord_set(st.support)) throw ValidationError(where + " support must be sorted and distinct");
    const auto merged = set_union(used, st.support);
    if (merged.size() != used.size() + st.support.size())
      throw ValidationError(where + " support overlaps an earlier stage");
    used = merged;
    for (std::size_t i = 0; i < st.sets.size(); ++i) {
      const auto& a = st.sets[i];
      if (a.empty()) throw ValidationError(where + " member " + std::to_string(i) + " is empty");
      if (a != make_coord_set(a)) throw ValidationError(where + " member " + std::to_string(i) + " is not sorted");
      if (!is_subset(a, st.support))
        throw ValidationError(where + " member " + std::to_string(i) + " leaves the support");
      for (std::size_t j = 0; j < st.sets.size(); ++j)
        if (i != j && is_subset(a, st.sets[j]))
          throw ValidationError(where + " is not an antichain: member " + std::to_string(i) + " is contained in member " +
                                std::to_string(j));
    }
  }
}

bool contains_set(const FiniteTrace& x, const CoordSet& a) {
  return std::all_of(a.begin(), a.end(), [&](Coord c) { return x.at(c).value_or(false); });
}

Coord stage_f(const AntichainStage& st) {
  Coord f = 0;
  for (const auto& a : st.sets) f = std::max(f, a.back() + 1);
  return f;
}

}  // namespace

AntichainFamily AntichainFamily::build(std::vector<AntichainStage> stages, const BiasSequence& p,
                                       Rational tail_bound, std::size_t cap) {
  validate(stages);
  if (tail_bound.sign() < 0) throw ValidationError("tail bound must be non-negative");
  AntichainFamily fam;
  for (const auto& st : stages) fam.weights_.push_back(hit_measure(p, st.sets, st.support, cap));
  fam.stages_ = std::move(stages);
  fam.tail_bound_ = std::move(tail_bound);
  return fam;
}

AntichainFamily AntichainFamily::load(std::vector<AntichainStage> stages, const std::vector<Rational>& declared_weights,
                                      const BiasSequence& p, Rational tail_bound, std::size_t cap) {
  if (declared_weights.size() != stages.size())
    throw ValidationError("family lists " + std::to_string(declared_weights.size()) + " weights for " +
                          std::to_string(stages.size()) + " stages");
  auto fam = build(std::move(stages), p, std::move(tail_bound), cap);
  for (std::size_t n = 0; n < declared_weights.size(); ++n)
    if (declared_weights[n] != fam.weights_[n])
      throw ValidationError("stage " + std::to_string(n) + " declares weight " + declared_weights[n].str() +
                            " but its hit measure is " + fam.weights_[n].str());
  return fam;
}

CylinderFamily upward_kernel(const CylinderFamily& J, std::size_t cap) {
  const std::size_t width = J.domain().size();
  check_enumeration_cap(width, cap);
  const std::uint64_t count = std::uint64_t{1} << width;
  std::vector<char> good(count, 0);
  for (const auto& t : J.traces()) good[t.mask()] = 1;
  // Descending order visits every superset before its subsets.
  for (std::uint64_t m = count; m-- > 0;) {
    if (!good[m]) continue;
    for (std::size_t b = 0; b < width; ++b) {
      const std::uint64_t bit = std::uint64_t{1} << b;
      if (!(m & bit) && !good[m | bit]) {
        good[m] = 0;
        break;
      }
    }
  }
  CylinderFamily out(J.domain());
  for (const auto& t : J.traces())
    if (good[t.mask()]) out.insert(t);
  return out;
}

std::vector<CoordSet> minimal_antichain(const CylinderFamily& j_prime) {
  std::vector<CoordSet> supports;
  for (const auto& t : j_prime.traces()) supports.push_back(t.ones());
  std::sort(supports.begin(), supports.end());
  supports.erase(std::unique(supports.begin(), supports.end()), supports.end());
  std::vector<CoordSet> out;
  for (const auto& s : supports) {
    const bool minimal = std::none_of(supports.begin(), supports.end(), [&](const CoordSet& o) {
      return o.size() < s.size() && is_subset(o, s);
    });
    if (minimal) out.push_back(s);
  }
  return out;
}

bool hits_stage(const FiniteTrace& x, const AntichainStage& stage) {
  return std::any_of(stage.sets.begin(), stage.sets.end(), [&](const CoordSet& a) { return contains_set(x, a); });
}

std::vector<std::size_t> support(const FiniteTrace& x, const AntichainFamily& fam) {
  for (std::size_t n = 0; n < fam.size(); ++n)
    if (!is_subset(fam.stages()[n].support, x.domain()))
      throw DomainError("window too short: stage " + std::to_string(n) + " support is not covered");
  std::vector<std::size_t> out;
  for (std::size_t n = 0; n < fam.size(); ++n)
    if (hits_stage(x, fam.stages()[n])) out.push_back(n);
  return out;
}

std::vector<std::vector<std::size_t>> star_image(const std::vector<FiniteTrace>& base, const AntichainFamily& fam) {
  std::vector<std::vector<std::size_t>> out;
  for (const auto& x : base) {
    auto s = support(x, fam);
    if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(std::move(s));
  }
  return out;
}

bool fsigma_filter_cover(const AntichainFamily& fam, const IntervalPartition& stage_partition, const FiniteTrace& x,
                         std::size_t start) {
  if (stage_partition.end() != fam.size())
    throw DomainError("stage partition covers " + std::to_string(stage_partition.end()) + " stages but the family has " +
                      std::to_string(fam.size()));
  const auto hits = support(x, fam);
  for (std::size_t m = start; m < stage_partition.size(); ++m) {
    const auto block = stage_partition.block(m);
    if (std::none_of(hits.begin(), hits.end(), [&](std::size_t n) { return block.contains(n); })) return false;
  }
  return true;
}

RapidReport rapid_escape(const AntichainFamily& fam, const FiniteTrace& z, std::size_t first_index) {
  RapidReport r;
  r.normalized = true;
  const auto uniform = BiasSequence::uniform();
  const auto& stages = fam.stages();
  std::vector<std::optional<Coord>> lo(stages.size());
  std::vector<std::optional<Coord>> hi(stages.size());
  for (std::size_t i = 0; i < stages.size(); ++i) {
    const std::size_t n = first_index + i;
    const auto& st = stages[i];
    const std::string where = "stage " + std::to_string(n);
    for (const auto& a : st.sets) {
      if (a.size() < n + 1) {
        r.normalized = false;
        r.violations.push_back(where + " has a member with " + std::to_string(a.size()) + " < " +
                               std::to_string(n + 1) + " elements");
        break;
      }
    }
    if (st.support.size() <= kMaxEnumerationCap) {
      const auto w = hit_measure(uniform, st.sets, st.support, kMaxEnumerationCap);
      if (w >= inverse_power_of_two(n + 1)) {
        r.normalized = false;
        r.violations.push_back(where + " has uniform measure " + w.str() + " >= 2^-" + std::to_string(n + 1));
      }
    } else {
      r.normalized = false;
      r.violations.push_back(where + " support is too large to measure");
    }
    for (const auto& a : st.sets) {
      lo[i] = lo[i] ? std::min(*lo[i], a.front()) : a.front();
      hi[i] = hi[i] ? std::max(*hi[i], a.back()) : a.back();
    }
    r.f.push_back(stage_f(st));
  }
  for (std::size_t i = 0; i < stages.size(); ++i)
    for (std::size_t j = 0; j <= i; ++j)
      if (hi[i] && lo[j] && *hi[i] < *lo[j]) {
        r.normalized = false;
        r.violations.push_back("max A_" + std::to_string(first_index + i) + " < min A_" +
                               std::to_string(first_index + j));
      }

  r.rapid_bound_holds = true;
  const auto ones = z.ones();
  for (std::size_t i = 0; i < stages.size(); ++i) {
    const auto count = static_cast<std::size_t>(std::lower_bound(ones.begin(), ones.end(), r.f[i]) - ones.begin());
    r.counts.push_back(count);
    if (r.f[i] > 0 && !z.covers({0, r.f[i]})) throw DomainError("window too short for stage " + std::to_string(i));
    if (count > first_index + i) r.rapid_bound_holds = false;
  }
  r.escape_guaranteed = r.normalized && r.rapid_bound_holds;
  r.hits = support(z, fam);
  return r;
}

FiniteTrace greedy_rapid_witness(const AntichainFamily& fam, std::size_t window, std::size_t first_index) {
  std::vector<Coord> f;
  for (const auto& st : fam.stages()) f.push_back(stage_f(st));
  std::vector<std::size_t> counts(f.size(), 0);
  CoordSet z;
  for (Coord c = 0; c < window; ++c) {
    bool ok = true;
    for (std::size_t i = 0; i < f.size() && ok; ++i)
      if (c < f[i] && counts[i] + 1 > first_index + i) ok = false;
    if (!ok) continue;
    z.push_back(c);
    for (std::size_t i = 0; i < f.size(); ++i)
      if (c < f[i]) ++counts[i];
  }
  return FiniteTrace::indicator(window, z);
}

}  // namespace filterlab
