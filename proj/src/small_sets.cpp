#include "filterlab/small_sets.hpp"

#include "filterlab/errors.hpp"

#include <algorithm>

namespace filterlab {

namespace {

const Rational kOne{1};

Interval interval_of(const CylinderFamily& J) {
  const auto& d = J.domain();
  if (d.empty()) return {};
  if (d.back() - d.front() + 1 != d.size()) throw DomainError("family domain is not an interval");
  return {d.front(), d.back() + 1};
}

void validate_stages(const std::vector<CoverStage>& stages) {
  for (std::size_t n = 0; n < stages.size(); ++n) {
    const auto& st = stages[n];
    if (st.interval.empty()) throw ValidationError("stage " + std::to_string(n) + " has an empty interval");
    if (st.family.domain() != st.interval.coords())
      throw ValidationError("stage " + std::to_string(n) + " family does not live on " + to_string(st.interval));
    if (n > 0 && stages[n - 1].interval.end > st.interval.begin)
      throw ValidationError("stage intervals must be disjoint and increasing (stage " + std::to_string(n) + ")");
  }
}

// q(n) = ∏_{i<n} p_i^{-1} for n = 0..upto.
std::vector<Rational> normalizers(const BiasSequence& p, std::size_t upto) {
  std::vector<Rational> q(upto + 1);
  q[0] = kOne;
  for (std::size_t n = 0; n < upto; ++n) q[n + 1] = q[n] / p.bias(n);
  return q;
}

// s ∈ 2^iv belongs iff some t ∈ F_i (i ∈ levels) agrees with s on [0,i) ∩ iv.
CylinderFamily band_family(const Interval& iv, const Interval& levels, const PrefixCover& prefix, std::size_t cap,
                           bool& vacuous) {
  check_enumeration_cap(iv.size(), cap);
  const std::size_t width = iv.size();
  std::vector<char> member(std::size_t{1} << width, 0);
  for (std::size_t i = levels.begin; i < levels.end; ++i) {
    auto it = prefix.levels.find(i);
    if (it == prefix.levels.end()) continue;
    const std::size_t overlap = i > iv.begin ? std::min(i, iv.end) - iv.begin : 0;
    for (const auto& t : it->second) {
      if (overlap == 0) vacuous = true;
      std::uint64_t pattern = 0;
      for (std::size_t b = 0; b < overlap; ++b)
        if (t.bit(iv.begin + b)) pattern |= std::uint64_t{1} << b;
      for (std::uint64_t high = 0; high < (std::uint64_t{1} << (width - overlap)); ++high)
        member[pattern | (high << overlap)] = 1;
    }
  }
  CylinderFamily J(iv);
  for (std::uint64_t m = 0; m < member.size(); ++m)
    if (member[m]) J.insert_mask(m);
  return J;
}

Rational band_weight(const PrefixCover& prefix, const Interval& levels) {
  Rational total;
  for (std::size_t i = levels.begin; i < levels.end; ++i) total += prefix.weight(i);
  return total;
}

HeavySet heavy_split(const CylinderFamily& J, Coord split, const Rational& threshold, const BiasSequence& p,
                     std::size_t cap, bool prefix_side) {
  const Interval whole = interval_of(J);
  check_enumeration_cap(whole.size(), cap);
  if (!(whole.begin < split && split < whole.end))
    throw DomainError("split " + std::to_string(split) + " must lie strictly inside " + to_string(whole));
  const Interval head{whole.begin, split};
  const Interval rest{split, whole.end};

  std::map<FiniteTrace, Rational> conditional;
  for (const auto& t : J.traces()) {
    const auto kept = t.restrict_to(prefix_side ? head : rest);
    const auto free = t.restrict_to(prefix_side ? rest : head);
    conditional[kept] += trace_measure(p, free);
  }

  HeavySet out;
  out.interval = prefix_side ? head : rest;
  out.threshold = threshold;
  for (const auto& [t, mass] : conditional) {
    if (mass > threshold) {
      out.traces.insert(t);
      out.heavy_measure += trace_measure(p, t);
    }
  }
  out.family_measure = family_measure(p, J, cap);
  out.markov_holds = threshold * out.heavy_measure <= out.family_measure;
  return out;
}

}  // namespace

SmallCover SmallCover::build(std::vector<CoverStage> stages, const BiasSequence& p, Rational tail_bound,
                             bool certified, std::size_t cap) {
  validate_stages(stages);
  if (tail_bound.sign() < 0) throw ValidationError("tail bound must be non-negative");
  SmallCover c;
  c.weights_.reserve(stages.size());
  for (const auto& st : stages) c.weights_.push_back(family_measure(p, st.family, cap));
  c.stages_ = std::move(stages);
  c.tail_bound_ = std::move(tail_bound);
  c.certified_ = certified;
  return c;
}

SmallCover SmallCover::load(std::vector<CoverStage> stages, const std::vector<Rational>& declared_weights,
                            Rational tail_bound, bool certified, const BiasSequence& p, std::size_t cap) {
  if (declared_weights.size() != stages.size())
    throw ValidationError("cover lists " + std::to_string(declared_weights.size()) + " weights for " +
                          std::to_string(stages.size()) + " stages");
  auto c = build(std::move(stages), p, std::move(tail_bound), certified, cap);
  for (std::size_t n = 0; n < declared_weights.size(); ++n)
    if (declared_weights[n] != c.weights_[n])
      throw ValidationError("stage " + std::to_string(n) + " declares weight " + declared_weights[n].str() +
                            " but its family measures " + c.weights_[n].str());
  return c;
}

std::vector<std::size_t> stage_hits(const FiniteTrace& x, const SmallCover& cover) {
  for (const auto& st : cover.stages())
    if (!x.covers(st.interval))
      throw DomainError("window too short: interval " + to_string(st.interval) + " is not covered");
  std::vector<std::size_t> hits;
  for (std::size_t n = 0; n < cover.size(); ++n) {
    const auto& st = cover.stages()[n];
    if (st.family.contains(x.restrict_to(st.interval))) hits.push_back(n);
  }
  return hits;
}

Rational borel_cantelli_bound(const SmallCover& cover, std::size_t from_stage) {
  Rational total = cover.tail_bound();
  for (std::size_t n = from_stage; n < cover.size(); ++n) total += cover.weights()[n];
  return total;
}

PrefixCover PrefixCover::build(std::map<std::size_t, std::set<FiniteTrace>> levels, const BiasSequence& p,
                               Rational tail_bound, std::size_t cap) {
  if (tail_bound.sign() < 0) throw ValidationError("tail bound must be non-negative");
  PrefixCover out;
  for (auto& [j, traces] : levels) {
    const Interval dom{0, j};
    CylinderFamily F(dom);
    for (const auto& t : traces) {
      if (t.domain() != dom.coords())
        throw ValidationError("level " + std::to_string(j) + " trace " + to_string(t) + " must have domain [0," +
                              std::to_string(j) + ")");
      F.insert(t);
    }
    out.weights[j] = family_measure(p, F, cap);
  }
  out.levels = std::move(levels);
  out.tail_bound = std::move(tail_bound);
  return out;
}

Rational PrefixCover::weight(std::size_t level) const {
  auto it = weights.find(level);
  return it == weights.end() ? Rational{} : it->second;
}

PrefixCover prefix_from_open_cover(const std::vector<std::vector<FiniteTrace>>& opens, const BiasSequence& p,
                                   std::size_t cap) {
  std::map<std::size_t, std::set<FiniteTrace>> levels;
  for (std::size_t n = 0; n < opens.size(); ++n) {
    for (const auto& s : opens[n]) {
      const auto& d = s.domain();
      if (!d.empty() && (d.front() != 0 || d.back() + 1 != d.size()))
        throw ValidationError("generator " + to_string(s) + " of G_" + std::to_string(n) +
                              " does not have an initial-segment domain");
      levels[s.size()].insert(s);
    }
  }
  return PrefixCover::build(std::move(levels), p, {}, cap);
}

EpsilonSchedule::EpsilonSchedule(std::vector<Rational> terms, Rational tail_bound, std::optional<Rational> ratio)
    : terms_(std::move(terms)), tail_bound_(std::move(tail_bound)), ratio_(std::move(ratio)) {
  for (std::size_t k = 0; k < terms_.size(); ++k)
    if (terms_[k].sign() <= 0) throw ValidationError("epsilon term " + std::to_string(k) + " must be positive");
  if (tail_bound_.sign() < 0) throw ValidationError("epsilon tail bound must be non-negative");
  if (ratio_ && (ratio_->sign() <= 0 || *ratio_ >= kOne)) throw ValidationError("epsilon ratio must lie in (0, 1)");
  if (ratio_ && terms_.empty()) throw ValidationError("a geometric epsilon schedule needs a first term");
}

EpsilonSchedule EpsilonSchedule::geometric(const Rational& first, const Rational& ratio, std::size_t count) {
  if (ratio.sign() <= 0 || ratio >= kOne) throw ValidationError("epsilon ratio must lie in (0, 1)");
  std::vector<Rational> terms;
  terms.reserve(count);
  Rational t = first;
  for (std::size_t k = 0; k < count; ++k) {
    terms.push_back(t);
    t *= ratio;
  }
  // Σ_{k≥count} first·r^k = first·r^count/(1−r).
  return EpsilonSchedule(std::move(terms), t / (kOne - ratio), ratio);
}

std::optional<Rational> EpsilonSchedule::term(std::size_t k) const {
  if (k < terms_.size()) return terms_[k];
  if (!ratio_) return std::nullopt;
  return terms_.back() * pow(*ratio_, k - terms_.size() + 1);
}

Rational EpsilonSchedule::sum_from(std::size_t from) const {
  if (from <= terms_.size()) {
    Rational total = tail_bound_;
    for (std::size_t k = from; k < terms_.size(); ++k) total += terms_[k];
    return total;
  }
  if (ratio_) return *term(from) / (kOne - *ratio_);
  return tail_bound_;
}

bool EpsilonSchedule::supports_refinement() const { return ratio_ && Rational(2) * *ratio_ < kOne; }

Decomposition decompose_null_cover(const PrefixCover& prefix, const EpsilonSchedule& eps, const BiasSequence& p,
                                   std::size_t window, std::size_t cap) {
  for (const auto& [j, traces] : prefix.levels)
    if (!traces.empty() && j >= window)
      throw DomainError("prefix level " + std::to_string(j) + " lies outside window [0," + std::to_string(window) +
                        ")");

  // tail[u] = Σ_{j≥u} w_j + declared tail.
  std::vector<Rational> tail(window + 2);
  tail[window + 1] = prefix.tail_bound;
  for (std::size_t u = window + 1; u-- > 0;) tail[u] = tail[u + 1] + prefix.weight(u);
  const auto q = normalizers(p, window);

  Decomposition d;
  d.cuts.push_back(0);
  while (d.cuts.back() < window) {
    const std::size_t k = (d.cuts.size() - 1) / 2;
    const auto epsilon = eps.term(k);
    if (!epsilon) {
      d.certified = false;
      d.exhausted_at = k;
      d.diagnostics.push_back("epsilon schedule exhausted at stage " + std::to_string(k));
      break;
    }
    const std::size_t prev = d.cuts.back();
    std::optional<std::size_t> next;
    for (std::size_t u = prev + 1; u <= window; ++u) {
      if (q[prev] * tail[u] < *epsilon) {
        next = u;
        break;
      }
    }
    if (!next) {
      d.certified = false;
      d.exhausted_at = k;
      d.diagnostics.push_back("window exhausted at stage " + std::to_string(k));
      break;
    }
    d.cuts.push_back(*next);
  }
  // Mass declared beyond the window is never reached by a stage.
  if (d.certified && !prefix.tail_bound.is_zero()) {
    const std::size_t k = (d.cuts.size() - 1) / 2;
    d.certified = false;
    d.exhausted_at = k;
    d.diagnostics.push_back("window exhausted at stage " + std::to_string(k) + ": tail mass " +
                            prefix.tail_bound.str() + " lies beyond the window");
  }

  d.m_cuts.push_back(0);
  for (std::size_t i = 0; i < d.cuts.size(); ++i) (i % 2 == 0 ? d.n_cuts : d.m_cuts).push_back(d.cuts[i]);

  const auto& c = d.cuts;
  auto build_stage = [&](const Interval& iv, const Interval& levels, const std::string& label) {
    bool vacuous = false;
    CoverStage st{iv, band_family(iv, levels, prefix, cap, vacuous)};
    if (vacuous)
      d.diagnostics.push_back(label + ": a level-" + std::to_string(levels.begin) +
                              " trace shares no coordinates with the stage; matched vacuously");
    return st;
  };

  if (c.size() >= 2) {
    d.preamble = build_stage({0, c[1]}, {0, c[1]}, "preamble");
    d.preamble_weight = family_measure(p, d.preamble->family, cap);
  }

  std::vector<CoverStage> stages_a;
  std::vector<CoverStage> stages_b;
  for (std::size_t k = 0; 2 * k + 2 < c.size(); ++k) {
    const Interval iv{c[2 * k], c[2 * k + 2]};
    const Interval levels{c[2 * k + 1], c[2 * k + 2]};
    auto st = build_stage(iv, levels, "cover A stage " + std::to_string(k));
    StageLedger led;
    led.stage = k;
    led.interval = iv;
    led.levels = levels;
    led.epsilon_index = k;
    led.epsilon = *eps.term(k);
    led.weight = family_measure(p, st.family, cap);
    led.proof_bound = q[iv.begin] * band_weight(prefix, levels);
    led.within_epsilon = led.weight <= led.proof_bound && led.weight <= led.epsilon;
    d.ledger_a.push_back(led);
    stages_a.push_back(std::move(st));
  }
  for (std::size_t k = 0; 2 * k + 3 < c.size(); ++k) {
    const Interval iv{c[2 * k + 1], c[2 * k + 3]};
    const Interval levels{c[2 * k + 2], c[2 * k + 3]};
    auto st = build_stage(iv, levels, "cover B stage " + std::to_string(k));
    StageLedger led;
    led.stage = k;
    led.interval = iv;
    led.levels = levels;
    led.epsilon_index = k;
    led.epsilon = *eps.term(k);
    led.weight = family_measure(p, st.family, cap);
    led.proof_bound = q[iv.begin] * band_weight(prefix, levels);
    led.within_epsilon = led.weight <= led.proof_bound && led.weight <= led.epsilon;
    d.ledger_b.push_back(led);
    stages_b.push_back(std::move(st));
  }
  for (const auto* ledger : {&d.ledger_a, &d.ledger_b}) {
    for (const auto& led : *ledger) {
      if (!led.within_epsilon) {
        d.certified = false;
        d.diagnostics.push_back("stage " + std::to_string(led.stage) + " on " + to_string(led.interval) +
                                " exceeds its epsilon bound");
      }
    }
  }

  const std::size_t count_a = stages_a.size();
  const std::size_t count_b = stages_b.size();
  d.cover_a = SmallCover::build(std::move(stages_a), p, eps.sum_from(count_a), d.certified, cap);
  d.cover_b = SmallCover::build(std::move(stages_b), p, eps.sum_from(count_b), d.certified, cap);
  return d;
}

HeavySet heavy_prefixes(const CylinderFamily& J, Coord split, const Rational& threshold, const BiasSequence& p,
                        std::size_t cap) {
  return heavy_split(J, split, threshold, p, cap, true);
}

HeavySet heavy_suffixes(const CylinderFamily& J, Coord split, const Rational& threshold, const BiasSequence& p,
                        std::size_t cap) {
  return heavy_split(J, split, threshold, p, cap, false);
}

std::vector<HeavyStage> build_heavy_stages(const Decomposition& d, const BiasSequence& p, std::size_t cap) {
  const auto& c = d.cuts;
  std::vector<HeavyStage> out;
  for (std::size_t k = 0; 2 * k + 1 < c.size(); ++k) {
    HeavyStage hs;
    hs.interval = {c[2 * k], c[2 * k + 1]};
    const Rational threshold = inverse_power_of_two(k + 1);
    if (k < d.cover_a.size()) {
      hs.prefix_part = heavy_prefixes(d.cover_a.stages()[k].family, c[2 * k + 1], threshold, p, cap);
      hs.traces.insert(hs.prefix_part->traces.begin(), hs.prefix_part->traces.end());
    }
    if (k >= 1 && k - 1 < d.cover_b.size()) {
      hs.suffix_part = heavy_suffixes(d.cover_b.stages()[k - 1].family, c[2 * k], threshold, p, cap);
      hs.traces.insert(hs.suffix_part->traces.begin(), hs.suffix_part->traces.end());
    }
    out.push_back(std::move(hs));
  }
  return out;
}

Refinement refine_with_witness(const SmallCover& cover_a, const SmallCover& cover_b,
                               const std::vector<HeavyStage>& heavy, const FiniteTrace& x, std::size_t maturity,
                               const BiasSequence& p, std::size_t cap) {
  const auto hits = stage_hits(x, cover_a);
  Refinement out;
  std::vector<CoverStage> stages;
  for (std::size_t u = 0; u < hits.size(); ++u) {
    const std::size_t k = hits[u];
    const std::string where = "stage u=" + std::to_string(u) + " (cover stage " + std::to_string(k) + ")";
    if (k >= heavy.size()) throw DomainError(where + ": no heavy-set entry");
    const auto& A = cover_a.stages()[k];
    const Coord split = heavy[k].interval.end;
    if (heavy[k].interval.begin != A.interval.begin || !(A.interval.begin < split && split < A.interval.end))
      throw DomainError(where + ": heavy interval is not aligned with the cover stage");
    const CoverStage* B = k < cover_b.size() ? &cover_b.stages()[k] : nullptr;
    if (B && (B->interval.begin != split || B->interval.end <= A.interval.end))
      throw DomainError(where + ": second cover is not aligned with the first");

    const Interval head{A.interval.begin, split};
    const Interval U{split, A.interval.end};
    const Interval after = B ? Interval{A.interval.end, B->interval.end} : Interval{};
    if (B && !x.covers(after)) throw DomainError(where + ": window too short for " + to_string(after));

    const bool mature = u >= maturity;
    if (mature) {
      if (heavy[k].traces.contains(x.restrict_to(head)))
        throw DomainError(where + ": witness prefix on " + to_string(head) + " is heavy");
      if (B && k + 1 < heavy.size() && heavy[k + 1].interval == after &&
          heavy[k + 1].traces.contains(x.restrict_to(after)))
        throw DomainError(where + ": witness segment on " + to_string(after) + " is heavy");
    }

    CylinderFamily T(U);
    const auto x_head = x.restrict_to(head);
    for (const auto& t : A.family.traces())
      if (t.restrict_to(head) == x_head) T.insert(t.restrict_to(U));
    if (B) {
      const auto x_after = x.restrict_to(after);
      for (const auto& t : B->family.traces())
        if (t.restrict_to(after) == x_after) T.insert(t.restrict_to(U));
    }

    RefinedStage rs;
    rs.u = u;
    rs.cover_stage = k;
    rs.interval = U;
    rs.weight = family_measure(p, T, cap);
    rs.bound = inverse_power_of_two(u);
    rs.mature = mature;
    rs.within_bound = rs.weight < rs.bound;
    if (mature && !rs.within_bound) out.certified = false;
    out.stages.push_back(rs);
    stages.push_back({U, std::move(T)});
  }
  out.cover = SmallCover::build(std::move(stages), p, {}, out.certified, cap);
  return out;
}

FiniteTrace blend(const FiniteTrace& x, const FiniteTrace& y, const std::vector<Interval>& u_stages) {
  if (x.domain() != y.domain()) throw DomainError("blend needs X and Y on the same window");
  std::vector<bool> bits(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const Coord c = x.domain()[i];
    const bool in_u = std::any_of(u_stages.begin(), u_stages.end(), [c](const Interval& iv) { return iv.contains(c); });
    bits[i] = in_u ? x.bit(i) : y.bit(i);
  }
  return FiniteTrace(x.domain(), std::move(bits));
}

FsigmaCover fsigma_to_small(const ClosedStages& closed, const std::vector<Coord>& cuts, const BiasSequence& p,
                            std::size_t cap) {
  for (std::size_t i = 1; i < cuts.size(); ++i)
    if (cuts[i] <= cuts[i - 1]) throw ValidationError("cuts must be strictly increasing");
  const std::size_t count = cuts.size() < 2 ? 0 : cuts.size() - 1;
  if (closed.size() < count)
    throw ValidationError("closed stages list " + std::to_string(closed.size()) + " sets for " +
                          std::to_string(count) + " cover stages");

  for (std::size_t n = 0; n < closed.size(); ++n) {
    for (const auto& [m, traces] : closed[n]) {
      for (const auto& t : traces)
        if (t.domain() != Interval{0, m}.coords())
          throw ValidationError("C^" + std::to_string(n) + "_" + std::to_string(m) + " trace " + to_string(t) +
                                " must have domain [0," + std::to_string(m) + ")");
      if (n + 1 < closed.size()) {
        auto next = closed[n + 1].find(m);
        if (next != closed[n + 1].end() &&
            !std::includes(next->second.begin(), next->second.end(), traces.begin(), traces.end()))
          throw ValidationError("closed sets are not increasing: C^" + std::to_string(n) + "_" + std::to_string(m) +
                                " is not contained in C^" + std::to_string(n + 1) + "_" + std::to_string(m));
      }
    }
  }

  const auto q = normalizers(p, count == 0 ? 0 : cuts[count - 1]);
  FsigmaCover out;
  std::vector<CoverStage> stages;
  for (std::size_t n = 0; n < count; ++n) {
    const Interval U{cuts[n], cuts[n + 1]};
    auto it = closed[n].find(cuts[n + 1]);
    if (it == closed[n].end())
      throw ValidationError("C^" + std::to_string(n) + "_" + std::to_string(cuts[n + 1]) + " is not listed");
    CylinderFamily C(Interval{0, cuts[n + 1]});
    CylinderFamily T(U);
    for (const auto& t : it->second) {
      C.insert(t);
      T.insert(t.restrict_to(U));
    }
    FsigmaStage fs;
    fs.n = n;
    fs.interval = U;
    fs.closed_weight = family_measure(p, C, cap);
    fs.weighted = q[cuts[n]] * fs.closed_weight;
    fs.weight = family_measure(p, T, cap);
    fs.within_budget = fs.weighted <= inverse_power_of_two(n) && fs.weight <= fs.weighted;
    if (!fs.within_budget) out.certified = false;
    out.weighted_sum += fs.weighted;
    out.stages.push_back(fs);
    stages.push_back({U, std::move(T)});
  }
  out.cover = SmallCover::build(std::move(stages), p, {}, out.certified, cap);
  return out;
}

}  // namespace filterlab
