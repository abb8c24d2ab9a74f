#include "json_io.hpp"

#include "filterlab/measure.hpp"

#include <functional>
#include <map>

namespace filterlab::cli {

namespace {

struct Context {
  const Node& payload;
  const Options& options;
  std::size_t cap;
  Report& report;
};

Json traces_json(const CylinderFamily& J) {
  Json out = Json::array();
  for (const auto& t : J.traces()) out.push_back(t.bit_string());
  return out;
}

ConjugateMap read_map(const Node& payload) {
  const auto name = payload.at("map").text();
  if (name == "max") {
    if (payload.has("target")) payload.at("target").fail("max map takes no target");
    return MaxMap{};
  }
  if (name == "union") return UnionMap{read_bias(payload.at("target"))};
  payload.at("map").fail("unknown map \"" + name + "\"");
}

void run_measure(Context& c) {
  const auto& n = c.payload;
  n.allow({"bias", "trace", "family", "hit"});
  const auto p = read_bias(n.at("bias"));
  if (!n.has("trace") && !n.has("family") && !n.has("hit")) n.fail("give at least one of trace, family, hit");
  auto& res = c.report.results;
  if (auto t = n.find("trace")) res["trace_measure"] = write(trace_measure(p, read_trace(*t)));
  if (auto f = n.find("family")) res["measure"] = write(family_measure(p, read_family(*f), c.cap));
  if (auto h = n.find("hit")) {
    h->allow({"domain", "sets"});
    std::vector<CoordSet> sets;
    for (const auto& item : h->at("sets").items()) sets.push_back(item.coords());
    res["hit_measure"] = write(hit_measure(p, sets, h->at("domain").coords(), c.cap));
  }
  c.report.certified = true;
}

void run_conjugate(Context& c) {
  const auto& n = c.payload;
  n.allow({"bias", "map", "target"});
  const auto p = read_bias(n.at("bias"));
  const auto map = read_map(n);
  c.report.results["map"] = n.at("map").text();
  c.report.results["conjugate"] = write_bias(conjugate_bias(p, map));
  c.report.certified = true;
}

void run_pushforward(Context& c) {
  const auto& n = c.payload;
  n.allow({"bias", "map", "target", "traces", "domain"});
  const auto p = read_bias(n.at("bias"));
  const auto map = read_map(n);
  const auto aux = conjugate_bias(p, map);
  std::vector<FiniteTrace> traces;
  if (auto t = n.find("traces"))
    for (const auto& item : t->items()) traces.push_back(read_trace(item));
  if (auto d = n.find("domain")) {
    const auto domain = d->coords();
    check_enumeration_cap(2 * domain.size(), c.cap);
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << domain.size()); ++m)
      traces.push_back(FiniteTrace::from_mask(domain, m));
  }
  if (traces.empty()) n.fail("give \"traces\" or \"domain\"");
  Json checks = Json::array();
  bool all = true;
  for (const auto& t : traces) {
    const bool holds = pushforward_check(p, aux, map, t, c.cap);
    all = all && holds;
    checks.push_back({{"trace", write(t)}, {"holds", holds}});
  }
  auto& res = c.report.results;
  res["map"] = n.at("map").text();
  res["conjugate"] = write_bias(aux);
  res["checks"] = checks;
  res["all_hold"] = all;
  c.report.certified = all;
  if (!all) c.report.diagnostics.push_back("pushforward identity fails on some cylinder");
}

Json ledger_json(const StageLedger& led, const CoverStage& st) {
  return {{"stage", led.stage},
          {"interval", write(led.interval)},
          {"levels", write(led.levels)},
          {"epsilon_index", led.epsilon_index},
          {"epsilon", write(led.epsilon)},
          {"weight", write(led.weight)},
          {"proof_bound", write(led.proof_bound)},
          {"within_epsilon", led.within_epsilon},
          {"traces", traces_json(st.family)}};
}

Json heavy_json(const std::optional<HeavySet>& h) {
  if (!h) return nullptr;
  Json traces = Json::array();
  for (const auto& t : h->traces) traces.push_back(t.bit_string());
  return {{"interval", write(h->interval)},
          {"threshold", write(h->threshold)},
          {"traces", traces},
          {"heavy_measure", write(h->heavy_measure)},
          {"family_measure", write(h->family_measure)},
          {"markov_holds", h->markov_holds}};
}

std::map<std::size_t, std::set<FiniteTrace>> read_levels(const Node& n) {
  std::map<std::size_t, std::set<FiniteTrace>> levels;
  for (const auto& item : n.items()) {
    item.allow({"level", "traces"});
    const auto j = item.at("level").index();
    auto& bucket = levels[j];
    for (const auto& bits : item.at("traces").items()) {
      auto t = read_bits(bits, 0);
      if (t.size() != j) bits.fail("trace length differs from its level " + std::to_string(j));
      bucket.insert(std::move(t));
    }
  }
  return levels;
}

void run_fsigma(Context& c) {
  const auto& n = c.payload;
  n.allow({"mode", "bias", "closed", "cuts"});
  const auto p = read_bias(n.at("bias"));
  ClosedStages closed;
  for (const auto& item : n.at("closed").items()) closed.push_back(read_levels(item));
  const auto cuts = n.at("cuts").indices();
  const auto fs = fsigma_to_small(closed, cuts, p, c.cap);
  Json stages = Json::array();
  for (std::size_t i = 0; i < fs.stages.size(); ++i) {
    const auto& st = fs.stages[i];
    stages.push_back({{"n", st.n},
                      {"interval", write(st.interval)},
                      {"closed_weight", write(st.closed_weight)},
                      {"weighted", write(st.weighted)},
                      {"weight", write(st.weight)},
                      {"within_budget", st.within_budget},
                      {"traces", traces_json(fs.cover.stages()[i].family)}});
  }
  auto& res = c.report.results;
  res["mode"] = "fsigma";
  res["stages"] = stages;
  res["weighted_sum"] = write(fs.weighted_sum);
  c.report.certified = fs.certified;
  for (const auto& st : fs.stages)
    if (!st.within_budget)
      c.report.diagnostics.push_back("stage " + std::to_string(st.n) + " exceeds its budget 2^-" +
                                     std::to_string(st.n));
}

void run_decompose(Context& c) {
  const auto& n = c.payload;
  const std::string mode = n.find("mode") ? n.at("mode").text() : "null_cover";
  if (mode == "fsigma") return run_fsigma(c);
  if (mode != "null_cover") n.at("mode").fail("unknown mode \"" + mode + "\"");
  n.allow({"mode", "bias", "window", "epsilon", "prefix_cover", "opens", "refine"});
  const auto p = read_bias(n.at("bias"));
  const auto window = n.at("window").index();
  const auto eps = read_epsilon(n.at("epsilon"));

  if (n.has("prefix_cover") == n.has("opens")) n.fail("give exactly one of \"prefix_cover\" and \"opens\"");
  PrefixCover prefix;
  if (auto pc = n.find("prefix_cover")) {
    pc->allow({"levels", "tail_bound"});
    const Rational tail = pc->find("tail_bound") ? pc->at("tail_bound").rational() : Rational{};
    prefix = PrefixCover::build(read_levels(pc->at("levels")), p, tail, c.cap);
  } else {
    std::vector<std::vector<FiniteTrace>> opens;
    for (const auto& g : n.at("opens").items()) {
      std::vector<FiniteTrace> gens;
      for (const auto& bits : g.items()) gens.push_back(read_bits(bits, 0));
      opens.push_back(std::move(gens));
    }
    prefix = prefix_from_open_cover(opens, p, c.cap);
  }

  const auto d = decompose_null_cover(prefix, eps, p, window, c.cap);
  auto& res = c.report.results;
  res["mode"] = "null_cover";
  res["cuts"] = d.cuts;
  res["n_cuts"] = d.n_cuts;
  res["m_cuts"] = d.m_cuts;
  Json weights = Json::array();
  for (const auto& [j, w] : prefix.weights) weights.push_back({{"level", j}, {"weight", write(w)}});
  res["prefix_weights"] = weights;
  for (const auto& [name, cover, ledger] :
       {std::tuple{"cover_a", &d.cover_a, &d.ledger_a}, std::tuple{"cover_b", &d.cover_b, &d.ledger_b}}) {
    Json stages = Json::array();
    for (std::size_t k = 0; k < ledger->size(); ++k) stages.push_back(ledger_json((*ledger)[k], cover->stages()[k]));
    res[name] = {{"stages", stages}, {"tail_bound", write(cover->tail_bound())}};
  }
  if (d.preamble)
    res["preamble"] = {{"interval", write(d.preamble->interval)},
                       {"weight", write(d.preamble_weight)},
                       {"traces", traces_json(d.preamble->family)}};
  else
    res["preamble"] = nullptr;
  res["exhausted_at"] = d.exhausted_at ? Json(*d.exhausted_at) : Json(nullptr);
  c.report.certified = d.certified;
  for (const auto& msg : d.diagnostics) c.report.diagnostics.push_back(msg);

  if (auto rf = n.find("refine")) {
    rf->allow({"witness", "maturity", "blend"});
    const auto x = read_trace(rf->at("witness"));
    const auto maturity = rf->at("maturity").index();
    const auto heavy = build_heavy_stages(d, p, c.cap);
    Json heavy_json_list = Json::array();
    for (const auto& h : heavy) {
      Json traces = Json::array();
      for (const auto& t : h.traces) traces.push_back(t.bit_string());
      heavy_json_list.push_back({{"interval", write(h.interval)},
                                 {"traces", traces},
                                 {"prefix_part", heavy_json(h.prefix_part)},
                                 {"suffix_part", heavy_json(h.suffix_part)}});
    }
    res["heavy"] = heavy_json_list;
    const auto ref = refine_with_witness(d.cover_a, d.cover_b, heavy, x, maturity, p, c.cap);
    Json stages = Json::array();
    std::vector<Interval> us;
    for (std::size_t u = 0; u < ref.stages.size(); ++u) {
      const auto& st = ref.stages[u];
      us.push_back(st.interval);
      stages.push_back({{"u", st.u},
                        {"cover_stage", st.cover_stage},
                        {"interval", write(st.interval)},
                        {"weight", write(st.weight)},
                        {"bound", write(st.bound)},
                        {"mature", st.mature},
                        {"within_bound", st.within_bound},
                        {"traces", traces_json(ref.cover.stages()[u].family)}});
    }
    res["refinement"] = {{"stages", stages}, {"certified", ref.certified}};
    if (!ref.certified) {
      c.report.certified = false;
      c.report.diagnostics.push_back("a mature refined stage exceeds 2^-u");
    }
    if (!eps.supports_refinement()) {
      c.report.certified = false;
      c.report.diagnostics.push_back("epsilon schedule needs a geometric tail with ratio < 1/2 for refinement");
    }
    if (auto y = rf->find("blend")) res["blend"] = write(blend(x, read_trace(*y), us));
  }
}

void run_antichain(Context& c) {
  const auto& n = c.payload;
  n.allow({"kernel", "family", "points", "partition", "start"});
  auto& res = c.report.results;
  if (!n.has("kernel") && !n.has("family")) n.fail("give \"kernel\" or \"family\"");
  if (auto k = n.find("kernel")) {
    const auto kernel = upward_kernel(read_family(*k), c.cap);
    res["kernel"] = write_family(kernel);
    res["antichain"] = minimal_antichain(kernel);
  }
  if (auto f = n.find("family")) {
    const auto fam = read_antichain_family(*f, c.cap);
    Json weights = Json::array();
    for (const auto& w : fam.weights()) weights.push_back(write(w));
    res["weights"] = weights;
    std::vector<FiniteTrace> points;
    if (auto pts = n.find("points"))
      for (const auto& item : pts->items()) points.push_back(read_trace(item));
    Json supports = Json::array();
    for (const auto& x : points) supports.push_back(support(x, fam));
    res["supports"] = supports;
    res["star_image"] = star_image(points, fam);
    if (auto part = n.find("partition")) {
      IntervalPartition partition;
      try {
        partition = IntervalPartition::make(part->indices());
      } catch (const ValidationError& e) {
        part->fail(e.what());
      }
      const std::size_t start = n.find("start") ? n.at("start").index() : 0;
      Json cover = Json::array();
      for (const auto& x : points) cover.push_back(fsigma_filter_cover(fam, partition, x, start));
      res["fsigma_cover"] = cover;
    }
  } else if (n.has("points") || n.has("partition") || n.has("start")) {
    n.fail("\"points\", \"partition\" and \"start\" need a \"family\"");
  }
  c.report.certified = true;
}

void run_rapid(Context& c) {
  const auto& n = c.payload;
  n.allow({"family", "first_index", "witness", "window"});
  const auto fam = read_antichain_family(n.at("family"), c.cap);
  const std::size_t first = n.find("first_index") ? n.at("first_index").index() : 0;
  const bool greedy = !n.has("witness");
  const auto z = greedy ? greedy_rapid_witness(fam, n.at("window").index(), first) : read_trace(n.at("witness"));
  const auto r = rapid_escape(fam, z, first);
  auto& res = c.report.results;
  res["witness"] = write(z);
  res["greedy"] = greedy;
  res["normalized"] = r.normalized;
  res["f"] = r.f;
  res["counts"] = r.counts;
  res["violations"] = r.violations;
  res["rapid_bound_holds"] = r.rapid_bound_holds;
  res["escape_guaranteed"] = r.escape_guaranteed;
  res["hits"] = r.hits;
  c.report.certified = r.normalized && (!r.rapid_bound_holds || r.hits.empty());
  if (!r.normalized) c.report.diagnostics.push_back("family is not normalized");
  if (r.escape_guaranteed && !r.hits.empty()) c.report.diagnostics.push_back("rapid witness hits a stage");
}

void run_baire(Context& c) {
  const auto& n = c.payload;
  n.allow({"filter", "partition"});
  const auto base = read_filter(n.at("filter"), c.cap);
  auto& res = c.report.results;
  res["fip"] = fip_check(base);
  res["margin"] = base.margin;
  Json gens = Json::array();
  for (const auto& g : base.generators) gens.push_back(g.ones());
  res["generators"] = gens;

  std::optional<IntervalPartition> part;
  if (auto p = n.find("partition")) {
    try {
      part = IntervalPartition::make(p->indices());
    } catch (const ValidationError& e) {
      p->fail(e.what());
    }
  } else {
    const auto search = baire_search(base);
    if (search.partition) {
      res["search"] = {{"found", true}, {"cuts", search.partition->cuts()}};
      part = search.partition;
    } else {
      res["search"] = {{"found", false}, {"reason", search.reason}};
      c.report.diagnostics.push_back("baire search failed: " + search.reason);
    }
  }
  if (!part) {
    res["check"] = nullptr;
    c.report.certified = false;
    return;
  }
  const auto report = baire_check(base, *part);
  Json probes = Json::array();
  for (const auto& pr : report.probes) probes.push_back({{"label", pr.label}, {"misses", pr.misses}});
  res["check"] = {{"cuts", part->cuts()}, {"probes", probes}, {"witnesses", report.witnesses}};
  c.report.certified = report.witnesses;
  if (!report.witnesses) c.report.diagnostics.push_back("some probe misses more than margin-many blocks");
}

Json selection_json(const HalfSelection& s) {
  Json halves = Json::array();
  if (s.halves)
    for (const auto& [key, half] : *s.halves)
      halves.push_back({{"cell", Json::array({key.first, key.second})}, {"half", half}});
  Json out = {{"found", s.halves.has_value()},
              {"halves", halves},
              {"union_bound", write(s.bounds.union_bound)},
              {"product_bound", write(s.bounds.product_bound)}};
  if (s.monte_carlo) {
    out["strategy"] = "monte_carlo";
    out["seed"] = s.seed;
    out["trials"] = s.trials;
    out["successes"] = s.successes;
    out["frequency"] = write(s.frequency);
    out["first_success"] = s.first_success ? Json(*s.first_success) : Json(nullptr);
  } else {
    out["strategy"] = "exhaustive";
  }
  return out;
}

void run_halves(Context& c) {
  const auto& n = c.payload;
  n.allow({"grid", "constraints", "strategy"});
  const auto grid = read_grid(n.at("grid"));
  const auto cs = n.find("constraints") ? read_constraints(n.at("constraints")) : ConstraintList{};
  const SelectionStrategy strategy =
      n.find("strategy") ? read_strategy(n.at("strategy"), c.options.seed) : SelectionStrategy{Exhaustive{}};
  const auto sel = select_halves(grid, cs, strategy);
  auto& res = c.report.results;
  res["selection"] = selection_json(sel);
  res["budget"] = write(cs.budget());
  if (sel.halves) {
    CoordSet chosen;
    for (const auto& [key, half] : *sel.halves) chosen = set_union(chosen, half);
    const auto x = FiniteTrace::indicator(grid.coords().empty() ? 0 : grid.coords().back() + 1, chosen);
    Json profile = Json::array();
    for (const auto& [k, a] : intersection_profile(x, grid)) profile.push_back(Json::array({k, a}));
    res["profile"] = profile;
  }
  c.report.certified = sel.halves.has_value();
  if (cs.budget() >= Rational(1)) c.report.diagnostics.push_back("constraint budget >= 1: existence not guaranteed");
  if (!sel.halves) c.report.diagnostics.push_back("no valid half selection found");
}

void run_successor(Context& c) {
  const auto& n = c.payload;
  n.allow({"grid", "generators", "schedule", "constraints", "strategy"});
  const auto grid = read_grid(n.at("grid"));
  std::vector<FiniteTrace> gens;
  for (const auto& item : n.at("generators").items()) gens.push_back(read_trace(item));
  const auto schedule = n.at("schedule").indices();
  const auto cs = n.find("constraints") ? read_constraints(n.at("constraints")) : ConstraintList{};
  const SelectionStrategy strategy =
      n.find("strategy") ? read_strategy(n.at("strategy"), c.options.seed) : SelectionStrategy{Exhaustive{}};
  const auto step = successor_step(gens, grid, schedule, cs, strategy);
  auto& res = c.report.results;
  res["x_prime"] = write(step.x_prime);
  res["next"] = step.next ? write(*step.next) : Json(nullptr);
  Json parts = Json::array();
  for (const auto& [key, p] : step.parts) parts.push_back({{"cell", Json::array({key.first, key.second})}, {"points", p}});
  res["parts"] = parts;
  Json emptied = Json::array();
  for (const auto& key : step.emptied_cells) emptied.push_back(Json::array({key.first, key.second}));
  res["emptied_cells"] = emptied;
  res["meets_generator"] = step.meets_generator;
  res["avoids_constraints"] = step.avoids_constraints;
  res["selection"] = selection_json(step.selection);
  c.report.certified = step.certified;
  for (const auto& msg : step.diagnostics) c.report.diagnostics.push_back(msg);
}

void run_certificate(Context& c) {
  const auto& n = c.payload;
  n.allow({"bias", "exponent", "start"});
  const auto p = read_bias(n.at("bias"));
  const auto cert = tail_certificate(p, n.at("exponent").u64(), n.at("start").index());
  auto& res = c.report.results;
  res["verdict"] = to_string(cert.verdict);
  res["tail_bound"] = cert.tail_bound ? write(*cert.tail_bound) : Json(nullptr);
  res["note"] = cert.note;
  c.report.certified = cert.verdict != Verdict::unknown;
  if (!c.report.certified) c.report.diagnostics.push_back("tail class gives no verdict");
}

}  // namespace

Report execute(const ProblemSpec& spec, const Options& options) {
  static const std::map<std::string, std::function<void(Context&)>> handlers{
      {"measure", run_measure},     {"conjugate", run_conjugate}, {"pushforward", run_pushforward},
      {"decompose", run_decompose}, {"antichain", run_antichain}, {"rapid", run_rapid},
      {"baire", run_baire},         {"halves", run_halves},       {"successor", run_successor},
      {"certificate", run_certificate}};

  Report r;
  r.command = spec.command;
  try {
    r.inputs_digest = inputs_digest(spec, options);
    const std::size_t cap = options.cap.value_or(kDefaultEnumerationCap);
    if (cap > kMaxEnumerationCap)
      throw ValidationError("--cap " + std::to_string(cap) + " exceeds the maximum " +
                            std::to_string(kMaxEnumerationCap));
    auto it = handlers.find(spec.command);
    if (it == handlers.end()) throw SpecError("/command", "unknown command \"" + spec.command + "\"");
    const Node payload(spec.payload, "/payload");
    Context ctx{payload, options, cap, r};
    it->second(ctx);
    r.exit_code = r.certified ? kExitOk : kExitNotCertified;
  } catch (const Error& e) {
    r.results = Json::object();
    r.certified = false;
    r.diagnostics.push_back(e.what());
    r.exit_code = kExitValidation;
  } catch (const std::exception& e) {
    r.results = Json::object();
    r.certified = false;
    r.diagnostics.push_back(std::string("internal error: ") + e.what());
    r.exit_code = kExitInternal;
  }
  return r;
}

}  // namespace filterlab::cli
