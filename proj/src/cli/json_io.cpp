#include "json_io.hpp"

#include <algorithm>

namespace filterlab::cli {

namespace {

std::string escape_token(std::string_view key) {
  std::string out;
  for (char c : key) {
    if (c == '~')
      out += "~0";
    else if (c == '/')
      out += "~1";
    else
      out += c;
  }
  return out;
}

std::string type_name(const Json& j) { return j.type_name(); }

}  // namespace

void Node::fail(const std::string& message) const { throw SpecError(pointer_, message); }

void Node::allow(std::initializer_list<std::string_view> keys) const {
  if (!value_->is_object()) fail("expected an object, got " + type_name(*value_));
  for (const auto& [key, value] : value_->items())
    if (std::find(keys.begin(), keys.end(), key) == keys.end())
      throw SpecError(pointer_ + "/" + escape_token(key), "unknown field \"" + key + "\"");
}

bool Node::has(std::string_view key) const { return value_->is_object() && value_->contains(key); }

Node Node::at(std::string_view key) const {
  if (!value_->is_object()) fail("expected an object, got " + type_name(*value_));
  auto it = value_->find(key);
  if (it == value_->end()) fail("missing field \"" + std::string(key) + "\"");
  return Node(*it, pointer_ + "/" + escape_token(key));
}

std::optional<Node> Node::find(std::string_view key) const {
  if (!has(key)) return std::nullopt;
  return at(key);
}

std::vector<Node> Node::items() const {
  if (!value_->is_array()) fail("expected an array, got " + type_name(*value_));
  std::vector<Node> out;
  for (std::size_t i = 0; i < value_->size(); ++i) out.emplace_back((*value_)[i], pointer_ + "/" + std::to_string(i));
  return out;
}

std::string Node::text() const {
  if (!value_->is_string()) fail("expected a string, got " + type_name(*value_));
  return value_->get<std::string>();
}

Rational Node::rational() const {
  if (value_->is_number_integer()) return Rational(value_->get<long>());
  if (!value_->is_string()) fail("expected a rational \"num/den\", got " + type_name(*value_));
  try {
    return Rational::parse(value_->get<std::string>());
  } catch (const Error& e) {
    fail(e.what());
  }
}

std::uint64_t Node::u64() const {
  if (value_->is_number_unsigned()) return value_->get<std::uint64_t>();
  if (value_->is_number_integer()) fail("expected a non-negative integer");
  fail("expected an integer, got " + type_name(*value_));
}

bool Node::boolean() const {
  if (!value_->is_boolean()) fail("expected a boolean, got " + type_name(*value_));
  return value_->get<bool>();
}

std::vector<std::size_t> Node::indices() const {
  std::vector<std::size_t> out;
  for (const auto& item : items()) out.push_back(item.index());
  return out;
}

CoordSet Node::coords() const {
  auto raw = indices();
  auto set = make_coord_set(raw);
  if (set.size() != raw.size()) fail("duplicate coordinates");
  return set;
}

BiasSequence read_bias(const Node& n) {
  if (n.json().is_string()) {
    if (n.text() == "uniform") return BiasSequence::uniform();
    n.fail("unknown bias shorthand \"" + n.text() + "\"");
  }
  n.allow({"prefix", "tail"});
  std::vector<Rational> prefix;
  if (auto p = n.find("prefix"))
    for (const auto& item : p->items()) prefix.push_back(item.rational());
  TailClass tail = UnspecifiedTail{};
  if (auto t = n.find("tail")) {
    const auto kind = t->at("kind").text();
    if (kind == "constant") {
      t->allow({"kind", "value"});
      tail = ConstantTail{t->at("value").rational()};
    } else if (kind == "power_law") {
      t->allow({"kind", "scale", "exponent"});
      tail = PowerLawTail{t->at("scale").rational(), t->at("exponent").rational()};
    } else if (kind == "geometric") {
      t->allow({"kind", "scale", "ratio"});
      tail = GeometricTail{t->at("scale").rational(), t->at("ratio").rational()};
    } else if (kind == "unspecified") {
      t->allow({"kind"});
    } else {
      t->at("kind").fail("unknown tail kind \"" + kind + "\"");
    }
  }
  try {
    return BiasSequence::make(std::move(prefix), std::move(tail));
  } catch (const ValidationError& e) {
    n.fail(e.what());
  }
}

FiniteTrace read_bits(const Node& n, Coord begin) {
  const auto bits = n.text();
  try {
    return FiniteTrace::on_interval({begin, begin + bits.size()}, bits);
  } catch (const Error& e) {
    n.fail(e.what());
  }
}

FiniteTrace read_trace(const Node& n) {
  if (n.has("window")) {
    n.allow({"window", "ones"});
    const auto window = n.at("window").index();
    const auto ones = n.find("ones") ? n.at("ones").coords() : CoordSet{};
    if (!ones.empty() && ones.back() >= window) n.at("ones").fail("coordinate outside the window");
    return FiniteTrace::indicator(window, ones);
  }
  n.allow({"domain", "bits"});
  const auto domain = n.at("domain").coords();
  try {
    return FiniteTrace::from_string(domain, n.at("bits").text());
  } catch (const Error& e) {
    n.fail(e.what());
  }
}

CylinderFamily read_family(const Node& n) {
  n.allow({"domain", "traces"});
  const auto domain = n.at("domain").coords();
  CylinderFamily J(domain);
  for (const auto& item : n.at("traces").items()) {
    try {
      J.insert(FiniteTrace::from_string(domain, item.text()));
    } catch (const Error& e) {
      item.fail(e.what());
    }
  }
  return J;
}

EpsilonSchedule read_epsilon(const Node& n) {
  try {
    if (n.has("first")) {
      n.allow({"first", "ratio", "count"});
      return EpsilonSchedule::geometric(n.at("first").rational(), n.at("ratio").rational(), n.at("count").index());
    }
    n.allow({"terms", "tail_bound", "ratio"});
    std::vector<Rational> terms;
    for (const auto& item : n.at("terms").items()) terms.push_back(item.rational());
    std::optional<Rational> ratio;
    if (auto r = n.find("ratio")) ratio = r->rational();
    const Rational tail = n.find("tail_bound") ? n.at("tail_bound").rational() : Rational{};
    return EpsilonSchedule(std::move(terms), tail, ratio);
  } catch (const SpecError&) {
    throw;
  } catch (const ValidationError& e) {
    n.fail(e.what());
  }
}

AntichainFamily read_antichain_family(const Node& n, std::size_t cap) {
  n.allow({"stages", "weights", "bias", "tail_bound"});
  std::vector<AntichainStage> stages;
  for (const auto& item : n.at("stages").items()) {
    item.allow({"support", "sets"});
    AntichainStage st;
    st.support = item.at("support").coords();
    for (const auto& a : item.at("sets").items()) st.sets.push_back(a.coords());
    stages.push_back(std::move(st));
  }
  const auto p = n.find("bias") ? read_bias(n.at("bias")) : BiasSequence::uniform();
  const Rational tail = n.find("tail_bound") ? n.at("tail_bound").rational() : Rational{};
  try {
    if (auto w = n.find("weights")) {
      std::vector<Rational> weights;
      for (const auto& item : w->items()) weights.push_back(item.rational());
      return AntichainFamily::load(std::move(stages), weights, p, tail, cap);
    }
    return AntichainFamily::build(std::move(stages), p, tail, cap);
  } catch (const ValidationError& e) {
    n.fail(e.what());
  }
}

HalvingGrid read_grid(const Node& n) {
  try {
    if (n.has("cells")) {
      n.allow({"cells"});
      std::map<CellKey, CoordSet> cells;
      for (const auto& item : n.at("cells").items()) {
        item.allow({"k", "l", "coords"});
        const CellKey key{item.at("k").index(), item.at("l").index()};
        if (!cells.emplace(key, item.at("coords").coords()).second) item.fail("duplicate cell");
      }
      return HalvingGrid::make(std::move(cells));
    }
    n.allow({"k_max", "l_max", "origin"});
    const Coord origin = n.find("origin") ? n.at("origin").index() : 0;
    return HalvingGrid::contiguous(n.at("k_max").index(), n.at("l_max").index(), origin);
  } catch (const SpecError&) {
    throw;
  } catch (const ValidationError& e) {
    n.fail(e.what());
  }
}

FilterBase read_filter(const Node& n, std::size_t cap) {
  n.allow({"window", "margin", "generators", "canonical"});
  const auto window = n.at("window").index();
  const std::size_t margin = n.find("margin") ? n.at("margin").index() : 1;
  if (n.has("generators") == n.has("canonical")) n.fail("give exactly one of \"generators\" and \"canonical\"");
  try {
    if (auto g = n.find("generators")) {
      std::vector<CoordSet> sets;
      for (const auto& item : g->items()) sets.push_back(item.coords());
      return FilterBase::make(window, sets, margin);
    }
    const auto c = n.at("canonical");
    const auto kind = c.at("kind").text();
    FilterBase base;
    if (kind == "frechet") {
      c.allow({"kind", "k_max"});
      base = canonical_filter(FrechetKind{c.at("k_max").index()}, window, cap);
    } else if (kind == "grid_hitting") {
      c.allow({"kind", "grid", "level"});
      base = canonical_filter(GridHittingKind{read_grid(c.at("grid")), c.at("level").index()}, window, cap);
    } else {
      c.at("kind").fail("unknown canonical filter \"" + kind + "\"");
    }
    base.margin = margin;
    return base;
  } catch (const SpecError&) {
    throw;
  } catch (const ValidationError& e) {
    n.fail(e.what());
  }
}

ConstraintList read_constraints(const Node& n) {
  std::vector<CoordSet> sets;
  for (const auto& item : n.items()) sets.push_back(item.coords());
  return ConstraintList(std::move(sets));
}

SelectionStrategy read_strategy(const Node& n, const std::optional<std::uint64_t>& seed_override) {
  if (n.json().is_string()) {
    if (n.text() == "exhaustive") return Exhaustive{};
    n.fail("unknown strategy \"" + n.text() + "\"");
  }
  n.allow({"monte_carlo"});
  const auto mc = n.at("monte_carlo");
  mc.allow({"seed", "trials", "threads"});
  MonteCarlo out;
  out.seed = seed_override ? *seed_override : mc.at("seed").u64();
  out.trials = mc.at("trials").u64();
  if (out.trials == 0) mc.at("trials").fail("trials must be positive");
  if (auto t = mc.find("threads")) out.threads = static_cast<unsigned>(t->index());
  return out;
}

Json write(const Rational& r) { return r.str(); }

Json write(const Interval& iv) { return Json::array({iv.begin, iv.end}); }

Json write(const FiniteTrace& t) { return {{"domain", t.domain()}, {"bits", t.bit_string()}}; }

Json write_bias(const BiasSequence& p) {
  Json prefix = Json::array();
  for (const auto& v : p.prefix()) prefix.push_back(v.str());
  Json tail = {{"kind", tail_name(p.tail())}};
  if (const auto* c = std::get_if<ConstantTail>(&p.tail())) {
    tail["value"] = c->value.str();
  } else if (const auto* pl = std::get_if<PowerLawTail>(&p.tail())) {
    tail["scale"] = pl->scale.str();
    tail["exponent"] = pl->exponent.str();
  } else if (const auto* g = std::get_if<GeometricTail>(&p.tail())) {
    tail["scale"] = g->scale.str();
    tail["ratio"] = g->ratio.str();
  }
  return {{"prefix", prefix}, {"tail", tail}};
}

Json write_family(const CylinderFamily& J) {
  Json traces = Json::array();
  for (const auto& t : J.traces()) traces.push_back(t.bit_string());
  return {{"domain", J.domain()}, {"traces", traces}};
}

}  // namespace filterlab::cli
