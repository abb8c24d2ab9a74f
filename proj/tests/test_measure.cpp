#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "filterlab/errors.hpp"
#include "filterlab/measure.hpp"

#include <random>

using namespace filterlab;

namespace {

Rational R(long n, long d = 1) { return Rational(n, d); }

BiasSequence prefix(std::vector<Rational> v) { return BiasSequence::make(std::move(v), UnspecifiedTail{}); }

// Brute force over every 0/1 vector on the domain, written without the
// library's measure code.
Rational oracle_family(const std::vector<Rational>& biases, const CoordSet& domain,
                       const std::vector<std::string>& members) {
  Rational total;
  const std::size_t n = domain.size();
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) {
    std::string bits;
    Rational w(1);
    for (std::size_t i = 0; i < n; ++i) {
      const bool one = (m >> i) & 1U;
      bits.push_back(one ? '1' : '0');
      w = w * (one ? biases[domain[i]] : Rational(1) - biases[domain[i]]);
    }
    if (std::find(members.begin(), members.end(), bits) != members.end()) total = total + w;
  }
  return total;
}

Rational oracle_hit(const std::vector<Rational>& biases, const CoordSet& domain, const std::vector<CoordSet>& sets) {
  Rational total;
  const std::size_t n = domain.size();
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) {
    CoordSet ones;
    Rational w(1);
    for (std::size_t i = 0; i < n; ++i) {
      const bool one = (m >> i) & 1U;
      if (one) ones.push_back(domain[i]);
      w = w * (one ? biases[domain[i]] : Rational(1) - biases[domain[i]]);
    }
    bool hit = false;
    for (const auto& a : sets) hit = hit || std::includes(ones.begin(), ones.end(), a.begin(), a.end());
    if (hit) total = total + w;
  }
  return total;
}

Rational random_bias(std::mt19937_64& rng) {
  std::uniform_int_distribution<long> den(2, 40);
  const long d = den(rng);
  std::uniform_int_distribution<long> num(1, d / 2);
  return Rational(num(rng), d);
}

}  // namespace

TEST_CASE("trace_measure examples") {
  const auto u = BiasSequence::uniform();
  CHECK(trace_measure(u, FiniteTrace::on_interval({0, 3}, "101")) == R(1, 8));
  const auto p = prefix({R(1, 4), R(1, 3)});
  CHECK(trace_measure(p, FiniteTrace::on_interval({0, 2}, "11")) == R(1, 12));
  CHECK(trace_measure(p, FiniteTrace::on_interval({0, 2}, "01")) == R(1, 4));
  CHECK_THROWS_AS(trace_measure(p, FiniteTrace::on_interval({0, 3}, "011")), BiasUndefinedError);
  // The four traces over {0,1} carry total mass 1.
  Rational total;
  for (std::uint64_t m = 0; m < 4; ++m) total += trace_measure(p, FiniteTrace::from_mask({0, 1}, m));
  CHECK(total == R(1));
}

TEST_CASE("family_measure examples") {
  const auto u = BiasSequence::uniform();
  CylinderFamily J(Interval{0, 2});
  J.insert(FiniteTrace::on_interval({0, 2}, "11"));
  J.insert(FiniteTrace::on_interval({0, 2}, "10"));
  CHECK(family_measure(u, J) == R(1, 2));
  for (std::uint64_t m = 0; m < 4; ++m) J.insert_mask(m);
  CHECK(family_measure(u, J) == R(1));

  const auto p = prefix({R(1, 4), R(1, 3)});
  CylinderFamily K(Interval{0, 2});
  K.insert(FiniteTrace::on_interval({0, 2}, "11"));
  K.insert(FiniteTrace::on_interval({0, 2}, "01"));
  CHECK(family_measure(p, K) == R(1, 3));
  CHECK(family_measure(p, K) == oracle_family({R(1, 4), R(1, 3)}, {0, 1}, {"11", "01"}));
}

TEST_CASE("enumeration cap") {
  CylinderFamily big(Interval{0, 21});
  CHECK_THROWS_AS(family_measure(BiasSequence::uniform(), big), EnumerationCapError);
  CHECK_NOTHROW(family_measure(BiasSequence::uniform(), big, 21));
  CHECK_THROWS_AS(check_enumeration_cap(31, 40), EnumerationCapError);
  try {
    check_enumeration_cap(21, 20);
  } catch (const EnumerationCapError& e) {
    CHECK(std::string(e.what()).find("enumeration cap") != std::string::npos);
    CHECK(e.size() == 21);
  }
}

TEST_CASE("hit_measure examples") {
  const auto u = BiasSequence::uniform();
  CHECK(hit_measure(u, {{0}, {1, 2}}, {0, 1, 2}) == R(5, 8));
  CHECK(hit_measure(prefix({R(1, 5)}), {}, {0}) == R(0));
  CHECK(hit_measure(u, {{0}}, {0}) == R(1, 2));
  CHECK_THROWS_AS(hit_measure(u, {{3}}, {0, 1}), DomainError);
}

TEST_CASE("mask_weights matches trace_measure") {
  const auto p = prefix({R(1, 4), R(1, 3), R(2, 5), R(1, 7)});
  const CoordSet dom{0, 2, 3};
  const auto w = mask_weights(p, dom);
  REQUIRE(w.size() == 8);
  for (std::uint64_t m = 0; m < 8; ++m) CHECK(w[m] == trace_measure(p, FiniteTrace::from_mask(dom, m)));
}

TEST_CASE("family and hit measures agree with brute force on random inputs") {
  std::mt19937_64 rng(20240611);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 1 + rng() % 8;
    std::vector<Rational> biases;
    for (std::size_t i = 0; i < n; ++i) biases.push_back(random_bias(rng));
    const auto p = prefix(biases);
    const auto dom = Interval{0, n}.coords();

    CylinderFamily J(dom);
    std::vector<std::string> members;
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m)
      if (rng() % 3 == 0) {
        const auto t = FiniteTrace::from_mask(dom, m);
        J.insert(t);
        members.push_back(t.bit_string());
      }
    CHECK(family_measure(p, J) == oracle_family(biases, dom, members));

    std::vector<CoordSet> sets;
    for (int s = 0; s < 3; ++s) {
      CoordSet a;
      for (Coord c : dom)
        if (rng() % 3 == 0) a.push_back(c);
      if (!a.empty()) sets.push_back(a);
    }
    CHECK(hit_measure(p, sets, dom) == oracle_hit(biases, dom, sets));
  }
}

TEST_CASE("hit_measure is monotone under shrinking members") {
  const auto u = BiasSequence::uniform();
  CHECK(hit_measure(u, {{0, 1, 2}, {3, 4}}, {0, 1, 2, 3, 4}) <= hit_measure(u, {{0, 1}, {4}}, {0, 1, 2, 3, 4}));
}

TEST_CASE("conjugate_bias examples") {
  const auto q_half = conjugate_bias(BiasSequence::uniform(), MaxMap{});
  CHECK(q_half.bias(0) == R(0));
  CHECK(q_half.bias(7) == R(0));
  const auto q = conjugate_bias(prefix({R(1, 4)}), MaxMap{});
  CHECK(q.bias(0) == R(1, 3));
  CHECK(q.is_derived());

  const auto r = conjugate_bias(prefix({R(1, 3)}), UnionMap{prefix({R(1, 2)})});
  CHECK(r.bias(0) == R(1, 4));
  CHECK_THROWS_WITH_AS(conjugate_bias(prefix({R(1, 2)}), UnionMap{prefix({R(1, 3)})}),
                       doctest::Contains("not dominated"), DomainError);
}

TEST_CASE("pushforward_check examples") {
  const auto p = prefix({R(1, 4)});
  const auto zero = FiniteTrace::on_interval({0, 1}, "0");
  CHECK(pushforward_check(p, BiasSequence::derived({R(1, 3)}, UnspecifiedTail{}), MaxMap{}, zero));
  CHECK_FALSE(pushforward_check(p, prefix({R(1, 4)}), MaxMap{}, zero));
  const auto u = BiasSequence::uniform();
  const auto aux = conjugate_bias(u, MaxMap{});
  for (std::uint64_t m = 0; m < 8; ++m)
    CHECK(pushforward_check(u, aux, MaxMap{}, FiniteTrace::from_mask({0, 1, 2}, m)));
}

TEST_CASE("pushforward holds for conjugates on random prefixes") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + rng() % 4;
    std::vector<Rational> pv;
    std::vector<Rational> qv;
    for (std::size_t i = 0; i < n; ++i) {
      const auto a = random_bias(rng);
      const auto b = random_bias(rng);
      pv.push_back(std::min(a, b));
      qv.push_back(std::max(a, b));
    }
    const auto p = prefix(pv);
    const auto q = prefix(qv);
    const auto qmax = conjugate_bias(p, MaxMap{});
    const auto r = conjugate_bias(p, UnionMap{q});
    const auto dom = Interval{0, n}.coords();
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) {
      const auto s = FiniteTrace::from_mask(dom, m);
      CHECK(pushforward_check(p, qmax, MaxMap{}, s));
      CHECK(pushforward_check(p, r, UnionMap{q}, s));
    }
  }
}

TEST_CASE("tail certificates") {
  const auto harmonic = BiasSequence::make({}, PowerLawTail{R(1), R(1)});
  CHECK(tail_certificate(harmonic, 1, 0).verdict == Verdict::diverges);
  const auto sq = tail_certificate(harmonic, 2, 10);
  CHECK(sq.verdict == Verdict::converges);
  REQUIRE(sq.tail_bound);
  CHECK(*sq.tail_bound == R(1, 10));

  const auto geo = tail_certificate(BiasSequence::make({}, GeometricTail{R(1), R(1, 2)}), 1, 4);
  CHECK(geo.verdict == Verdict::converges);
  CHECK(*geo.tail_bound == R(1, 8));

  CHECK(tail_certificate(BiasSequence::constant(R(1, 3)), 5, 0).verdict == Verdict::diverges);
  CHECK(tail_certificate(prefix({R(1, 3)}), 1, 1).verdict == Verdict::unknown);
  CHECK_THROWS_AS(tail_certificate(prefix({R(1, 3)}), 1, 0), DomainError);

  // Non-integer kα: the bound still dominates a long exact partial tail.
  const auto root = BiasSequence::make({}, PowerLawTail{R(1, 2), R(3, 4)});
  const auto c = tail_certificate(root, 2, 16);
  CHECK(c.verdict == Verdict::converges);
  REQUIRE(c.tail_bound);
  // (1/2)^2 · 16^{-1/2} / (1/2) = 1/8.
  CHECK(*c.tail_bound >= R(1, 8));
  CHECK(*c.tail_bound - R(1, 8) < R(1, 1000000));
}

TEST_CASE("power-law bound dominates partial tails") {
  const auto harmonic = BiasSequence::make({}, PowerLawTail{R(1), R(1)});
  for (long N : {10L, 100L}) {
    const auto bound = *tail_certificate(harmonic, 2, static_cast<Coord>(N)).tail_bound;
    Rational partial;
    for (long n = N + 1; n <= 3 * N; ++n) partial += R(1, n * n);
    CHECK(partial <= bound);
  }
}
