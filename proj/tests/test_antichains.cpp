#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "filterlab/antichains.hpp"
#include "filterlab/errors.hpp"

#include <random>

using namespace filterlab;

namespace {

Rational R(long n, long d = 1) { return Rational(n, d); }

CylinderFamily family(const CoordSet& dom, std::initializer_list<const char*> members) {
  CylinderFamily J(dom);
  for (const char* m : members) J.insert(FiniteTrace::from_string(dom, m));
  return J;
}

FiniteTrace word(const std::string& s) { return FiniteTrace::on_interval({0, s.size()}, s); }

AntichainFamily two_stage() { return AntichainFamily::build({{{0, 1}, {{0}}}, {{2, 3}, {{2, 3}}}}); }

// Normalized stage n: one member of size n+2 inside a support of size n+3.
AntichainFamily normalized(std::mt19937_64& rng, std::size_t stages, std::size_t first_index, Coord& end) {
  std::vector<AntichainStage> out;
  Coord next = 0;
  for (std::size_t i = 0; i < stages; ++i) {
    const std::size_t n = first_index + i;
    const std::size_t width = n + 3 + rng() % 2;
    CoordSet support = Interval{next, next + width}.coords();
    CoordSet member = support;
    member.erase(member.begin() + static_cast<long>(rng() % width));
    while (member.size() > n + 2) member.erase(member.begin() + static_cast<long>(rng() % member.size()));
    out.push_back({support, {member}});
    next += width;
  }
  end = next;
  return AntichainFamily::build(std::move(out));
}

}  // namespace

TEST_CASE("family validation") {
  CHECK_NOTHROW(two_stage());
  CHECK(two_stage().weights() == std::vector<Rational>{R(1, 2), R(1, 4)});
  CHECK_THROWS_AS(AntichainFamily::build({{{0, 1}, {{0}}}, {{1, 2}, {{2}}}}), ValidationError);
  CHECK_THROWS_AS(AntichainFamily::build({{{0, 1}, {{}}}}), ValidationError);
  CHECK_THROWS_AS(AntichainFamily::build({{{0, 1}, {{0}, {0, 1}}}}), ValidationError);
  CHECK_THROWS_AS(AntichainFamily::build({{{0, 1}, {{3}}}}), ValidationError);
  CHECK_NOTHROW(AntichainFamily::load({{{0, 1}, {{0}}}}, {R(1, 2)}, BiasSequence::uniform()));
  CHECK_THROWS_AS(AntichainFamily::load({{{0, 1}, {{0}}}}, {R(1, 3)}, BiasSequence::uniform()), ValidationError);
}

TEST_CASE("upward_kernel examples") {
  const CoordSet I{0, 1, 2};
  const auto J = family(I, {"110", "111", "011"});
  CHECK(upward_kernel(J).traces() == J.traces());
  CHECK(upward_kernel(family(I, {"100"})).empty());
  CylinderFamily all(I);
  for (std::uint64_t m = 0; m < 8; ++m) all.insert_mask(m);
  CHECK(upward_kernel(all).traces() == all.traces());
}

TEST_CASE("minimal_antichain examples") {
  const CoordSet I{0, 1, 2};
  CHECK(minimal_antichain(family(I, {"110", "111"})) == std::vector<CoordSet>{{0, 1}});
  CHECK(minimal_antichain(family(I, {"110", "111", "011"})) == std::vector<CoordSet>{{0, 1}, {1, 2}});
  CHECK(minimal_antichain(CylinderFamily(I)).empty());
}

TEST_CASE("support and star image") {
  const auto fam = two_stage();
  CHECK(support(word("1011"), fam) == std::vector<std::size_t>{0, 1});
  CHECK(support(word("0000"), fam).empty());
  CHECK(support(word("1111"), fam) == std::vector<std::size_t>{0, 1});
  CHECK_THROWS_AS(support(word("101"), fam), DomainError);

  CHECK(star_image({word("1111")}, fam) == std::vector<std::vector<std::size_t>>{{0, 1}});
  CHECK(star_image({}, fam).empty());
  CHECK(star_image({word("1011"), word("1111")}, fam) == std::vector<std::vector<std::size_t>>{{0, 1}});
}

TEST_CASE("support is monotone and star_image round-trips") {
  std::mt19937_64 rng(8);
  const auto fam = AntichainFamily::build({{{0, 1, 2}, {{0, 1}, {2}}}, {{3, 4, 5}, {{3, 5}}}, {{6, 7}, {{6, 7}}}});
  const auto dom = Interval{0, 8}.coords();
  std::vector<FiniteTrace> base;
  for (int i = 0; i < 200; ++i) {
    const std::uint64_t x = rng() % 256;
    const std::uint64_t y = x | (rng() % 256);
    const auto X = FiniteTrace::from_mask(dom, x);
    const auto Y = FiniteTrace::from_mask(dom, y);
    const auto sx = support(X, fam);
    const auto sy = support(Y, fam);
    CHECK(std::includes(sy.begin(), sy.end(), sx.begin(), sx.end()));
    base.push_back(X);
  }
  const auto image = star_image(base, fam);
  for (const auto& X : base) CHECK(std::find(image.begin(), image.end(), support(X, fam)) != image.end());
  for (const auto& s : image)
    CHECK(std::any_of(base.begin(), base.end(), [&](const FiniteTrace& X) { return support(X, fam) == s; }));
}

TEST_CASE("fsigma_filter_cover") {
  const auto fam = AntichainFamily::build({{{0}, {{0}}}, {{1}, {{1}}}, {{2}, {{2}}}, {{3}, {{3}}}});
  const auto blocks = IntervalPartition::make({0, 2, 4});
  CHECK(fsigma_filter_cover(fam, blocks, word("1111"), 0));
  CHECK_FALSE(fsigma_filter_cover(fam, blocks, word("0000"), 0));
  CHECK(fsigma_filter_cover(fam, blocks, word("0110"), 0));
  CHECK_FALSE(fsigma_filter_cover(fam, blocks, word("0011"), 0));
  CHECK(fsigma_filter_cover(fam, blocks, word("0011"), 1));
  CHECK_THROWS_AS(fsigma_filter_cover(fam, IntervalPartition::make({0, 2}), word("1111"), 0), DomainError);
}

TEST_CASE("kernel antichain equivalence by enumeration") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t n = 1 + rng() % 7;
    const auto I = Interval{0, n}.coords();
    const std::uint64_t full = std::uint64_t{1} << n;
    std::vector<char> in(full, 0);
    CylinderFamily J(I);
    for (std::uint64_t m = 0; m < full; ++m)
      if (rng() % 2) {
        in[m] = 1;
        J.insert_mask(m);
      }
    // Oracle: s is in the kernel iff every superset mask is in J.
    std::vector<char> kernel(full, 0);
    for (std::uint64_t m = 0; m < full; ++m) {
      bool all = true;
      for (std::uint64_t u = 0; u < full && all; ++u)
        if ((u & m) == m && !in[u]) all = false;
      kernel[m] = all;
    }
    const auto K = upward_kernel(J);
    for (std::uint64_t m = 0; m < full; ++m) CHECK(K.contains(FiniteTrace::from_mask(I, m)) == bool(kernel[m]));

    const auto A = minimal_antichain(K);
    for (std::size_t a = 0; a < A.size(); ++a)
      for (std::size_t b = 0; b < A.size(); ++b)
        if (a != b) CHECK_FALSE(is_subset(A[a], A[b]));
    for (std::uint64_t m = 0; m < full; ++m) {
      const auto ones = FiniteTrace::from_mask(I, m).ones();
      const bool contains = std::any_of(A.begin(), A.end(), [&](const CoordSet& a) { return is_subset(a, ones); });
      CHECK(contains == bool(kernel[m]));
    }
  }
}

TEST_CASE("rapid escape examples") {
  const auto single = AntichainFamily::build({{{0, 1}, {{0, 1}}}});
  const auto r = rapid_escape(single, word("10"), 1);
  CHECK(r.f == std::vector<Coord>{2});
  CHECK(r.counts == std::vector<std::size_t>{1});
  CHECK(r.rapid_bound_holds);
  CHECK(r.hits.empty());

  std::mt19937_64 rng(1);
  Coord end = 0;
  const auto fam = normalized(rng, 4, 1, end);
  const auto z = greedy_rapid_witness(fam, end, 1);
  const auto g = rapid_escape(fam, z, 1);
  CHECK(g.normalized);
  CHECK(g.violations.empty());
  CHECK(g.escape_guaranteed);
  CHECK(g.hits.empty());

  const auto ones = rapid_escape(fam, FiniteTrace::constant({0, end}, true), 1);
  CHECK(ones.normalized);
  CHECK_FALSE(ones.rapid_bound_holds);
  CHECK(ones.hits == std::vector<std::size_t>{0, 1, 2, 3});

  const auto loose = AntichainFamily::build({{{0, 1}, {{0}}}});
  const auto bad = rapid_escape(loose, word("00"), 0);
  CHECK_FALSE(bad.normalized);
  REQUIRE(bad.violations.size() == 1);
  CHECK(bad.violations[0].find("uniform measure 1/2") != std::string::npos);
}

TEST_CASE("rapid pigeonhole on random normalized families") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 40; ++trial) {
    Coord end = 0;
    const std::size_t first = rng() % 3;
    const auto fam = normalized(rng, 1 + rng() % 4, first, end);
    const auto z = greedy_rapid_witness(fam, end, first);
    const auto r = rapid_escape(fam, z, first);
    CHECK(r.normalized);
    CHECK(r.rapid_bound_holds);
    CHECK(r.hits.empty());
    for (int k = 0; k < 10; ++k) {
      const auto w = FiniteTrace::from_mask(Interval{0, end}.coords(), rng());
      const auto rw = rapid_escape(fam, w, first);
      for (std::size_t i = 0; i < fam.size(); ++i) {
        const bool hit = std::find(rw.hits.begin(), rw.hits.end(), i) != rw.hits.end();
        if (rw.counts[i] <= first + i) CHECK_FALSE(hit);
        CHECK(hit == hits_stage(w, fam.stages()[i]));
      }
    }
  }
}
