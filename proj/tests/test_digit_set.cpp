#include <doctest.h>

#include <cmath>

#include "srcf/block_scheme.hpp"
#include "srcf/error.hpp"

using namespace srcf;

namespace {

// Independent b-sequence: walk squares k^2 and sum k^{-2e}.
std::vector<Digit> square_blocks_oracle(double e, std::size_t count) {
  std::vector<Digit> b{1};
  Digit k = 1;
  while (b.size() < count) {
    double sum = 0;
    while (sum < 1) {
      sum += std::pow(double(k * k), -e);
      ++k;
    }
    b.push_back(k * k);
  }
  return b;
}

}  // namespace

TEST_CASE("digit set enumeration and membership") {
  const DigitSet sq = DigitSet::powers(2);
  CHECK(sq.min() == 1);
  CHECK(sq.elements(2, 40) == std::vector<Digit>{4, 9, 16, 25, 36});
  CHECK(sq.count(1, 101) == 10);
  CHECK(sq.contains(Integer(144)));
  CHECK_FALSE(sq.contains(Integer(145)));
  CHECK(*sq.next(Digit{50}) == 64);

  const DigitSet geo = DigitSet::geometric(1, 2);
  CHECK(geo.elements(1, 70) == std::vector<Digit>{1, 2, 4, 8, 16, 32, 64});
  CHECK(geo.contains(Integer(1) << 100));

  const DigitSet poly = DigitSet::polynomial({1, 0, 1});  // k^2 + 1
  CHECK(poly.elements(1, 30) == std::vector<Digit>{2, 5, 10, 17, 26});

  const DigitSet pr = DigitSet::primes();
  CHECK(pr.elements(1, 30) == std::vector<Digit>{2, 3, 5, 7, 11, 13, 17, 19, 23, 29});
  CHECK(pr.count(1, 1000) == 168);

  const DigitSet fin = DigitSet::finite({7, 3, 3, 5});
  CHECK(fin.is_finite());
  CHECK(fin.elements(1, 100) == std::vector<Digit>{3, 5, 7});
  CHECK_FALSE(fin.next(Digit{8}).has_value());

  const DigitSet mixed = DigitSet::with_tail({2, 3}, DigitSet::powers(3));
  CHECK(mixed.elements(1, 70) == std::vector<Digit>{2, 3, 8, 27, 64});
  CHECK_FALSE(mixed.contains(Integer(1)));

  CHECK(DigitSet::from_json(mixed.to_json()).to_json() == mixed.to_json());
  CHECK_THROWS_AS(DigitSet::from_json(nlohmann::json{{"kind", "powers"}, {"exponent", 2}, {"x", 1}}), Error);
}

TEST_CASE("large elements") {
  const DigitSet n = DigitSet::naturals();
  const Integer big = Integer(10) * boost::multiprecision::pow(Integer(10), 120);
  const std::vector<Integer> run = n.elements_from(big, 3);
  CHECK(run == std::vector<Integer>{big, big + 1, big + 2});
  const DigitSet sq = DigitSet::powers(2);
  const Integer root = boost::multiprecision::pow(Integer(10), 60) + 7;
  CHECK(*sq.next(Integer(root * root - 1)) == root * root);
}

TEST_CASE("tail sums bracket direct summation") {
  // sum_{k >= 10} k^{-2} = pi^2/6 - sum_{k<10} k^{-2}
  long double head = 0;
  for (int k = 1; k < 10; ++k) head += 1.0L / (k * k);
  const long double exact = 1.6449340668482264365L - head;
  const SeriesBracket b = DigitSet::naturals().tail_sum(2, Integer(10));
  CHECK(b.lo <= exact);
  CHECK(exact <= b.hi);
  CHECK(b.hi - b.lo < 5e-8L);

  const SeriesBracket g = DigitSet::geometric(1, 2).tail_sum(1, Integer(3));  // 1/4 + 1/8 + ... = 1/2
  CHECK(g.lo == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(g.hi == doctest::Approx(0.5).epsilon(1e-12));

  CHECK(std::isinf(DigitSet::naturals().tail_sum(1, Integer(1)).hi));
  CHECK(std::isinf(DigitSet::powers(2).tail_sum(0.5, Integer(1)).hi));
  CHECK(std::isfinite(DigitSet::powers(2).tail_sum(0.51, Integer(1)).hi));
}

TEST_CASE("exponent of convergence") {
  CHECK(*tau(DigitSet::powers(3)).exact == Rational(1, 3));
  CHECK(*tau(DigitSet::geometric(1, 2)).exact == 0);
  CHECK(*tau(DigitSet::naturals()).exact == 1);
  CHECK(*tau(DigitSet::primes()).exact == 1);
  CHECK(*tau(DigitSet::polynomial({0, 1, 3})).exact == Rational(1, 2));
  CHECK(*tau(DigitSet::finite({1, 2, 3})).exact == 0);

  for (const auto& [set, value] : std::vector<std::pair<DigitSet, long double>>{
           {DigitSet::naturals(), 1}, {DigitSet::powers(2), 0.5L}, {DigitSet::powers(5), 0.2L},
           {DigitSet::geometric(3, 2), 0}, {DigitSet::polynomial({1, 1, 0, 2}), 1.0L / 3}}) {
    const TauEstimate t = tau_numeric(set, 1e-6);
    CHECK(t.method == TauMethod::kPartialSumTailBound);
    CHECK(t.lower <= value);
    CHECK(value <= t.upper);
    CHECK(t.upper - t.lower <= 1e-6);
  }
  const TauEstimate p = tau_numeric(DigitSet::primes(), 1e-6);
  CHECK(p.lower <= 1);
  CHECK(p.upper >= 1);
  CHECK_FALSE(p.warning.empty());
}

TEST_CASE("growth functions") {
  const GrowthFunction id = GrowthFunction::power(1, 1);
  CHECK(id(7) == 7);
  CHECK(id.first_index_at_least(25) == 25);
  const GrowthFunction ex = GrowthFunction::exponential(1, 2);
  CHECK(ex(10) == 1024);
  CHECK(ex.first_index_at_least(1000) == 10);
  const GrowthFunction tab = GrowthFunction::table({50, 1, 9, 2}, GrowthFunction::power(1, 1));
  CHECK(tab(1) == 50);
  CHECK(tab(5) == 5);
  CHECK(tab.monotone_from() == 4);
  CHECK(tab.first_index_at_least(5) == 5);
  CHECK(tab.first_index_at_least(2) == 3);
  CHECK(tab.first_index_at_least(1) == 1);
  CHECK(GrowthFunction::from_json(tab.to_json()).to_json() == tab.to_json());
  CHECK_THROWS_AS(GrowthFunction::power(1, 1e-30L).first_index_at_least(1000, 1000000), Error);
}

TEST_CASE("block scheme for squares") {
  const BlockScheme s = build_blocks(DigitSet::powers(2), GrowthFunction::power(1, 1), 0.1L, 6);
  const std::vector<Digit> oracle = square_blocks_oracle(0.4, 8);
  CHECK(s.b() == oracle);
  CHECK(s.b(1) == 1);
  CHECK(s.b(2) == 4);
  CHECK(s.b(3) == 25);
  CHECK(s.block(2) == std::vector<Digit>{4, 9, 16});
  CHECK(s.block_size(1) == 1);
  CHECK(s.window_end(1) >= 24);
  CHECK(s.uncovered_count() == 0);
  for (const SchemeCheck& c : verify_scheme(s)) {
    INFO(c.name << ": " << c.detail);
    CHECK(c.pass);
  }

  // alphabet layout
  CHECK(alphabet_layout(s, 1).block == 1);
  CHECK(alphabet_layout(s, s.window_end(1)).block == 1);
  CHECK(alphabet_layout(s, s.window_end(1) + 1).block == 2);
  for (std::size_t m = 2; m <= s.horizon(); ++m) {
    const LevelSlot slot = alphabet_layout(s, s.window_end(m));
    CHECK(slot.block == m);
    CHECK(slot.offset == s.t(m));
  }
  CHECK_THROWS_AS(alphabet_layout(s, s.levels() + 1), Error);

  // serialization roundtrip
  const BlockScheme back = BlockScheme::from_json(nlohmann::json::parse(s.to_json().dump()));
  CHECK(back.b() == s.b());
  CHECK(back.t() == s.t());
  nlohmann::json tampered = s.to_json();
  tampered["b"][2] = 36;
  CHECK_THROWS_AS(BlockScheme::from_json(tampered), Error);
}

TEST_CASE("block scheme edge cases") {
  // min B = 1 closes the first block with one term
  const BlockScheme n = build_blocks(DigitSet::naturals(), GrowthFunction::power(1, 1), 0.5L, 4);
  CHECK(n.b(2) == 2);
  // min B > 1 leaves elements between b_1 and b_2 in no block
  const BlockScheme p = build_blocks(DigitSet::with_tail({}, DigitSet::polynomial({5, 1})),
                                     GrowthFunction::power(10, 1), 0.2L, 3);
  CHECK(p.b(1) == 6);
  CHECK(p.uncovered_count() == p.b(2) - 7);
  for (const SchemeCheck& c : verify_scheme(p)) {
    INFO(c.name << ": " << c.detail);
    CHECK(c.pass);
  }
  CHECK_THROWS_AS(build_blocks(DigitSet::powers(2), GrowthFunction::power(1, 1), 0.5L, 3), Error);
  CHECK_THROWS_AS(build_blocks(DigitSet::geometric(1, 2), GrowthFunction::power(1, 1), 0.1L, 3), Error);
  try {
    build_blocks(DigitSet::powers(2), GrowthFunction::power(1, 1), 0.6L, 3);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kEpsilonOutOfRange);
  }
}
