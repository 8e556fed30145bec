#include <doctest.h>

#include <algorithm>
#include <random>

#include "srcf/error.hpp"
#include "srcf/expansion.hpp"

using namespace srcf;

namespace {

const SignSequence kPlus = SignSequence::constant(Sign::kPlus);
const SignSequence kMinus = SignSequence::constant(Sign::kMinus);

NumberInput golden() { return NumberInput::surd(-1, 1, 2, 5); }

// sign of (p + q sqrt d)/r - v, with r > 0
int compare(const QuadraticSurd& x, const Rational& v) {
  const Rational u = v * Rational(x.r) - Rational(x.p);  // compare q sqrt d with u
  const int su = u > 0 ? 1 : (u < 0 ? -1 : 0);
  const int sq = x.q > 0 ? 1 : -1;
  if (su != sq) return sq;
  const Rational lhs = Rational(x.q * x.q * x.d);
  const Rational rhs = u * u;
  return sq > 0 ? (lhs > rhs ? 1 : -1) : (lhs < rhs ? 1 : -1);
}

QuadraticSurd random_surd(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> dd(2, 300), qq(1, 6), rr(1, 60);
  std::bernoulli_distribution neg(0.3);
  Integer d;
  do {
    d = dd(rng);
  } while (boost::multiprecision::sqrt(d) * boost::multiprecision::sqrt(d) == d);
  Integer q = qq(rng);
  if (neg(rng)) q = -q;
  const Integer r = rr(rng);
  const Integer root = boost::multiprecision::sqrt(Integer(q * q * d));
  const Integer fl = q > 0 ? root : Integer(-root - 1);
  std::uniform_int_distribution<int> off(0, static_cast<int>(r) - 1);
  const Integer p = -fl + off(rng);
  return {p, q, r, d};
}

std::vector<Digit> take(const Expansion& e) { return e.digits; }

}  // namespace

TEST_CASE("golden ratio under constant signs") {
  const Expansion rcf = expand(golden(), kPlus, 50);
  CHECK(rcf.status == ExpansionStatus::kComplete);
  CHECK(rcf.digits == std::vector<Digit>(50, 1));
  const Expansion bcf = expand(golden(), kMinus, 50);
  std::vector<Digit> want(50, 3);
  want[0] = 2;
  CHECK(bcf.digits == want);
}

TEST_CASE("sqrt 2 - 1 under alternating signs") {
  const SignSequence alt = SignSequence::periodic({Sign::kPlus, Sign::kMinus});
  const Expansion e = expand(NumberInput::surd(-1, 1, 1, 2), alt, 6);
  CHECK(e.digits == std::vector<Digit>{2, 3, 1, 2, 1, 2});
  const QuadraticSurd x{-1, 1, 1, 2};
  for (std::size_t n = 1; n <= 6; ++n) {
    const RationalInterval i = singleton_check(e.signs, e.digits, n);
    CHECK(compare(x, i.lo) > 0);
    CHECK(compare(x, i.hi) < 0);
  }
}

TEST_CASE("evaluation of finite words") {
  for (std::size_t n = 1; n <= 50; ++n) {
    const std::vector<Sign> s(n, Sign::kMinus);
    const std::vector<Digit> d(n, 2);
    CHECK(evaluate(s, d, 0) == Rational(n, n + 1));
  }
  CHECK(evaluate(std::vector<Sign>{Sign::kPlus}, std::vector<Digit>{2}, 0) == Rational(1, 2));
  CHECK(evaluate(std::vector<Sign>{Sign::kPlus, Sign::kPlus}, std::vector<Digit>{1, 2}, 1) == Rational(3, 4));
  CHECK_THROWS_AS(evaluate(std::vector<Sign>{Sign::kMinus}, std::vector<Digit>{1}, 0), Error);
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(NumberInput::rational(Rational(3, 2)), Error);
  CHECK_THROWS_AS(NumberInput::rational(Rational(0)), Error);
  CHECK_THROWS_AS(NumberInput::surd(1, 1, 1, 4), Error);   // square D
  CHECK_THROWS_AS(NumberInput::surd(0, 1, 1, 2), Error);   // sqrt 2 > 1
  CHECK_NOTHROW(NumberInput::surd(1, -1, -1, 2));          // (sqrt 2 - 1) with r < 0
}

TEST_CASE("rational inputs") {
  const Expansion e = expand(NumberInput::rational(Rational(3, 4)), kPlus, 20);
  CHECK(e.status == ExpansionStatus::kRationalTermination);
  CHECK(e.digits == std::vector<Digit>{1, 3});
  CHECK(e.rational_input);
  // remainder 1 under +1: final digit 1 then termination
  const Expansion one = expand(NumberInput::rational(Rational(1, 2)), kPlus, 20);
  CHECK(one.digits == std::vector<Digit>{2});
  CHECK(one.status == ExpansionStatus::kRationalTermination);
  // BCF of n/(n+1) never terminates: 2 (n-1 times), 3, then 2 forever
  const Expansion b = expand(NumberInput::rational(Rational(4, 5)), kMinus, 10);
  CHECK(b.status == ExpansionStatus::kComplete);
  CHECK(b.digits == std::vector<Digit>{2, 2, 2, 3, 2, 2, 2, 2, 2, 2});
}

TEST_CASE("roundtrip and admissibility on seeded surds") {
  std::mt19937_64 rng(2024);
  std::vector<SignSequence> sigmas{kPlus, kMinus, SignSequence::periodic({Sign::kPlus, Sign::kMinus}),
                                   SignSequence::periodic({Sign::kMinus, Sign::kMinus, Sign::kPlus}, {Sign::kPlus}),
                                   SignSequence::seeded_random(0.5, 7), SignSequence::seeded_random(0.2, 8)};
  for (int trial = 0; trial < 120; ++trial) {
    const QuadraticSurd x = random_surd(rng);
    const SignSequence& sigma = sigmas[trial % sigmas.size()];
    const Expansion e = expand(NumberInput::surd(x.p, x.q, x.r, x.d), sigma, 60);
    REQUIRE(e.digits.size() == 60);
    const std::vector<Rational> lengths = nested_lengths(e.signs, e.digits);
    MobiusMap m;
    for (std::size_t n = 0; n < 60; ++n) {
      CHECK(e.signs[n] == sigma[n + 1]);
      CHECK(admissible(e.signs[n], e.digits[n]));
      m = compose(m, generator(e.signs[n], e.digits[n]));
      const RationalInterval i = fundamental_interval(m);
      CHECK(compare(x, i.lo) > 0);
      CHECK(compare(x, i.hi) < 0);
      if (n > 0) CHECK(lengths[n] < lengths[n - 1]);
    }
  }
}

TEST_CASE("depth-4 words have interior-disjoint intervals") {
  for (const SignSequence& sigma : {kPlus, kMinus, SignSequence::periodic({Sign::kMinus, Sign::kPlus})}) {
    const std::vector<Sign> signs = sigma.prefix(4);
    std::vector<RationalInterval> all;
    std::vector<Digit> w(4, 1);
    for (int code = 0; code < 6 * 6 * 6 * 6; ++code) {
      int c = code;
      bool ok = true;
      for (int k = 0; k < 4; ++k, c /= 6) {
        w[k] = 1 + c % 6;
        ok = ok && admissible(signs[k], w[k]);
      }
      if (ok) all.push_back(fundamental_interval(signs, w));
    }
    std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.lo < b.lo; });
    for (std::size_t i = 1; i < all.size(); ++i) CHECK(all[i - 1].interior_disjoint(all[i]));
  }
}

TEST_CASE("decimal inputs certify every emitted digit") {
  const Rational value = parse_rational("0.41421356237309504880168872420969807856967187537694");
  for (const SignSequence& sigma : {kPlus, kMinus, SignSequence::periodic({Sign::kPlus, Sign::kMinus})}) {
    const Expansion coarse = expand(NumberInput::decimal(value, Rational(1, 1000000000)), sigma, 200);
    const Expansion fine = expand(NumberInput::decimal(value, Rational(1, 10000000000)), sigma, 200);
    CHECK(coarse.status == ExpansionStatus::kUncertifiedDigit);
    CHECK(coarse.digits.size() >= 5);
    REQUIRE(fine.digits.size() >= coarse.digits.size());
    CHECK(std::equal(coarse.digits.begin(), coarse.digits.end(), fine.digits.begin()));
    const Expansion exact = expand(NumberInput::surd(-1, 1, 1, 2), sigma, coarse.digits.size());
    CHECK(take(exact) == coarse.digits);
  }
}

TEST_CASE("reconversion") {
  const Expansion bcf = expand(golden(), kMinus, 40);
  const Expansion rcf = reconvert(bcf, kPlus, 500);
  CHECK(rcf.status == ExpansionStatus::kEnclosureTooWide);
  CHECK(rcf.digits.size() >= 60);
  CHECK(rcf.digits == std::vector<Digit>(rcf.digits.size(), 1));

  const SignSequence alt = SignSequence::periodic({Sign::kPlus, Sign::kMinus});
  const Expansion e = expand(NumberInput::surd(-1, 1, 1, 2), alt, 25);
  const Expansion same = reconvert(e, alt, 25);
  CHECK(same.digits == e.digits);

  const Expansion r = expand(NumberInput::rational(Rational(7, 8)), kMinus, 30);
  const Expansion back = reconvert(r, kPlus, 30);
  CHECK(back.status == ExpansionStatus::kRationalTermination);
  CHECK(back.digits == std::vector<Digit>{1, 7});
}

TEST_CASE("nested interval lengths") {
  const std::vector<Sign> s(30, Sign::kPlus);
  const std::vector<Digit> d(30, 1);
  const std::vector<Rational> len = nested_lengths(s, d);
  Integer f0 = 1, f1 = 1;  // F_1, F_2
  for (std::size_t n = 1; n <= 30; ++n) {
    const Integer f2 = f0 + f1;
    CHECK(len[n - 1] == Rational(1, f1 * f2));  // 1/(F_{n+1} F_{n+2})
    f0 = f1;
    f1 = f2;
  }
  for (std::size_t n = 1; n <= 40; ++n) {
    const std::vector<Sign> ms(n, Sign::kMinus);
    const std::vector<Digit> md(n, 2);
    CHECK(singleton_check(ms, md, n) == RationalInterval{Rational(n, n + 1), Rational(1)});
  }
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<Digit> big(3, 50);
  std::vector<Sign> ws(25);
  std::vector<Digit> wd(25);
  for (std::size_t k = 0; k < 25; ++k) {
    ws[k] = k % 3 ? Sign::kMinus : Sign::kPlus;
    wd[k] = k < 5 ? 2 : big(rng);
  }
  const std::vector<Rational> l = nested_lengths(ws, wd);
  for (std::size_t k = 5; k < 25; ++k) CHECK(l[k] <= l[k - 1] / 2);
}
