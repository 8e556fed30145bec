#include <doctest.h>

#include <cmath>

#include "srcf/error.hpp"
#include "srcf/expansion.hpp"
#include "srcf/pressure.hpp"
#include "srcf/transfer.hpp"

using namespace srcf;

namespace {

const SignSequence kAlternating = SignSequence::periodic({Sign::kPlus, Sign::kMinus});

// Brute force over all words through the Mobius layer: sup of |D phi_w| on [0, 1].
long double oracle_log_z(const NonAutonomousIFS& sys, long double s, std::uint64_t n) {
  long double total = 0;
  std::vector<std::size_t> idx(n, 0);
  while (true) {
    MobiusMap m;
    for (std::uint64_t k = 0; k < n; ++k) m = m * generator(sys.sign(k + 1), sys.alphabet(k + 1)[idx[k]]);
    total += std::pow(to_long_double(derivative_bounds(m, unit_interval()).sup), s);
    std::size_t k = n;
    while (k > 0) {
      --k;
      if (++idx[k] < sys.alphabet(k + 1).size()) break;
      idx[k] = 0;
      if (k == 0) return std::log(total);
    }
  }
}

std::shared_ptr<const BlockScheme> squares_scheme() {
  return std::make_shared<const BlockScheme>(build_blocks(DigitSet::powers(2), GrowthFunction::power(1, 1), 0.1L, 6));
}

}  // namespace

TEST_CASE("assembly of explicit systems") {
  const NonAutonomousIFS gauss = autonomous_system(Sign::kPlus, {1, 2}, 30);
  CHECK(gauss.autonomous());
  CHECK(gauss.validation().open_set);
  CHECK(gauss.validation().small_digit_levels == 30);
  CHECK(gauss.alphabet(17) == std::vector<Digit>{1, 2});

  const NonAutonomousIFS big = autonomous_system(Sign::kMinus, {3, 4, 5}, 10);
  CHECK(big.validation().contraction_from == 1);
  CHECK(big.validation().small_digit_levels == 0);

  try {
    autonomous_system(Sign::kMinus, {1, 2, 3}, 5);
    FAIL("expected InadmissibleDigitAtLevel");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInadmissible);
    CHECK(e.index() == 1);
  }
  try {
    assemble(kAlternating, {{1, 2}, {2}, {1}, {1, 5}});
    FAIL("expected InadmissibleDigitAtLevel");
  } catch (const Error& e) {
    CHECK(e.index() == 4);
  }
  CHECK_FALSE(assemble(kAlternating, {{1, 2}, {2, 3}}).autonomous());
}

TEST_CASE("scheme-built system for squares") {
  const auto scheme = squares_scheme();
  try {
    assemble(kAlternating, scheme);
    FAIL("expected InadmissibleDigitAtLevel");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInadmissible);
    CHECK(e.index() == 2);
  }
  const NonAutonomousIFS sys = assemble(kAlternating, scheme, AdmissibilityPolicy::kRepairFirstWindow);
  const Validation& v = sys.validation();
  CHECK(v.open_set);
  CHECK(v.repaired_levels == scheme->window_end(1) / 2);
  CHECK(sys.alphabet(2) == std::vector<Digit>{4});
  CHECK(sys.alphabet(1) == std::vector<Digit>{1});
  // level 2 uses digit 4 > f(2) = 2, and so on up to level 3
  CHECK(v.containment_exception_count == 1);
  CHECK(v.contraction_from <= scheme->window_end(2) + 1);
  for (std::uint64_t n = v.contraction_from; n <= sys.levels(); n += 7) {
    CHECK(level_sup(sys.sign(n), sys.alphabet(n).front()) <= Rational(1, 4));
  }
  for (const SubexpEntry& e : v.subexp) CHECK(e.pass);

  const NonAutonomousIFS plus = assemble(SignSequence::constant(Sign::kPlus), scheme);
  CHECK(plus.validation().containment_exception_count == 0);
  CHECK(plus.validation().repaired_levels == 0);

  const ControlConstants cc = control_constants(sys, 0.1L);
  CHECK(cc.n == 2);
  CHECK(cc.c_window == 4);
  CHECK(cc.c_global == 4);
  CHECK_FALSE(cc.n_global.has_value());
  // direct scan: least N with b_{N+1}^delta >= (b/(b-1))^2
  std::size_t scan = 0;
  for (std::size_t n = 1; !scan; ++n) {
    const double b = double(scheme->b(n + 1));
    if (std::pow(b, 0.1) >= (b / (b - 1)) * (b / (b - 1))) scan = n;
  }
  CHECK(cc.n == scan);
  // large delta: N = 1 as soon as b_2 >= 2
  CHECK(control_constants(sys, 50).n == 1);
  CHECK(distortion_ratio(Sign::kPlus, 7) == Rational(64, 49));
}

TEST_CASE("sampled addresses") {
  const auto scheme = squares_scheme();
  const NonAutonomousIFS sys = assemble(SignSequence::constant(Sign::kPlus), scheme);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const SampledAddress a = sample_address(sys, seed, 40);
    for (std::size_t n = 1; n <= 40; ++n) {
      CHECK(DigitSet::powers(2).contains(Integer(a.digits[n - 1])));
      CHECK(a.digits[n - 1] <= n);
    }
    const SampledAddress shorter = sample_address(sys, seed, 39);
    CHECK(shorter.interval.contains(a.interval));
    const Expansion e = expand(NumberInput::rational(a.interval.midpoint()), sys.sigma(), 40);
    CHECK(e.digits == a.digits);
  }
  CHECK(sample_address(sys, 5, 30).digits == sample_address(sys, 5, 30).digits);
}

TEST_CASE("partition function values") {
  const NonAutonomousIFS gauss = autonomous_system(Sign::kPlus, {1, 2}, 30);
  const PressureBracket z1 = partition_bracket(gauss, 1, 1, PartitionMode::kExact);
  CHECK(std::exp(z1.z_low) == doctest::Approx(1.25).epsilon(1e-15));
  CHECK(std::exp(z1.z_high) == doctest::Approx(1.25).epsilon(1e-15));

  const NonAutonomousIFS mixed = assemble(kAlternating, {{1, 2, 3}, {2, 5}, {3}, {2, 3, 4, 9}, {2, 7}});
  for (PartitionMode mode : {PartitionMode::kExact, PartitionMode::kFactorized}) {
    const PressureBracket z0 = partition_bracket(mixed, 0, 5, mode);
    CHECK(z0.z_low == z0.z_high);
    CHECK(std::exp(z0.z_low) == doctest::Approx(48).epsilon(1e-15));
  }
  for (long double s : {0.3L, 0.7L, 1.0L}) {
    CHECK(partition_bracket(mixed, s, 5, PartitionMode::kExact).z_low ==
          doctest::Approx(double(oracle_log_z(mixed, s, 5))).epsilon(1e-12));
  }

  for (const SignSequence& sigma : {SignSequence::constant(Sign::kPlus), kAlternating}) {
    const NonAutonomousIFS sys = assemble(sigma, std::vector<std::vector<Digit>>(8, {3, 4}));
    for (long double s : {0.25L, 0.5L, 0.75L}) {
      const auto exact = partition_profile(sys, s, {1, 2, 3, 4, 5, 6, 7, 8}, PartitionMode::kExact);
      const auto fact = partition_profile(sys, s, {1, 2, 3, 4, 5, 6, 7, 8}, PartitionMode::kFactorized);
      for (std::size_t i = 0; i < 8; ++i) {
        CHECK(fact[i].z_low <= exact[i].z_low);
        CHECK(exact[i].z_high <= fact[i].z_high);
      }
    }
  }

  // strictly decreasing in s at fixed n
  long double prev_lo = INFINITY, prev_hi = INFINITY;
  for (long double s = 0; s <= 1.0L; s += 0.125L) {
    const PressureBracket b = partition_bracket(mixed, s, 5, PartitionMode::kFactorized);
    CHECK(b.z_low < prev_lo);
    CHECK(b.z_high < prev_hi);
    prev_lo = b.z_low;
    prev_hi = b.z_high;
  }

  CHECK_THROWS_AS(partition_bracket(gauss, 1, 30, PartitionMode::kExact), Error);
}

TEST_CASE("exact enumeration beyond 128-bit rows") {
  const Digit big = 1'000'000'000'000'000ULL;
  const NonAutonomousIFS sys = assemble(kAlternating, std::vector<std::vector<Digit>>(4, {big, big + 1}));
  CHECK(partition_bracket(sys, 0.5, 4, PartitionMode::kExact).z_low ==
        doctest::Approx(double(oracle_log_z(sys, 0.5, 4))).epsilon(1e-12));
}

TEST_CASE("lower pressure records") {
  const NonAutonomousIFS gauss = autonomous_system(Sign::kPlus, {1, 2}, 30);
  const PressureRecord at1 = lower_pressure(gauss, 1, {1, 2, 3, 4, 5, 6, 7, 8, 9, 10}, PartitionMode::kExact, 4);
  CHECK(at1.negative);
  CHECK(at1.brackets[0].p_high > 0);
  for (std::size_t i = 3; i < at1.brackets.size(); ++i) CHECK(at1.brackets[i].p_high < 0);

  const PressureRecord at0 = lower_pressure(gauss, 0, {1, 5, 10, 30}, PartitionMode::kFactorized);
  for (const auto& b : at0.brackets) CHECK(b.p_low == doctest::Approx(std::log(2.0)));
  CHECK(at0.positive);
}

TEST_CASE("Bowen bisection and transfer operator") {
  const NonAutonomousIFS gauss = autonomous_system(Sign::kPlus, {1, 2}, 20);
  BowenOptions opt;
  opt.tolerance = 1e-4;
  for (std::uint64_t n = 2; n <= 20; ++n) opt.depths.push_back(n);
  opt.estimator = PressureEstimator::kIncrement;
  const BowenBracket b = bowen_bisect(gauss, opt);
  CHECK(b.status == BowenStatus::kCertified);
  CHECK(b.s_plus - b.s_minus <= 1e-4);

  const TransferRoot root = transfer_dimension(gauss, 1e-12L);
  CHECK(b.s_minus <= root.s);
  CHECK(root.s <= b.s_plus);
  const TransferRoot doubled = transfer_dimension(gauss, 1e-12L, 8, 2 * root.degree);
  CHECK(std::abs(root.s - doubled.s) < 1e-9);
  // published value for E_2, secondary cross-check
  CHECK(double(root.s) == doctest::Approx(0.531280506277205).epsilon(1e-9));

  // the average estimator carries a 1/n bias but still brackets loosely
  opt.estimator = PressureEstimator::kAverage;
  opt.tolerance = 1e-2;
  const BowenBracket avg = bowen_bisect(gauss, opt);
  CHECK(avg.s_plus >= root.s);

  CHECK(transfer_refine(gauss, 0).lambda == doctest::Approx(2).epsilon(1e-12));
  const NonAutonomousIFS five = autonomous_system(Sign::kMinus, {2, 3, 4, 5, 6}, 3);
  CHECK(transfer_refine(five, 0).lambda == doctest::Approx(5).epsilon(1e-12));

  // one branch: lambda(s) = |D phi_3(x*)|^s with x* = 1/(3 + x*)
  const NonAutonomousIFS single = autonomous_system(Sign::kPlus, {3}, 12);
  const double x = (-3 + std::sqrt(13.0)) / 2;
  for (double s : {0.3, 0.8}) {
    CHECK(transfer_refine(single, s).lambda == doctest::Approx(std::pow(x * x, s)).epsilon(1e-9));
  }
  BowenOptions one;
  one.tolerance = 1e-3;
  one.depths = {10, 11, 12};
  const BowenBracket zero = bowen_bisect(single, one);
  CHECK(zero.s_minus == 0);
  CHECK(zero.s_plus <= 1e-3);

  CHECK_THROWS_AS(transfer_refine(assemble(kAlternating, {{2, 3}, {2, 3}}), 0.5), Error);
}

TEST_CASE("bit-stable sums across thread counts") {
  const NonAutonomousIFS sys = assemble(kAlternating, std::vector<std::vector<Digit>>(9, {2, 3, 5, 8}));
  EnumerationOptions one;
  const auto ref = enumerate_words(sys, 9, one).log_partition(0.6L, one.exec);
  for (unsigned t : {2u, 4u, 8u}) {
    EnumerationOptions o;
    o.exec.threads = t;
    CHECK(enumerate_words(sys, 9, o).log_partition(0.6L, o.exec) == ref);
  }
}

TEST_CASE("Bowen bracket on a scheme-built system") {
  const auto scheme = squares_scheme();
  const NonAutonomousIFS sys = assemble(SignSequence::constant(Sign::kPlus), scheme);
  BowenOptions opt;
  opt.mode = PartitionMode::kFactorized;
  opt.tolerance = 1e-3;
  const std::uint64_t end = sys.levels();
  opt.depths = {end - 2, end - 1, end};
  const BowenBracket b = bowen_bisect(sys, opt);
  CHECK(b.status == BowenStatus::kCertified);
  CHECK(b.s_minus >= 0.4 / 2.1 - 1e-3);
  CHECK(b.s_plus <= 1);
}
