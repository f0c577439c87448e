#include <catch2/catch_amalgamated.hpp>

#include <carleman/scaled.hpp>

#include <cmath>
#include <random>
#include <vector>

using namespace carleman;

TEST_CASE("log_add matches direct computation in the safe range") {
  CHECK(log_add(0.0, 0.0) == Catch::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(log_add(std::log(3.0), std::log(5.0)) ==
        Catch::Approx(std::log(8.0)).epsilon(1e-15));
  CHECK(log_add(neg_infinity, 1.5) == 1.5);
  CHECK(log_add(1.5, neg_infinity) == 1.5);
  CHECK(log_add(neg_infinity, neg_infinity) == neg_infinity);
  // Far-apart magnitudes: absorbed without overflow.
  CHECK(log_add(0.0, -1000.0) == Catch::Approx(0.0).margin(1e-300));
  CHECK(log_add(5000.0, 2.0) == 5000.0);
}

TEST_CASE("log_sum_exp is exact on scaled geometric data") {
  // sum_{k=0}^{63} 2^k = 2^64 - 1, all values shifted by a huge anchor.
  std::vector<double> logs(64);
  const double shift = 6000.0;
  for (int k = 0; k < 64; ++k) logs[k] = k * std::log(2.0) + shift;
  const double expect = std::log(std::pow(2.0, 64.0) - 1.0) + shift;
  CHECK(log_sum_exp(logs) == Catch::Approx(expect).epsilon(1e-14));
  CHECK(log_sum_exp(std::vector<double>{}) == neg_infinity);
}

TEST_CASE("log_factorial agrees with iterated products") {
  long double acc = 0.0L;
  for (std::uint64_t j = 1; j <= 300; ++j) {
    acc += std::log(static_cast<long double>(j));
    CHECK(log_factorial(j) == Catch::Approx(static_cast<double>(acc)).epsilon(1e-14));
  }
  CHECK(log_factorial(0) == 0.0);
}

TEST_CASE("prefix sums accumulate in extended precision") {
  std::vector<double> xs(10000, 0.1);
  auto ps = prefix_sums(xs);
  REQUIRE(ps.size() == xs.size() + 1);
  CHECK(ps[0] == 0.0);
  CHECK(ps[10000] == Catch::Approx(1000.0).epsilon(1e-13));
}

TEST_CASE("coefficients multiply by adding log-magnitudes") {
  auto a = Coefficient::from_value({3.0, 4.0});   // |.| = 5
  auto b = Coefficient::from_value({0.0, 2.0});   // |.| = 2
  auto c = a * b;
  CHECK(c.log_mag == Catch::Approx(std::log(10.0)).epsilon(1e-14));
  auto v = c.value();
  CHECK(v.real() == Catch::Approx(-8.0).epsilon(1e-13));
  CHECK(v.imag() == Catch::Approx(6.0).epsilon(1e-13));

  CHECK((a * Coefficient::zero()).is_zero());
  CHECK(Coefficient::zero().is_zero());
}

TEST_CASE("scaled coefficients survive magnitudes beyond double range") {
  // (e^800) * (e^-1750) * (e^1000) = e^50: each factor alone overflows
  // or underflows a double.
  auto a = Coefficient::from_log(800.0);
  auto b = Coefficient::from_log(-1750.0, {0.0, 1.0});
  auto c = Coefficient::from_log(1000.0, {-1.0, 0.0});
  auto p = a * b * c;
  CHECK(p.log_mag == Catch::Approx(50.0).epsilon(1e-14));
  auto v = p.value();
  CHECK(v.real() == Catch::Approx(0.0).margin(1e-8));
  CHECK(v.imag() == Catch::Approx(-std::exp(50.0)).epsilon(1e-12));
}

TEST_CASE("sum_coefficients: positive-real fast path is cancellation-free") {
  // Harmonic-style sum with a large anchor.
  std::vector<Coefficient> terms;
  long double direct = 0.0L;
  for (int k = 1; k <= 500; ++k) {
    terms.push_back(Coefficient::from_log(900.0 - std::log(double(k))));
    direct += std::exp(-std::log((long double)k));
  }
  auto s = sum_coefficients(terms);
  CHECK(s.phase.real() == 1.0);
  CHECK(s.phase.imag() == 0.0);
  CHECK(s.log_mag ==
        Catch::Approx(900.0 + double(std::log(direct))).epsilon(1e-14));
}

TEST_CASE("sum_coefficients snaps full cancellation to exact zero") {
  auto s = sum_coefficients({Coefficient::from_real(1.0),
                             Coefficient::from_real(-1.0)});
  CHECK(s.is_zero());

  // Partial cancellation above the snap threshold is preserved.
  auto t = sum_coefficients({Coefficient::from_real(1.0),
                             Coefficient::from_real(-1.0 + 1e-6)});
  CHECK_FALSE(t.is_zero());
  CHECK(t.log_mag == Catch::Approx(std::log(1e-6)).epsilon(1e-9));
}

TEST_CASE("sum_coefficients matches direct complex arithmetic on random data") {
  std::mt19937 gen(20240817);
  std::uniform_real_distribution<double> mag(-3.0, 3.0), ang(0.0, 6.28);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Coefficient> terms;
    std::complex<double> direct{0.0, 0.0};
    for (int k = 0; k < 40; ++k) {
      std::complex<double> z = std::polar(std::exp(mag(gen)), ang(gen));
      terms.push_back(Coefficient::from_value(z));
      direct += z;
    }
    auto s = sum_coefficients(terms);
    auto v = s.value();
    CHECK(std::abs(v - direct) <= 1e-12 * std::abs(direct) + 1e-14);
  }
}
