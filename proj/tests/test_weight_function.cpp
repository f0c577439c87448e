#include <catch2/catch_amalgamated.hpp>

#include <carleman/weight_function.hpp>

#include <cmath>
#include <random>
#include <vector>

using namespace carleman;

namespace {

// Brute-force sup_{0 <= j <= J} (j log t - log M_j) in extended precision.
double brute_force_omega(const WeightSequence& M, double log_t) {
  long double best = -std::numeric_limits<long double>::infinity();
  for (std::size_t j = 0; j <= M.order(); ++j)
    best = std::max(best, (long double)(j)*log_t - (long double)M.log_M(j));
  return double(best);
}

}  // namespace

TEST_CASE("associated function: counting form basics") {
  auto fact = WeightSequence::factorial(64);
  SECTION("vanishes on (0, 1] and at t = 0") {
    CHECK(associated_omega(fact, 0.0).value == 0.0);
    CHECK(associated_omega(fact, 0.3).value == 0.0);
    CHECK(associated_omega(fact, 1.0).value == 0.0);
  }
  SECTION("factorial at t = e^2: maximizer j = 7") {
    auto v = associated_omega(fact, std::exp(2.0));
    CHECK_FALSE(v.saturated);
    CHECK(v.value == Catch::Approx(14.0 - std::log(5040.0)).epsilon(1e-12));
    CHECK(v.value == Catch::Approx(5.4748).margin(5e-4));
  }
  SECTION("below the first quotient the counting set is empty") {
    auto g2 = WeightSequence::gevrey(2.0, 64);
    CHECK(associated_omega(g2, 0.99).value == 0.0);
    CHECK(brute_force_omega(g2, std::log(0.99)) == 0.0);
  }
  SECTION("saturation flag at truncation") {
    CHECK_FALSE(associated_omega(fact, 63.5).saturated);
    CHECK(associated_omega(fact, 100.0).saturated);
  }
  SECTION("non-log-convex input is rejected") {
    auto bad = WeightSequence::custom({0.0, std::log(2.0), std::log(2.5)});
    CHECK_THROWS_AS(WeightFunction::associated(bad), std::invalid_argument);
  }
}

TEST_CASE("associated function equals brute force on unsaturated points") {
  const struct {
    FamilyDescriptor f;
    double log_t_max;
  } cases[] = {
      {{FamilyKind::factorial, 0.0}, std::log(400.0)},
      {{FamilyKind::gevrey, 2.0}, std::log(2e5)},
      {{FamilyKind::gevrey, 3.0}, std::log(1e8)},
      {{FamilyKind::qgevrey, 2.0}, 700.0},
      {{FamilyKind::log_log_row, 1.0}, std::log(900.0)},
      {{FamilyKind::log_log_row, 2.0}, std::log(1500.0)},
  };
  for (const auto& c : cases) {
    auto M = WeightSequence::from_family(c.f, 512);
    auto w = WeightFunction::associated(M);
    INFO(c.f.label());
    for (std::size_t i = 0; i < 256; ++i) {
      const double log_t = -1.0 + (c.log_t_max + 1.0) * double(i) / 255.0;
      auto v = w.eval_log(log_t);
      REQUIRE_FALSE(v.saturated);
      CHECK(v.value ==
            Catch::Approx(brute_force_omega(M, log_t)).margin(1e-12));
    }
  }
}

TEST_CASE("associated function is nondecreasing and convex in log t") {
  auto w = WeightFunction::associated(WeightSequence::gevrey(2.0, 256));
  double prev = -1.0, prev2 = -2.0;
  for (std::size_t i = 0; i <= 400; ++i) {
    const double u = -2.0 + 12.0 * double(i) / 400.0;
    const double val = w.eval_log(u).value;
    if (i >= 1) CHECK(val >= prev - 1e-12);
    if (i >= 2) CHECK(val - 2.0 * prev + prev2 >= -1e-9);
    prev2 = prev;
    prev = val;
  }
}

TEST_CASE("log-convex minorant round trip") {
  SECTION("j = 0 recovers 0") {
    auto r = lc_minorant_roundtrip(WeightSequence::factorial(64), 0);
    CHECK(r.value == Catch::Approx(0.0).margin(1e-9));
  }
  SECTION("gevrey(2) at j = 10 recovers log(10!^2)") {
    auto r = lc_minorant_roundtrip(WeightSequence::gevrey(2.0, 64), 10);
    const double expect = 2.0 * double(log_factorial(10));
    CHECK(expect == Catch::Approx(30.2088).margin(5e-4));
    CHECK(r.value == Catch::Approx(expect).margin(1e-6));
  }
  SECTION("loglogrow(1) at j = 20 recovers the stored value") {
    auto M = WeightSequence::log_log_row(1.0, 64);
    auto r = lc_minorant_roundtrip(M, 20);
    CHECK(r.value == Catch::Approx(M.log_M(20)).margin(1e-6));
  }
  SECTION("every family, scattered indices") {
    const FamilyDescriptor fams[] = {{FamilyKind::factorial, 0.0},
                                     {FamilyKind::gevrey, 2.0},
                                     {FamilyKind::qgevrey, 2.0},
                                     {FamilyKind::log_log_row, 2.0}};
    for (const auto& f : fams) {
      auto M = WeightSequence::from_family(f, 256);
      for (std::size_t j : {1, 7, 32, 100}) {
        INFO(f.label() << " j=" << j);
        CHECK(lc_minorant_roundtrip(M, j).value ==
              Catch::Approx(M.log_M(j)).margin(1e-6));
      }
    }
  }
}

TEST_CASE("upper Legendre conjugate of the linear power weight") {
  auto w = WeightFunction::power(1.0);
  SECTION("closed form x log x - x beyond x = 1") {
    for (double x : {1.0, std::exp(1.0), 5.0, 10.0, 100.0, 1000.0}) {
      const double expect = x >= 1.0 ? x * std::log(x) - x : -1.0;
      auto r = legendre_upper(w, x);
      CHECK(r.interior);
      CHECK(r.value == Catch::Approx(expect).margin(1e-8));
    }
    CHECK(legendre_upper(w, 10.0).value == Catch::Approx(13.0259).margin(1e-4));
  }
  SECTION("below x = 1 the boundary y = 0 wins with value -1") {
    for (double x : {0.0, 0.5, 0.99}) {
      auto r = legendre_upper(w, x);
      CHECK(r.value == Catch::Approx(-1.0).margin(1e-8));
    }
  }
  SECTION("normalized omega gives conjugate 0 at x = 0") {
    auto wm = WeightFunction::associated(WeightSequence::gevrey(2.0, 128));
    CHECK(legendre_upper(wm, 0.0).value == Catch::Approx(0.0).margin(1e-10));
  }
  SECTION("convex and nondecreasing in x") {
    std::vector<double> vals;
    for (std::size_t i = 0; i <= 64; ++i)
      vals.push_back(legendre_upper(w, 1.0 + double(i) * 0.5).value);
    for (std::size_t i = 1; i < vals.size(); ++i)
      CHECK(vals[i] >= vals[i - 1] - 1e-9);
    for (std::size_t i = 1; i + 1 < vals.size(); ++i)
      CHECK(vals[i + 1] - 2.0 * vals[i] + vals[i - 1] >= -1e-6);
  }
}

TEST_CASE("lower Legendre conjugate") {
  SECTION("power(1) at t = 4 gives 2 sqrt(4) = 4") {
    auto r = legendre_lower(WeightFunction::power(1.0), 4.0);
    CHECK(r.interior);
    CHECK(r.value == Catch::Approx(4.0).margin(1e-8));
  }
  SECTION("power(2) at t = 8 matches the radical closed form") {
    auto r = legendre_lower(WeightFunction::power(2.0), 8.0);
    const double expect =
        (std::pow(2.0, 1.0 / 3.0) + std::pow(2.0, -2.0 / 3.0)) *
        std::pow(8.0, 2.0 / 3.0);
    CHECK(expect == Catch::Approx(7.5595).margin(5e-4));
    CHECK(r.value == Catch::Approx(expect).epsilon(1e-8));
  }
  SECTION("closed form across alpha and six decades of t") {
    for (double alpha : {1.0, 2.0, 3.0}) {
      auto w = WeightFunction::power(alpha);
      for (std::size_t i = 0; i <= 48; ++i) {
        const double t = std::pow(10.0, 6.0 * double(i) / 48.0);
        auto r = legendre_lower(w, t);
        INFO("alpha=" << alpha << " t=" << t);
        CHECK(r.value ==
              Catch::Approx(power_lower_conjugate_oracle(alpha, t))
                  .epsilon(1e-8));
      }
    }
  }
  SECTION("constant tabulated input returns the constant") {
    auto flat = WeightFunction::tabulated({-5.0, 0.0, 5.0}, {3.0, 3.0, 3.0});
    for (double t : {0.0, 1.0, 100.0}) {
      auto r = legendre_lower(flat, t);
      CHECK(r.value == Catch::Approx(3.0).margin(1e-6));
    }
    // The infimum is approached as s -> 0: the reported minimizer sits
    // where the t * s penalty has vanished to double precision.
    CHECK(std::exp(-legendre_lower(flat, 1.0).arg) < 1e-12);
  }
  SECTION("concave and nondecreasing in t") {
    auto w = WeightFunction::power(2.0);
    std::vector<double> vals;
    for (std::size_t i = 0; i <= 64; ++i)
      vals.push_back(legendre_lower(w, 1.0 + 10.0 * double(i)).value);
    for (std::size_t i = 1; i < vals.size(); ++i)
      CHECK(vals[i] >= vals[i - 1] - 1e-9);
    for (std::size_t i = 1; i + 1 < vals.size(); ++i)
      CHECK(vals[i + 1] - 2.0 * vals[i] + vals[i - 1] <= 1e-6);
  }
}

TEST_CASE("function conditions on power weights") {
  auto p1 = WeightFunction::power(1.0);
  auto p2 = WeightFunction::power(2.0);
  FunctionGrid g{1.0, 1e6, 256, 1e6};

  CHECK(check_function_condition(p1, FunctionCondition::omega1, g).holds ==
        Verdict::holds);
  CHECK(check_function_condition(p1, FunctionCondition::omega2, g).holds ==
        Verdict::holds);
  CHECK(check_function_condition(p1, FunctionCondition::omega3, g).holds ==
        Verdict::holds);
  CHECK(check_function_condition(p1, FunctionCondition::omega4, g).holds ==
        Verdict::holds);
  // omega(t) = t is O(t) but not o(t).
  CHECK(check_function_condition(p1, FunctionCondition::omega5, g).holds ==
        Verdict::fails);
  // omega(t)/t^2 integrates to log T: divergent.
  CHECK(check_function_condition(p1, FunctionCondition::omegaQ, g).holds ==
        Verdict::holds);
  // int omega(yt)/t^2 dt inherits the same divergence.
  CHECK(check_function_condition(p1, FunctionCondition::omegasnq, g).holds ==
        Verdict::fails);
  // t^2 against C H t + C cannot be bounded.
  {
    FunctionGrid g7{1.0, 1e3, 256, 1e6};
    auto v = check_function_condition(p1, FunctionCondition::omega7, g7);
    CHECK(v.holds == Verdict::fails);
    CHECK(v.note.find("H searched") != std::string::npos);
  }
  // Mixed variant: 2t <= omega(2t) exactly, H = 2, C = 1.
  {
    FunctionGrid g7{1.0, 1e3, 256, 1e6};
    auto v = check_function_condition(p1, FunctionCondition::mixed_omega7, g7);
    CHECK(v.holds == Verdict::holds);
    REQUIRE(v.certificate.h.has_value());
    REQUIRE(v.certificate.C.has_value());
    CHECK(*v.certificate.h <= 2.0);
    CHECK(*v.certificate.C <= 1.0 + 1e-6);
  }

  CHECK(check_function_condition(p2, FunctionCondition::omega2, g).holds ==
        Verdict::fails);
  CHECK(check_function_condition(p2, FunctionCondition::omega4, g).holds ==
        Verdict::holds);
}

TEST_CASE("function conditions on associated functions") {
  // omega for Gevrey(2) behaves like 2 sqrt(t).
  auto g2 = WeightFunction::associated(WeightSequence::gevrey(2.0, 4096));
  FunctionGrid grid{1.0, 1e5, 256, 1e6};

  CHECK(check_function_condition(g2, FunctionCondition::omega1, grid).holds ==
        Verdict::holds);
  CHECK(check_function_condition(g2, FunctionCondition::omega3, grid).holds ==
        Verdict::holds);
  CHECK(check_function_condition(g2, FunctionCondition::omega4, grid).holds ==
        Verdict::holds);
  CHECK(check_function_condition(g2, FunctionCondition::omega5, grid).holds ==
        Verdict::holds);
  // Non-quasianalytic: the integral converges.  The cutoff must be deep
  // enough that the logarithmic correction to 2 sqrt(t) stops inflating
  // the full/half ratio past the divergence margin.
  {
    auto deep = WeightFunction::associated(WeightSequence::gevrey(2.0, 16384));
    FunctionGrid gq{1.0, 1e5, 256, 1e8};
    CHECK(check_function_condition(deep, FunctionCondition::omegaQ, gq).holds ==
          Verdict::fails);
  }
  // 4 sqrt(y) <= C 2 sqrt(y) + C: snq holds with C near 2.
  {
    FunctionGrid snq{1.0, 3e5, 256, 1e8};
    auto wide = WeightFunction::associated(WeightSequence::gevrey(2.0, 65536));
    auto v = check_function_condition(wide, FunctionCondition::omegasnq, snq);
    CHECK(v.holds == Verdict::holds);
    REQUIRE(v.certificate.C.has_value());
    CHECK(*v.certificate.C == Catch::Approx(2.0).margin(0.3));
  }

  // Quasianalytic example: omega for loglogrow(1).
  auto llr = WeightFunction::associated(WeightSequence::log_log_row(1.0, 4096));
  auto v = check_function_condition(llr, FunctionCondition::omegaQ,
                                    FunctionGrid{1.0, 1e6, 256, 1e6});
  CHECK(v.holds == Verdict::holds);
}

TEST_CASE("grid guards") {
  auto p1 = WeightFunction::power(1.0);
  CHECK_THROWS_AS(check_function_condition(p1, FunctionCondition::omega1,
                                           FunctionGrid{1.0, 0.5, 256, 1e6}),
                  std::invalid_argument);
  CHECK_THROWS_AS(check_function_condition(p1, FunctionCondition::omega7,
                                           FunctionGrid{1.0, 2.0, 256, 1e6}),
                  std::invalid_argument);
  CHECK_THROWS_AS(check_function_condition(p1, FunctionCondition::omegaQ,
                                           FunctionGrid{1.0, 2.0, 256, 2.0}),
                  std::invalid_argument);
}
