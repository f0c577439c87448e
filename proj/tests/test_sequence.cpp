#include <catch2/catch_amalgamated.hpp>

#include <carleman/sequence.hpp>

#include <cmath>
#include <vector>

using namespace carleman;

namespace {

// Direct linear-domain oracle for small indices, independent of the
// prefix-sum construction.
double oracle_log_M(const FamilyDescriptor& f, std::size_t j) {
  long double M = 1.0L;
  for (std::size_t i = 1; i <= j; ++i) {
    switch (f.kind) {
      case FamilyKind::factorial: M *= i; break;
      case FamilyKind::gevrey: M *= std::pow((long double)i, (long double)f.param); break;
      case FamilyKind::qgevrey:
        M *= i * std::pow((long double)f.param, 2.0L * i - 1.0L);
        break;
      case FamilyKind::log_log_row:
        M *= i <= log_log_start
                 ? 1.0L
                 : i * std::pow(std::log(std::log((long double)i)),
                                (long double)f.param);
        break;
      default: break;
    }
  }
  return double(std::log(M));
}

}  // namespace

TEST_CASE("family construction matches direct products") {
  SECTION("factorial J=4") {
    auto W = WeightSequence::factorial(4);
    const double expect[] = {0.0, 0.0, std::log(2.0), std::log(6.0),
                             std::log(24.0)};
    for (std::size_t j = 0; j <= 4; ++j)
      CHECK(W.log_M(j) == Catch::Approx(expect[j]).margin(1e-14));
  }
  SECTION("gevrey(2) J=3 gives M = 1,1,4,36") {
    auto W = WeightSequence::gevrey(2.0, 3);
    CHECK(W.log_M(2) == Catch::Approx(std::log(4.0)).margin(1e-14));
    CHECK(W.log_M(3) == Catch::Approx(std::log(36.0)).margin(1e-14));
  }
  SECTION("loglogrow(1) J=17 quotient shape") {
    auto W = WeightSequence::log_log_row(1.0, 17);
    for (std::size_t j = 1; j <= 15; ++j) CHECK(W.log_mu(j) == 0.0);
    CHECK(W.log_mu(16) ==
          Catch::Approx(std::log(16.0 * std::log(std::log(16.0)))).margin(1e-14));
    CHECK(W.log_mu(17) ==
          Catch::Approx(std::log(17.0 * std::log(std::log(17.0)))).margin(1e-14));
  }
  SECTION("all families agree with the linear-domain oracle at small j") {
    const FamilyDescriptor fams[] = {{FamilyKind::factorial, 0.0},
                                     {FamilyKind::gevrey, 2.0},
                                     {FamilyKind::gevrey, 3.0},
                                     {FamilyKind::qgevrey, 2.0},
                                     {FamilyKind::log_log_row, 1.0},
                                     {FamilyKind::log_log_row, 2.0}};
    for (const auto& f : fams) {
      auto W = WeightSequence::from_family(f, 24);
      for (std::size_t j = 0; j <= 24; ++j)
        CHECK(W.log_M(j) ==
              Catch::Approx(oracle_log_M(f, j)).margin(1e-10).epsilon(1e-12));
    }
  }
}

TEST_CASE("parameter domain errors") {
  CHECK_THROWS_AS(WeightSequence::gevrey(0.9, 16), std::invalid_argument);
  CHECK_THROWS_AS(WeightSequence::qgevrey(1.0, 16), std::invalid_argument);
  CHECK_THROWS_AS(WeightSequence::log_log_row(0.0, 16), std::invalid_argument);
  CHECK_THROWS_AS(WeightSequence::log_log_row(-1.0, 16), std::invalid_argument);
  CHECK_THROWS_AS(WeightSequence::factorial(1), std::invalid_argument);
  CHECK_THROWS_AS(WeightSequence::custom({0.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(
      WeightSequence::custom({0.0, std::nan(""), 1.0}), std::invalid_argument);
}

TEST_CASE("validation of the standard families") {
  for (auto J : {std::size_t(512)}) {
    for (const auto& f :
         std::vector<FamilyDescriptor>{{FamilyKind::factorial, 0.0},
                                       {FamilyKind::gevrey, 2.0},
                                       {FamilyKind::qgevrey, 2.0},
                                       {FamilyKind::log_log_row, 1.0}}) {
      auto rep = validate_weight_sequence(WeightSequence::from_family(f, J));
      INFO(f.label());
      CHECK(rep.start_normalized);
      CHECK(rep.log_convex);
      CHECK(rep.root_growth == Verdict::holds);
    }
  }
}

TEST_CASE("validation flags defects") {
  SECTION("non-log-convex custom sequence") {
    // M = (1, 2, 2.5): mu_1 = 2 > mu_2 = 1.25.
    auto W = WeightSequence::custom({0.0, std::log(2.0), std::log(2.5)});
    auto rep = validate_weight_sequence(W);
    CHECK(rep.start_normalized);
    CHECK_FALSE(rep.log_convex);
    CHECK(rep.first_violation == 2);
  }
  SECTION("constant sequence violates root growth") {
    std::vector<double> logs(513, 0.0);  // M_j = 1: m_j = 1/j! -> 0 fast
    auto rep = validate_weight_sequence(WeightSequence::custom(logs));
    CHECK(rep.start_normalized);
    CHECK(rep.log_convex);
    CHECK(rep.root_growth == Verdict::fails);
  }
  SECTION("non-normalized start") {
    std::vector<double> logs(64, 0.0);
    logs[0] = -1.0;
    auto rep = validate_weight_sequence(WeightSequence::custom(logs));
    CHECK_FALSE(rep.start_normalized);
  }
}

TEST_CASE("factorial sequence has m identically one") {
  auto W = WeightSequence::factorial(128);
  for (std::size_t j = 0; j <= 128; ++j)
    CHECK(W.log_m(j) == Catch::Approx(0.0).margin(1e-10));
}

TEST_CASE("log-convexity implies superadditivity and monotone root means") {
  for (const auto& f : std::vector<FamilyDescriptor>{
           {FamilyKind::factorial, 0.0},
           {FamilyKind::gevrey, 2.0},
           {FamilyKind::qgevrey, 2.0},
           {FamilyKind::log_log_row, 1.0}}) {
    auto W = WeightSequence::from_family(f, 256);
    INFO(f.label());
    CHECK(superadditivity_defect(W) <= 1e-9);
    for (std::size_t j = 1; j < 256; ++j)
      CHECK(W.log_M(j) / double(j) <= W.log_M(j + 1) / double(j + 1) + 1e-12);
  }
}

TEST_CASE("sequence comparison") {
  auto fact = WeightSequence::factorial(512);
  auto g2 = WeightSequence::gevrey(2.0, 512);

  SECTION("factorial strictly below gevrey(2)") {
    auto rep = compare_sequences(fact, g2);
    CHECK(rep.m_precedes_n == Verdict::holds);
    CHECK(rep.m_strictly_n == Verdict::holds);
    // Antisymmetry: the reverse domination fails.
    CHECK(rep.n_precedes_m == Verdict::fails);
    CHECK(rep.equivalent == Verdict::fails);
  }
  SECTION("reflexivity") {
    auto rep = compare_sequences(g2, g2);
    CHECK(rep.equivalent == Verdict::holds);
    CHECK(rep.m_strictly_n == Verdict::fails);  // r = 0 does not sink
  }
  SECTION("scaling M_j -> C h^j M_j preserves equivalence") {
    std::vector<double> scaled(513);
    for (std::size_t j = 0; j <= 512; ++j)
      scaled[j] = g2.log_M(j) + std::log(5.0) + double(j) * std::log(3.0);
    auto N = WeightSequence::custom(scaled);
    auto rep = compare_sequences(g2, N);
    CHECK(rep.equivalent == Verdict::holds);
    CHECK(rep.m_strictly_n == Verdict::fails);
  }
  SECTION("short truncation is inconclusive") {
    auto a = WeightSequence::factorial(6);
    auto b = WeightSequence::gevrey(2.0, 6);
    auto rep = compare_sequences(a, b);
    CHECK(rep.m_precedes_n == Verdict::inconclusive);
    CHECK(rep.equivalent == Verdict::inconclusive);
  }
}

TEST_CASE("moderate growth condition") {
  SECTION("factorial holds with C <= 2") {
    auto v = check_sequence_condition(WeightSequence::factorial(512),
                                      SequenceCondition::mg);
    CHECK(v.holds == Verdict::holds);
    REQUIRE(v.certificate.C.has_value());
    CHECK(*v.certificate.C <= 2.0 + 1e-9);
    CHECK(v.certificate.rechecked);
  }
  SECTION("gevrey(s) holds with C <= 2^s") {
    for (double s : {2.0, 3.0}) {
      auto v = check_sequence_condition(WeightSequence::gevrey(s, 512),
                                        SequenceCondition::mg);
      CHECK(v.holds == Verdict::holds);
      REQUIRE(v.certificate.C.has_value());
      CHECK(*v.certificate.C <= std::pow(2.0, s) + 1e-9);
    }
  }
  SECTION("qgevrey(2) fails: central defect grows linearly") {
    auto v = check_sequence_condition(WeightSequence::qgevrey(2.0, 512),
                                      SequenceCondition::mg);
    CHECK(v.holds == Verdict::fails);
    // d_n ~ (n/2) log 2 at the central split.
    const double d_510 = v.evidence[508];
    CHECK(d_510 == Catch::Approx(255.0 * std::log(2.0)).epsilon(0.02));
  }
  SECTION("loglogrow(1) holds") {
    auto v = check_sequence_condition(WeightSequence::log_log_row(1.0, 512),
                                      SequenceCondition::mg);
    CHECK(v.holds == Verdict::holds);
    CHECK(v.certificate.rechecked);
  }
}

TEST_CASE("pointwise square condition") {
  SECTION("factorial: m == 1 gives C = h = 1") {
    auto v = check_sequence_condition(WeightSequence::factorial(512),
                                      SequenceCondition::pointwise_square);
    CHECK(v.holds == Verdict::holds);
    REQUIRE(v.certificate.C.has_value());
    REQUIRE(v.certificate.h.has_value());
    CHECK(*v.certificate.C == Catch::Approx(1.0).margin(1e-9));
    CHECK(*v.certificate.h == Catch::Approx(1.0).margin(1e-9));
    CHECK(v.certificate.rechecked);
  }
  SECTION("gevrey(2): (m_j)^{1/j} = (j!)^{1/j} unbounded") {
    auto v = check_sequence_condition(WeightSequence::gevrey(2.0, 512),
                                      SequenceCondition::pointwise_square);
    CHECK(v.holds == Verdict::fails);
  }
  SECTION("qgevrey(2): (m_j)^{1/j} = 2^j unbounded") {
    auto v = check_sequence_condition(WeightSequence::qgevrey(2.0, 512),
                                      SequenceCondition::pointwise_square);
    CHECK(v.holds == Verdict::fails);
    // Defect is exactly j log 2.
    CHECK(v.evidence[99] == Catch::Approx(100.0 * std::log(2.0)).epsilon(1e-10));
  }
}

TEST_CASE("mixed square condition") {
  SECTION("qgevrey(2) with C=2 is exact: defect identically zero") {
    auto v = check_sequence_condition(WeightSequence::qgevrey(2.0, 512),
                                      SequenceCondition::mixed, {.C = 2});
    CHECK(v.holds == Verdict::holds);
    REQUIRE(v.certificate.h.has_value());
    REQUIRE(v.certificate.D.has_value());
    CHECK(*v.certificate.h == Catch::Approx(1.0).margin(1e-9));
    CHECK(*v.certificate.D == 1.0);
    CHECK(v.certificate.rechecked);
    for (double d : v.evidence) CHECK(std::abs(d) <= 1e-9);
  }
  SECTION("gevrey(2) with C=2 fails along the documented asymptote") {
    auto v = check_sequence_condition(WeightSequence::gevrey(2.0, 512),
                                      SequenceCondition::mixed, {.C = 2});
    CHECK(v.holds == Verdict::fails);
    // d_j = (4 log j! - log (2j)!)/j ~ 2 log j - 2 - 2 log 2.
    for (std::size_t j : {std::size_t(128), std::size_t(256)}) {
      const double asymptote = 2.0 * std::log(double(j)) - 2.0 - 2.0 * std::log(2.0);
      CHECK(v.evidence[j - 1] == Catch::Approx(asymptote).margin(0.1));
    }
  }
  SECTION("mixed(1) coincides with pointwise-square evidence") {
    auto W = WeightSequence::gevrey(2.0, 256);
    auto a = check_sequence_condition(W, SequenceCondition::mixed, {.C = 1});
    auto b = check_sequence_condition(W, SequenceCondition::pointwise_square);
    REQUIRE(a.evidence.size() == b.evidence.size());
    for (std::size_t i = 0; i < a.evidence.size(); ++i)
      CHECK(a.evidence[i] == b.evidence[i]);
  }
  SECTION("evidence range guard") {
    CHECK_THROWS_AS(
        check_sequence_condition(WeightSequence::gevrey(2.0, 32),
                                 SequenceCondition::mixed, {.C = 4}),
        std::invalid_argument);
  }
}

TEST_CASE("root-square condition and domination bound") {
  SECTION("qgevrey(2) with C=2, C1=1") {
    auto v = check_sequence_condition(WeightSequence::qgevrey(2.0, 512),
                                      SequenceCondition::root_square,
                                      {.C = 2, .C1 = 1.0});
    CHECK(v.holds == Verdict::holds);
    CHECK(v.certificate.rechecked);

    auto stat = [&](const char* k) {
      for (auto& [name, val] : v.stats)
        if (name == k) return val;
      FAIL("missing stat");
      return 0.0;
    };
    CHECK(stat("root_growth_unbounded") == 1.0);
    CHECK(stat("q") == 2.0);
    // q C C1 / (M_q)^{1/q} = 4/sqrt(32)
    CHECK(stat("contraction_ratio") ==
          Catch::Approx(4.0 / std::sqrt(32.0)).epsilon(1e-12));
    CHECK(stat("geometric_bound") == Catch::Approx(1.5235).margin(5e-4));
    CHECK(stat("tail_sum") == Catch::Approx(0.295).margin(5e-3));
    CHECK(stat("geometric_bound") >= stat("tail_sum"));
    CHECK(v.note.find("dominates") != std::string::npos);
  }
  SECTION("factorial: inequality holds but the hypothesis is absent") {
    auto v = check_sequence_condition(WeightSequence::factorial(512),
                                      SequenceCondition::root_square,
                                      {.C = 2, .C1 = 1.0});
    CHECK(v.holds == Verdict::holds);
    // Defect tends to -1 - log 2 (O(log j / j) correction remains).
    CHECK(v.evidence[199] ==
          Catch::Approx(-1.0 - std::log(2.0)).margin(0.05));
    auto stat = [&](const char* k) {
      for (auto& [name, val] : v.stats)
        if (name == k) return val;
      return -1.0;
    };
    CHECK(stat("root_growth_unbounded") == 0.0);
    CHECK(stat("q") == -1.0);  // never located
    CHECK(v.note.find("not in evidence") != std::string::npos);
  }
  SECTION("violation is detected") {
    // Gevrey(2): 2 logM_j/j - log j - logM_{2j}/(2j) ~ log j - 2 grows.
    auto v = check_sequence_condition(WeightSequence::gevrey(2.0, 512),
                                      SequenceCondition::root_square,
                                      {.C = 2, .C1 = 1.0});
    CHECK(v.holds == Verdict::fails);
  }
}

TEST_CASE("quasianalyticity verdicts per family") {
  auto nq = [](const WeightSequence& W) {
    return check_sequence_condition(W, SequenceCondition::nq).holds;
  };
  // Non-quasianalytic: sum M_{j-1}/M_j converges.
  CHECK(nq(WeightSequence::gevrey(2.0, 512)) == Verdict::holds);
  CHECK(nq(WeightSequence::gevrey(3.0, 512)) == Verdict::holds);
  CHECK(nq(WeightSequence::qgevrey(2.0, 512)) == Verdict::holds);
  // Quasianalytic: the sum keeps growing.
  CHECK(nq(WeightSequence::factorial(512)) == Verdict::fails);
  CHECK(nq(WeightSequence::log_log_row(1.0, 512)) == Verdict::fails);
  CHECK(nq(WeightSequence::log_log_row(2.0, 512)) == Verdict::fails);
}

TEST_CASE("loglogrow square identity across lambda doubling") {
  // 2 log m^(l)_j - log m^(2l)_j == -log(min(j, 15)!) for every j.
  for (double lambda : {0.5, 1.0, 2.0}) {
    auto a = WeightSequence::log_log_row(lambda, 512);
    auto b = WeightSequence::log_log_row(2.0 * lambda, 512);
    for (std::size_t j = 1; j <= 512; ++j) {
      const double expect =
          -double(log_factorial(std::min<std::size_t>(j, 15)));
      CHECK(2.0 * a.log_m(j) - b.log_m(j) ==
            Catch::Approx(expect).margin(1e-9));
    }
  }
}
