#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "roadrel/error.hpp"
#include "roadrel/importance.hpp"
#include "roadrel/satisfaction.hpp"

using namespace roadrel;

namespace {

using Paths = std::vector<std::vector<std::size_t>>;

Paths to_index(const oracle::Sets& sets) {
  Paths out;
  for (const auto& s : sets) out.emplace_back(s.begin(), s.end());
  return out;
}

// Segments 4, 6, 10, 11 as components 0..3.
StructureFunction short_system() { return StructureFunction(4, Paths{{0, 1, 3}, {0, 2, 3}}); }
StructureFunction city() { return StructureFunction(12, to_index(oracle::city_paths())); }

}  // namespace

TEST_CASE("short system structural importances") {
  StructureFunction phi = short_system();
  const double birnbaum[] = {0.375, 0.125, 0.125, 0.375};
  const double bp[] = {0.4167, 0.0833, 0.0833, 0.4167};
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(birnbaum_structural(phi, ComponentId{i}) == doctest::Approx(birnbaum[i]).epsilon(1e-12));
    CHECK(std::abs(barlow_proschan(phi, ComponentId{i}) - bp[i]) < 1e-4);
  }
  CHECK(barlow_proschan_exact(phi, ComponentId{0}) == Rational(5, 12));
  CHECK(barlow_proschan_exact(phi, ComponentId{1}) == Rational(1, 12));
}

TEST_CASE("short system Birnbaum importance at hypothetical delays") {
  StructureFunction phi = short_system();
  WeibullPatience w;
  ReliabilityVector p({satisfaction_probability(w, 25), satisfaction_probability(w, 20),
                       satisfaction_probability(w, 5), satisfaction_probability(w, 16)});
  const double expected[] = {0.8513, 0.0025, 0.1249, 0.5551};
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(std::abs(birnbaum_reliability(phi, p, ComponentId{i}) - expected[i]) < 1e-3);
  }
  // Closed form for this structure: h = p4 p11 (1 - (1-p6)(1-p10)).
  double par = 1.0 - (1.0 - p[1]) * (1.0 - p[2]);
  CHECK(birnbaum_reliability(phi, p, ComponentId{0}) == doctest::Approx(p[3] * par).epsilon(1e-14));
  CHECK(birnbaum_reliability(phi, p, ComponentId{1}) ==
        doctest::Approx(p[0] * p[3] * (1.0 - p[2])).epsilon(1e-12));
}

TEST_CASE("city network Birnbaum structural importance in paper-naive mode") {
  const double expected[] = {0.0861, 0.0861, 0.0577, 0.1155, 0.0284, 0.0577,
                             0.0577, 0.0577, 0.0861, 0.0577, 0.1439, 0.2016};
  ImportanceReport rep = structural_report(city(), EvaluationMode::paper_naive);
  for (std::size_t i = 0; i < 12; ++i) CHECK(std::abs(rep.records[i].birnbaum - expected[i]) < 1e-4);
  CHECK(rep.ranking.front().index == 11);
  CHECK(rep.ranking.back().index == 4);
}

TEST_CASE("paper-naive Birnbaum is the derivative of the naive expression") {
  StructureFunction phi = city();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit(0.05, 0.95);
  std::vector<double> p(12);
  for (double& x : p) x = unit(rng);
  for (std::size_t i = 0; i < 12; ++i) {
    const double h = 1e-6;
    auto q = p;
    q[i] += h;
    double up = reliability_paper_naive(phi, ReliabilityVector(q));
    q[i] -= 2 * h;
    double down = reliability_paper_naive(phi, ReliabilityVector(q));
    CHECK(birnbaum_reliability(phi, ReliabilityVector(p), ComponentId{i}, EvaluationMode::paper_naive) ==
          doctest::Approx((up - down) / (2 * h)).epsilon(1e-7));
  }
}

TEST_CASE("exact Birnbaum matches brute force on random structures") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    int n = 1 + static_cast<int>(rng() % 7);
    auto paths = oracle::random_structure(rng, n);
    StructureFunction phi(static_cast<std::size_t>(n), to_index(paths));
    std::vector<double> p(static_cast<std::size_t>(n));
    for (double& x : p) x = unit(rng);
    for (int i = 0; i < n; ++i) {
      auto id = ComponentId{static_cast<std::size_t>(i)};
      CHECK(birnbaum_reliability(phi, ReliabilityVector(p), id) ==
            doctest::Approx(oracle::birnbaum(paths, p, i)).epsilon(1e-12));
      CHECK(birnbaum_structural(phi, id) == doctest::Approx(oracle::structural(paths, n, i)).epsilon(1e-12));
    }
  }
}

TEST_CASE("Birnbaum split parts add up") {
  StructureFunction phi = short_system();
  ReliabilityVector p({0.5559, 0.7363, 0.9947, 0.8526});
  for (std::size_t i = 0; i < 4; ++i) {
    auto s = birnbaum_split(phi, p, ComponentId{i});
    double b = birnbaum_reliability(phi, p, ComponentId{i});
    CHECK(s.functioning + s.failure == doctest::Approx(b).epsilon(1e-14));
    CHECK(s.failure == doctest::Approx(p[i] * b).epsilon(1e-14));
  }
}

TEST_CASE("Barlow-Proschan equals the failure-order oracle") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 60; ++trial) {
    int n = 1 + static_cast<int>(rng() % 7);
    auto paths = oracle::random_structure(rng, n);
    StructureFunction phi(static_cast<std::size_t>(n), to_index(paths));
    auto expected = oracle::barlow_proschan(paths, n);
    for (int i = 0; i < n; ++i) {
      auto id = ComponentId{static_cast<std::size_t>(i)};
      CHECK(barlow_proschan(phi, id) == doctest::Approx(expected[static_cast<std::size_t>(i)]).epsilon(1e-12));
      CHECK(barlow_proschan_exact(phi, id) == barlow_proschan_combinatorial_exact(phi, id));
    }
  }
}

TEST_CASE("Barlow-Proschan of series and parallel systems is uniform") {
  StructureFunction series(5, Paths{{0, 1, 2, 3, 4}});
  StructureFunction parallel(5, Paths{{0}, {1}, {2}, {3}, {4}});
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(barlow_proschan_exact(series, ComponentId{i}) == Rational(1, 5));
    CHECK(barlow_proschan_exact(parallel, ComponentId{i}) == Rational(1, 5));
  }
}

TEST_CASE("Birnbaum polynomial integrates to Barlow-Proschan") {
  StructureFunction phi = city();
  for (std::size_t i = 0; i < 12; ++i) {
    auto coeffs = birnbaum_polynomial(phi, ComponentId{i});
    Rational sum = 0;
    for (std::size_t k = 0; k < coeffs.size(); ++k) sum += coeffs[k] / Rational(k + 1);
    CHECK(sum == barlow_proschan_exact(phi, ComponentId{i}));
  }
}

TEST_CASE("lifetime Barlow-Proschan reduces to the structural value for uniform lifetimes") {
  StructureFunction phi = short_system();
  LifetimeSpec spec;
  for (int i = 0; i < 4; ++i) {
    spec.cdf.emplace_back([](double t) { return std::clamp(t, 0.0, 1.0); });
    spec.density.emplace_back([](double t) { return t >= 0.0 && t <= 1.0 ? 1.0 : 0.0; });
  }
  spec.t_max = 1.0;
  LifetimeImportance li = barlow_proschan_lifetime(phi, spec, 1.0);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(std::abs(li.ratio[i] - barlow_proschan(phi, ComponentId{i})) < 1e-6);
  }
  CHECK(li.denominator == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("lifetime Barlow-Proschan with exponential lifetimes on a series pair") {
  // Series of two exponentials: i causes failure with probability rate_i / (rate_1 + rate_2).
  StructureFunction phi(2, Paths{{0, 1}});
  const double r[] = {1.0, 3.0};
  LifetimeSpec spec;
  for (double rate : r) {
    spec.cdf.emplace_back([rate](double t) { return t <= 0 ? 0.0 : 1.0 - std::exp(-rate * t); });
    spec.density.emplace_back([rate](double t) { return t < 0 ? 0.0 : rate * std::exp(-rate * t); });
  }
  spec.t_max = 40.0;
  LifetimeImportance li = barlow_proschan_lifetime(phi, spec, 40.0);
  CHECK(li.ratio[0] == doctest::Approx(0.25).epsilon(1e-8));
  CHECK(li.ratio[1] == doctest::Approx(0.75).epsilon(1e-8));
}

TEST_CASE("ranking is descending with ties broken by id") {
  ImportanceReport rep = structural_report(short_system(), EvaluationMode::exact, Measure::birnbaum);
  REQUIRE(rep.ranking.size() == 4);
  CHECK(rep.ranking[0].index == 0);
  CHECK(rep.ranking[1].index == 3);
  CHECK(rep.ranking[2].index == 1);
  CHECK(rep.ranking[3].index == 2);
}

TEST_CASE("measure names parse") {
  CHECK(parse_measure("birnbaum") == Measure::birnbaum);
  CHECK(parse_measure("barlow-proschan") == Measure::barlow_proschan);
  CHECK(parse_measure("bp") == Measure::barlow_proschan);
  CHECK_THROWS_AS(parse_measure("fussell-vesely"), ValidationError);
}

TEST_CASE("property: Barlow-Proschan values sum to one and forms agree") {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 100; ++trial) {
    int n = 1 + static_cast<int>(rng() % 10);
    auto paths = oracle::random_structure(rng, n);
    StructureFunction phi(static_cast<std::size_t>(n), to_index(paths));
    Rational total = 0;
    for (int i = 0; i < n; ++i) {
      auto id = ComponentId{static_cast<std::size_t>(i)};
      Rational bp = barlow_proschan_exact(phi, id);
      REQUIRE(bp == barlow_proschan_combinatorial_exact(phi, id));
      REQUIRE(bp > 0);
      total += bp;
    }
    REQUIRE(total == 1);
  }
}

TEST_CASE("property: Birnbaum importance lies in [0,1] and series ordering follows reliability") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    int n = 1 + static_cast<int>(rng() % 8);
    auto paths = oracle::random_structure(rng, n);
    StructureFunction phi(static_cast<std::size_t>(n), to_index(paths));
    std::vector<double> p(static_cast<std::size_t>(n));
    for (double& x : p) x = unit(rng);
    for (int i = 0; i < n; ++i) {
      double b = birnbaum_reliability(phi, ReliabilityVector(p), ComponentId{static_cast<std::size_t>(i)});
      REQUIRE(b >= -1e-15);
      REQUIRE(b <= 1.0 + 1e-15);
    }
  }
  StructureFunction series(2, Paths{{0, 1}});
  StructureFunction parallel(2, Paths{{0}, {1}});
  for (double a = 0.05; a < 1.0; a += 0.1) {
    for (double b = 0.05; b < 1.0; b += 0.1) {
      ReliabilityVector p({a, b});
      double s0 = birnbaum_reliability(series, p, ComponentId{0});
      double s1 = birnbaum_reliability(series, p, ComponentId{1});
      double q0 = birnbaum_reliability(parallel, p, ComponentId{0});
      double q1 = birnbaum_reliability(parallel, p, ComponentId{1});
      if (a < b) {
        CHECK(s0 > s1);
        CHECK(q0 < q1);
      }
    }
  }
}
