#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "roadrel/error.hpp"
#include "roadrel/structure.hpp"

using namespace roadrel;

namespace {

std::vector<std::vector<std::size_t>> to_index(const oracle::Sets& sets) {
  std::vector<std::vector<std::size_t>> out;
  for (const auto& s : sets) out.emplace_back(s.begin(), s.end());
  return out;
}

StructureFunction city() { return StructureFunction(12, to_index(oracle::city_paths())); }

ComponentMask mask_of(std::initializer_list<int> one_based) {
  ComponentMask m = 0;
  for (int i : one_based) m |= bit(static_cast<std::size_t>(i - 1));
  return m;
}

}  // namespace

TEST_CASE("series and parallel structures evaluate as expected") {
  StructureFunction series(3, std::vector<std::vector<std::size_t>>{{0, 1, 2}});
  StructureFunction parallel(3, std::vector<std::vector<std::size_t>>{{0}, {1}, {2}});
  CHECK(evaluate(series, 0b111));
  CHECK_FALSE(evaluate(series, 0b011));
  CHECK(evaluate(parallel, 0b100));
  CHECK_FALSE(evaluate(parallel, 0));
  CHECK(minimal_cuts(series).size() == 3);
  CHECK(minimal_cuts(parallel) == std::vector<ComponentMask>{0b111});
}

TEST_CASE("city network: x_12 failed stops the system") {
  StructureFunction phi = city();
  CHECK_FALSE(evaluate(phi, StateVector::all_ones(12).with(ComponentId{11}, false)));
  CHECK(evaluate(phi, StateVector::all_ones(12)));
  CHECK_FALSE(evaluate(phi, StateVector::all_zeros(12)));
}

TEST_CASE("dominated and duplicate paths are dropped with a note") {
  StructureFunction phi(4, std::vector<std::vector<std::size_t>>{{0, 1}, {0, 1, 2}, {1, 0}, {3}});
  CHECK(phi.min_paths().size() == 2);
  CHECK(phi.canonicalization_notes().size() == 2);
  for (ComponentMask x = 0; x < 16; ++x) CHECK(evaluate(phi, x) == (((x & 3) == 3) || (x & 8)));
}

TEST_CASE("invalid structures are rejected") {
  CHECK_THROWS_AS(StructureFunction(3, std::vector<std::vector<std::size_t>>{{0, 5}}), ValidationError);
  CHECK_THROWS_AS(StructureFunction(3, std::vector<std::vector<std::size_t>>{}), ValidationError);
  CHECK_THROWS_AS(StructureFunction(65, std::vector<ComponentMask>{1}), ValidationError);
  CHECK_THROWS_AS(StructureFunction(3, std::vector<ComponentMask>{0}), ValidationError);
  CHECK_THROWS_AS(ReliabilityVector({0.5, 1.5}), ValidationError);
}

TEST_CASE("city network minimal cuts match subset search") {
  StructureFunction phi = city();
  auto cuts = minimal_cuts(phi);
  auto expected = oracle::cuts(oracle::city_paths(), 12);
  std::sort(cuts.begin(), cuts.end());
  CHECK(cuts == expected);
  CHECK(cuts.size() == 27);
}

TEST_CASE("the published 20-set cut table is a strict subset of the true cuts") {
  const std::vector<ComponentMask> table = {
      mask_of({1, 4}),     mask_of({2, 4}),     mask_of({1, 6, 7}),  mask_of({2, 6, 7}),     mask_of({4, 5, 3}),
      mask_of({4, 5, 8}),  mask_of({1, 6, 10}), mask_of({2, 6, 10}), mask_of({3, 5, 6, 7}),  mask_of({3, 9, 7}),
      mask_of({3, 9, 10}), mask_of({8, 9, 7}),  mask_of({8, 9, 10}), mask_of({3, 4, 9}),     mask_of({4, 8, 9}),
      mask_of({3, 11}),    mask_of({8, 11}),    mask_of({1, 11}),    mask_of({2, 11}),       mask_of({12})};
  auto cuts = minimal_cuts(city());
  for (ComponentMask c : table) CHECK(std::find(cuts.begin(), cuts.end(), c) != cuts.end());
  const std::vector<ComponentMask> missing = {mask_of({1, 7, 9}),     mask_of({1, 9, 10}),    mask_of({2, 7, 9}),
                                              mask_of({2, 9, 10}),    mask_of({3, 5, 6, 10}), mask_of({5, 6, 7, 8}),
                                              mask_of({5, 6, 8, 10})};
  for (ComponentMask c : missing) {
    CHECK(std::find(table.begin(), table.end(), c) == table.end());
    CHECK(std::find(cuts.begin(), cuts.end(), c) != cuts.end());
    // Failing the set stops the system; restoring any member restarts it.
    ComponentMask all = (ComponentMask{1} << 12) - 1;
    CHECK_FALSE(evaluate(city(), all & ~c));
    for (std::size_t i = 0; i < 12; ++i) {
      if (c & bit(i)) CHECK(evaluate(city(), (all & ~c) | bit(i)));
    }
  }
}

TEST_CASE("reliability: enumeration, inclusion-exclusion and brute force agree") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    int n = 1 + static_cast<int>(rng() % 8);
    auto paths = oracle::random_structure(rng, n);
    StructureFunction phi(static_cast<std::size_t>(n), to_index(paths));
    std::vector<double> p(static_cast<std::size_t>(n));
    for (double& x : p) x = unit(rng);
    double expected = oracle::reliability(paths, p);
    CHECK(reliability_enumeration(phi, ReliabilityVector(p)) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(reliability_inclusion_exclusion(phi, ReliabilityVector(p)) == doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("path-union expansion of two overlapping paths") {
  StructureFunction phi(3, std::vector<std::vector<std::size_t>>{{0, 1}, {1, 2}});
  auto terms = path_union_expansion(phi);
  std::int64_t at_union = 0, total = 0;
  for (const auto& t : terms) {
    if (t.components == 0b111) at_union = t.coefficient;
    total += t.coefficient;
  }
  CHECK(at_union == -1);
  CHECK(total == 1);  // h(1) = 1
}

TEST_CASE("paper-naive reliability is the product-over-paths expression") {
  StructureFunction phi(3, std::vector<std::vector<std::size_t>>{{0, 1}, {1, 2}});
  ReliabilityVector p({0.9, 0.8, 0.7});
  double naive = 1.0 - (1.0 - 0.9 * 0.8) * (1.0 - 0.8 * 0.7);
  CHECK(reliability_paper_naive(phi, p) == doctest::Approx(naive).epsilon(1e-15));
  CHECK(reliability(phi, p, EvaluationMode::exact) == doctest::Approx(0.8 * (1 - 0.1 * 0.3)).epsilon(1e-15));
  // Disjoint paths: both modes coincide.
  StructureFunction disjoint(4, std::vector<std::vector<std::size_t>>{{0, 1}, {2, 3}});
  ReliabilityVector q({0.3, 0.6, 0.2, 0.9});
  CHECK(reliability_paper_naive(disjoint, q) == doctest::Approx(reliability_exact(disjoint, q)).epsilon(1e-14));
}

TEST_CASE("enumeration cap is enforced and Monte Carlo stays close") {
  std::vector<std::vector<std::size_t>> paths;
  for (std::size_t i = 0; i < 22; i += 2) paths.push_back({i, i + 1});
  StructureFunction big(22, paths);
  ReliabilityVector p = ReliabilityVector::uniform(22, 0.3);
  CHECK_THROWS_AS(reliability_exact(big, p), CapExceeded);
  CHECK_NOTHROW(reliability_exact(big, p, 22));
  double exact = 1.0 - std::pow(1.0 - 0.09, 11);
  double mc = reliability_monte_carlo(big, p, 200000, 3);
  CHECK(std::abs(mc - exact) < 5.0 * std::sqrt(exact * (1 - exact) / 200000));
  CHECK(reliability_monte_carlo(big, p, 1000, 9) == reliability_monte_carlo(big, p, 1000, 9));
}

TEST_CASE("mode names parse in both spellings") {
  CHECK(parse_evaluation_mode("paper-naive") == EvaluationMode::paper_naive);
  CHECK(parse_evaluation_mode("paper_naive") == EvaluationMode::paper_naive);
  CHECK(parse_evaluation_mode("exact") == EvaluationMode::exact);
  CHECK_THROWS_AS(parse_evaluation_mode("fast"), ValidationError);
}

TEST_CASE("format_mask uses labels when given") {
  std::vector<int> labels = {4, 6, 10, 11};
  CHECK(format_mask(0b1001, labels) == "{4,11}");
  CHECK(format_mask(0b0110) == "{1,2}");
}

TEST_CASE("property: phi is monotone and paths and cuts describe the same function") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    int n = 1 + static_cast<int>(rng() % 8);
    auto paths = oracle::random_structure(rng, n);
    StructureFunction phi(static_cast<std::size_t>(n), to_index(paths));
    auto cuts = minimal_cuts(phi);
    const ComponentMask all = (ComponentMask{1} << n) - 1;
    for (ComponentMask x = 0; x <= all; ++x) {
      bool v = evaluate(phi, x);
      REQUIRE(v == oracle::phi(paths, x));
      REQUIRE(v == evaluate_by_cuts(cuts, x));
      for (int i = 0; i < n; ++i) {
        if (!(x & bit(static_cast<std::size_t>(i)))) REQUIRE((!v || evaluate(phi, x | bit(static_cast<std::size_t>(i)))));
      }
    }
    // Cuts of the dual structure are the original paths.
    StructureFunction dual(static_cast<std::size_t>(n), cuts);
    auto back = minimal_cuts(dual);
    std::vector<ComponentMask> original(phi.min_paths().begin(), phi.min_paths().end());
    std::sort(back.begin(), back.end());
    std::sort(original.begin(), original.end());
    REQUIRE(back == original);
  }
}
