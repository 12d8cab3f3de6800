#include <doctest.h>

#include "oracles.hpp"
#include "roadrel/error.hpp"
#include "roadrel/quadrature.hpp"
#include "roadrel/satisfaction.hpp"

using namespace roadrel;

TEST_CASE("satisfaction probability at the tabulated delays") {
  WeibullPatience w;
  CHECK(std::abs(satisfaction_probability(w, 25) - 0.5559) < 5e-4);
  CHECK(std::abs(satisfaction_probability(w, 20) - 0.7363) < 5e-4);
  CHECK(std::abs(satisfaction_probability(w, 5) - 0.9947) < 5e-4);
  CHECK(std::abs(satisfaction_probability(w, 16) - 0.8526) < 5e-4);
}

TEST_CASE("satisfaction probability edge values") {
  WeibullPatience w;
  CHECK(satisfaction_probability(w, 0.0) == 1.0);
  CHECK(satisfaction_probability(w, kSaturatedDelay) == 0.0);
  CHECK(satisfaction_probability(w, 30.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK_THROWS_AS(satisfaction_probability(w, -1.0), ValidationError);
  CHECK_THROWS_AS(satisfaction_probability(WeibullPatience{0.0, 2.0}, 1.0), ValidationError);
  CHECK(w.cdf(17.0) + satisfaction_probability(w, 17.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(satisfaction_probability(w, w.quantile_upper(1e-6)) == doctest::Approx(1e-6).epsilon(1e-9));
}

TEST_CASE("property: Q is non-increasing in delay") {
  WeibullPatience w;
  double prev = 1.0;
  for (double d = 0.0; d < 200.0; d += 0.25) {
    double q = satisfaction_probability(w, d);
    REQUIRE(q <= prev);
    REQUIRE(q >= 0.0);
    prev = q;
  }
}

TEST_CASE("mean reliability with a fixed delay is Q of that delay") {
  auto patience = PatienceMixture::single(WeibullPatience{});
  for (double d : {0.0, 3.0, 16.0, 25.0, 90.0}) {
    CHECK(mean_reliability(DelayDistribution::deterministic(d), patience) ==
          doctest::Approx(satisfaction_probability(WeibullPatience{}, d)).epsilon(1e-9));
  }
}

TEST_CASE("mean reliability of a uniform delay against Gauss-Legendre") {
  const double a = 5.0, b = 35.0, lambda = 30.0, k = 2.92;
  oracle::GaussLegendre gl(64);
  double expected = gl.integrate([&](double u) { return (u - a) / (b - a) * oracle::weibull_density(u, lambda, k); },
                                 a, b, 4) +
                    oracle::weibull_survival(b, lambda, k);
  auto delay = DelayDistribution::from_cdf([&](double t) { return std::clamp((t - a) / (b - a), 0.0, 1.0); });
  CHECK(mean_reliability(delay, PatienceMixture::single(WeibullPatience{lambda, k})) ==
        doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("mean reliability of an empirical delay is the sample mean of Q") {
  std::vector<double> samples = {0.0, 4.0, 4.0, 12.5, 30.0, 41.0};
  double expected = 0.0;
  for (double s : samples) expected += oracle::weibull_survival(s, 30.0, 2.92);
  expected /= static_cast<double>(samples.size());
  CHECK(mean_reliability(DelayDistribution::empirical(samples), PatienceMixture::single(WeibullPatience{})) ==
        doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("point-mass patience uses a strict boundary") {
  auto at10 = PatienceMixture::single(PointMass{10.0});
  CHECK(mean_reliability(DelayDistribution::deterministic(10.0), at10) == 0.0);
  CHECK(mean_reliability(DelayDistribution::deterministic(9.999), at10) == 1.0);
  auto delay = DelayDistribution::empirical({5.0, 10.0, 15.0, 20.0});
  CHECK(mean_reliability(delay, at10) == doctest::Approx(0.25));
}

TEST_CASE("uniform patience against a closed form") {
  // Delay fixed at d, patience uniform on [lo, hi]: P(d < U) = (hi - d)/(hi - lo).
  auto patience = PatienceMixture::single(UniformPatience{0.0, 40.0});
  CHECK(mean_reliability(DelayDistribution::deterministic(10.0), patience) == doctest::Approx(0.75).epsilon(1e-9));
}

TEST_CASE("mixtures weight their parts") {
  PatienceMixture mix({{PointMass{10.0}, 0.3}, {WeibullPatience{}, 0.7}});
  double d = 12.0;
  CHECK(mean_reliability(DelayDistribution::deterministic(d), mix) ==
        doctest::Approx(0.7 * oracle::weibull_survival(d, 30.0, 2.92)).epsilon(1e-9));
  CHECK_THROWS_AS(PatienceMixture({{PointMass{1.0}, 0.5}, {PointMass{2.0}, 0.4}}), ValidationError);
}

TEST_CASE("custom patience law matches its Weibull twin") {
  CustomPatience custom{[](double t) { return 1.0 - oracle::weibull_survival(t, 30.0, 2.92); }, 200.0};
  auto delay = DelayDistribution::empirical({3.0, 18.0, 27.0});
  CHECK(mean_reliability(delay, PatienceMixture::single(custom)) ==
        doctest::Approx(mean_reliability(delay, PatienceMixture::single(WeibullPatience{}))).epsilon(1e-5));
  CustomPatience broken{[](double t) { return std::min(0.5, t); }, 10.0};
  CHECK_THROWS_AS(mean_reliability(delay, PatienceMixture::single(broken)), ValidationError);
}

TEST_CASE("reliability vector from delays") {
  WeibullPatience w;
  auto p = delays_to_reliability_vector({25.0, 20.0, kSaturatedDelay}, w, 3);
  CHECK(p[0] == doctest::Approx(satisfaction_probability(w, 25.0)));
  CHECK(p[2] == 0.0);
  CHECK_THROWS_AS(delays_to_reliability_vector({1.0}, w, 2), ValidationError);
}

TEST_CASE("adaptive Simpson against Gauss-Legendre") {
  oracle::GaussLegendre gl(64);
  auto f = [](double x) { return std::sin(x) * std::exp(-0.3 * x); };
  auto r = adaptive_simpson(f, 0.0, 20.0, 1e-12);
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(gl.integrate(f, 0.0, 20.0, 8)).epsilon(1e-10));
}
