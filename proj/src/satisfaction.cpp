#include "roadrel/satisfaction.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "roadrel/error.hpp"
#include "roadrel/quadrature.hpp"

namespace roadrel {
namespace {

constexpr double kTailMass = 1e-10;
constexpr double kNormTolerance = 1e-6;

// Integrates prob_below(u) * density(u) over [a, b], split at delay jumps.
double integrate_split(const DelayDistribution& delay, const std::function<double(double)>& density, double a,
                       double b, double rel_tol) {
  std::vector<double> cuts{a};
  for (double x : delay.breakpoints()) {
    if (x > a && x < b) cuts.push_back(x);
  }
  cuts.push_back(b);
  auto integrand = [&](double u) { return delay.prob_below(u) * density(u); };
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    // Open at the jump: a jump at the left end must not leak into the panel.
    total += adaptive_simpson(integrand, std::nextafter(cuts[k], b), cuts[k + 1], rel_tol).value;
  }
  return total;
}

double component_reliability(const DelayDistribution& delay, const PatienceComponent& part, double rel_tol) {
  if (const auto* pm = std::get_if<PointMass>(&part)) return delay.prob_below(pm->at);
  if (const auto* w = std::get_if<WeibullPatience>(&part)) {
    double upper = w->quantile_upper(kTailMass);
    double body = integrate_split(delay, [&](double u) { return w->density(u); }, 0.0, upper, rel_tol);
    return body + kTailMass * delay.prob_below(upper);
  }
  if (const auto* un = std::get_if<UniformPatience>(&part)) {
    double inv = 1.0 / (un->hi - un->lo);
    return integrate_split(delay, [inv](double) { return inv; }, un->lo, un->hi, rel_tol);
  }
  const auto& custom = std::get<CustomPatience>(part);
  // Midpoint Stieltjes sum against dG on a grid split at delay jumps.
  std::vector<double> cuts{0.0};
  for (double x : delay.breakpoints()) {
    if (x > 0.0 && x < custom.upper) cuts.push_back(x);
  }
  cuts.push_back(custom.upper);
  double total = 0.0;
  constexpr int kPerPanel = 4096;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    double a = cuts[k], b = cuts[k + 1];
    double h = (b - a) / kPerPanel;
    double g_prev = custom.cdf(a);
    for (int j = 0; j < kPerPanel; ++j) {
      double u1 = (j + 1 == kPerPanel) ? b : a + (j + 1) * h;
      double g = custom.cdf(u1);
      total += delay.prob_below(std::nextafter(a + (j + 0.5) * h, b)) * (g - g_prev);
      g_prev = g;
    }
  }
  return total + custom.cdf(0.0) * delay.prob_below(0.0);
}

void validate_component(const PatienceComponent& part) {
  if (const auto* w = std::get_if<WeibullPatience>(&part)) {
    w->validate();
  } else if (const auto* un = std::get_if<UniformPatience>(&part)) {
    if (!(un->hi > un->lo) || !std::isfinite(un->hi) || !std::isfinite(un->lo)) {
      throw ValidationError("uniform patience needs finite lo < hi");
    }
  } else if (const auto* c = std::get_if<CustomPatience>(&part)) {
    if (!c->cdf) throw ValidationError("custom patience needs a cdf");
    if (!(c->upper > 0.0) || !std::isfinite(c->upper)) throw ValidationError("custom patience needs a finite upper bound");
    double mass = c->cdf(c->upper);
    if (!(std::abs(mass - 1.0) <= kNormTolerance)) {
      std::ostringstream os;
      os << "patience distribution is not normalizable on [0, " << c->upper << "]: total mass " << mass;
      throw ValidationError(os.str());
    }
  }
}

}  // namespace

void WeibullPatience::validate() const {
  if (!(lambda > 0.0) || !(k > 0.0) || !std::isfinite(lambda) || !std::isfinite(k)) {
    throw ValidationError("Weibull patience needs lambda > 0 and k > 0");
  }
}

double WeibullPatience::cdf(double t) const { return t <= 0.0 ? 0.0 : -std::expm1(-std::pow(t / lambda, k)); }

double WeibullPatience::density(double t) const {
  if (t < 0.0) return 0.0;
  if (t == 0.0) return k == 1.0 ? 1.0 / lambda : (k < 1.0 ? std::numeric_limits<double>::infinity() : 0.0);
  double z = t / lambda;
  return k / lambda * std::pow(z, k - 1.0) * std::exp(-std::pow(z, k));
}

double WeibullPatience::quantile_upper(double mass) const { return lambda * std::pow(-std::log(mass), 1.0 / k); }

double satisfaction_probability(const WeibullPatience& model, double delay) {
  model.validate();
  if (std::isnan(delay) || delay < 0.0) throw ValidationError("delay must be non-negative");
  if (std::isinf(delay)) return 0.0;
  return std::exp(-std::pow(delay / model.lambda, model.k));
}

DelayDistribution DelayDistribution::deterministic(double delay) {
  if (std::isnan(delay) || delay < 0.0) throw ValidationError("delay must be non-negative");
  DelayDistribution d;
  d.sorted_ = {delay};
  if (std::isfinite(delay)) d.breakpoints_ = {delay};
  return d;
}

DelayDistribution DelayDistribution::empirical(std::vector<double> samples) {
  if (samples.empty()) throw ValidationError("empirical delay distribution needs at least one sample");
  for (double s : samples) {
    if (std::isnan(s) || s < 0.0) throw ValidationError("delay samples must be non-negative");
  }
  std::sort(samples.begin(), samples.end());
  DelayDistribution d;
  d.sorted_ = std::move(samples);
  for (double s : d.sorted_) {
    if (std::isfinite(s) && (d.breakpoints_.empty() || d.breakpoints_.back() != s)) d.breakpoints_.push_back(s);
  }
  return d;
}

DelayDistribution DelayDistribution::from_cdf(std::function<double(double)> cdf, std::vector<double> breakpoints) {
  if (!cdf) throw ValidationError("delay cdf must be callable");
  DelayDistribution d;
  d.cdf_ = std::move(cdf);
  std::sort(breakpoints.begin(), breakpoints.end());
  d.breakpoints_ = std::move(breakpoints);
  return d;
}

double DelayDistribution::prob_below(double t) const {
  if (cdf_) {
    // Left limit at a declared jump, plain cdf elsewhere.
    bool at_jump = std::binary_search(breakpoints_.begin(), breakpoints_.end(), t);
    return std::clamp(cdf_(at_jump ? std::nextafter(t, -std::numeric_limits<double>::infinity()) : t), 0.0, 1.0);
  }
  auto below = std::lower_bound(sorted_.begin(), sorted_.end(), t) - sorted_.begin();
  return static_cast<double>(below) / static_cast<double>(sorted_.size());
}

PatienceMixture::PatienceMixture(std::vector<std::pair<PatienceComponent, double>> parts) : parts_(std::move(parts)) {
  if (parts_.empty()) throw ValidationError("patience mixture needs at least one component");
  double total = 0.0;
  for (const auto& [part, w] : parts_) {
    if (!(w >= 0.0)) throw ValidationError("patience mixture weights must be non-negative");
    validate_component(part);
    total += w;
  }
  if (!(std::abs(total - 1.0) <= 1e-9)) throw ValidationError("patience mixture weights must sum to 1");
}

double mean_reliability(const DelayDistribution& delay, const PatienceMixture& patience, double rel_tol) {
  double p = 0.0;
  for (const auto& [part, w] : patience.parts()) {
    if (w > 0.0) p += w * component_reliability(delay, part, rel_tol);
  }
  return std::clamp(p, 0.0, 1.0);
}

ReliabilityVector delays_to_reliability_vector(const std::vector<double>& delays, const WeibullPatience& model,
                                               std::size_t expected_size) {
  if (delays.size() != expected_size) {
    throw ValidationError("expected " + std::to_string(expected_size) + " delays, got " +
                          std::to_string(delays.size()));
  }
  std::vector<double> p;
  p.reserve(delays.size());
  for (double d : delays) p.push_back(satisfaction_probability(model, d));
  return ReliabilityVector(std::move(p));
}

}  // namespace roadrel
