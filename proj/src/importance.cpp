#include "roadrel/importance.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

#include "roadrel/error.hpp"
#include "roadrel/quadrature.hpp"

namespace roadrel {
namespace {

void check_component(const StructureFunction& phi, ComponentId i) {
  if (i.index >= phi.size()) {
    throw ValidationError("component " + std::to_string(i.index) + " outside system of size " +
                          std::to_string(phi.size()));
  }
}

void check_cap(const StructureFunction& phi, std::size_t cap) {
  if (phi.size() > cap) {
    throw CapExceeded("importance over " + std::to_string(phi.size()) +
                      " components exceeds the enumeration cap of " + std::to_string(cap));
  }
}

Rational factorial(std::size_t k) {
  boost::multiprecision::cpp_int f = 1;
  for (std::size_t j = 2; j <= k; ++j) f *= j;
  return Rational(f);
}

double paper_naive_derivative(const StructureFunction& phi, const ReliabilityVector& p, ComponentId i) {
  auto paths = phi.min_paths();
  std::vector<long double> pi(paths.size());
  for (std::size_t k = 0; k < paths.size(); ++k) {
    long double prod = 1.0L;
    for (ComponentMask rest = paths[k]; rest; rest &= rest - 1) {
      prod *= p[static_cast<std::size_t>(std::countr_zero(rest))];
    }
    pi[k] = prod;
  }
  long double total = 0.0L;
  for (std::size_t k = 0; k < paths.size(); ++k) {
    if (!(paths[k] & bit(i))) continue;
    long double term = 1.0L;
    for (ComponentMask rest = paths[k] & ~bit(i); rest; rest &= rest - 1) {
      term *= p[static_cast<std::size_t>(std::countr_zero(rest))];
    }
    for (std::size_t l = 0; l < paths.size(); ++l) {
      if (l != k) term *= 1.0L - pi[l];
    }
    total += term;
  }
  return static_cast<double>(total);
}

}  // namespace

const char* to_string(Measure m) {
  switch (m) {
    case Measure::birnbaum: return "birnbaum";
    case Measure::birnbaum_functioning: return "birnbaum-functioning";
    case Measure::birnbaum_failure: return "birnbaum-failure";
    case Measure::barlow_proschan: return "barlow-proschan";
  }
  return "?";
}

Measure parse_measure(const std::string& text) {
  if (text == "birnbaum") return Measure::birnbaum;
  if (text == "birnbaum-functioning") return Measure::birnbaum_functioning;
  if (text == "birnbaum-failure") return Measure::birnbaum_failure;
  if (text == "barlow-proschan" || text == "bp") return Measure::barlow_proschan;
  throw ValidationError("unknown measure '" + text + "'");
}

double birnbaum_reliability(const StructureFunction& phi, const ReliabilityVector& p, ComponentId i,
                            EvaluationMode mode) {
  check_component(phi, i);
  if (p.size() != phi.size()) throw ValidationError("reliability vector length does not match system size");
  if (mode == EvaluationMode::paper_naive) return paper_naive_derivative(phi, p, i);
  return reliability_exact(phi, p.with(i, 1.0)) - reliability_exact(phi, p.with(i, 0.0));
}

BirnbaumSplit birnbaum_split(const StructureFunction& phi, const ReliabilityVector& p, ComponentId i,
                             EvaluationMode mode) {
  double b = birnbaum_reliability(phi, p, i, mode);
  return {(1.0 - p[i.index]) * b, p[i.index] * b};
}

Rational birnbaum_structural_exact(const StructureFunction& phi, ComponentId i, std::size_t cap) {
  check_component(phi, i);
  check_cap(phi, cap);
  const std::size_t n = phi.size();
  const ComponentMask others = (n == 64 ? ~ComponentMask{0} : bit(n) - 1) & ~bit(i);

  // Count critical vectors over the other n-1 components (subset walk).
  std::uint64_t critical = 0;
  ComponentMask x = 0;
  do {
    if (evaluate(phi, x | bit(i)) && !evaluate(phi, x)) ++critical;
    x = (x - others) & others;
  } while (x != 0);
  Rational by_count(critical, boost::multiprecision::cpp_int(1) << (n - 1));

  Rational by_derivative = 0;
  for (const UnionTerm& t : path_union_expansion(phi)) {
    if (!(t.components & bit(i))) continue;
    by_derivative += Rational(t.coefficient, boost::multiprecision::cpp_int(1)
                                                 << (std::popcount(t.components) - 1));
  }
  if (by_count != by_derivative) {
    std::ostringstream os;
    os << "structural importance of component " << i.index << " disagrees: " << by_count << " by count, "
       << by_derivative << " by derivative";
    throw InvariantBreach(os.str());
  }
  return by_count;
}

double birnbaum_structural(const StructureFunction& phi, ComponentId i, std::size_t cap) {
  return static_cast<double>(birnbaum_structural_exact(phi, i, cap));
}

std::vector<Rational> birnbaum_polynomial(const StructureFunction& phi, ComponentId i, std::size_t cap) {
  check_component(phi, i);
  check_cap(phi, cap);
  std::vector<Rational> coeff(phi.size(), Rational(0));
  for (const UnionTerm& t : path_union_expansion(phi)) {
    if (!(t.components & bit(i))) continue;
    coeff[static_cast<std::size_t>(std::popcount(t.components) - 1)] += t.coefficient;
  }
  return coeff;
}

Rational barlow_proschan_exact(const StructureFunction& phi, ComponentId i, std::size_t cap) {
  auto coeff = birnbaum_polynomial(phi, i, cap);
  Rational total = 0;
  for (std::size_t k = 0; k < coeff.size(); ++k) total += coeff[k] / Rational(k + 1);
  return total;
}

double barlow_proschan(const StructureFunction& phi, ComponentId i, std::size_t cap) {
  return static_cast<double>(barlow_proschan_exact(phi, i, cap));
}

Rational barlow_proschan_combinatorial_exact(const StructureFunction& phi, ComponentId i, std::size_t cap) {
  check_component(phi, i);
  check_cap(phi, cap);
  const std::size_t n = phi.size();
  const ComponentMask others = (n == 64 ? ~ComponentMask{0} : bit(n) - 1) & ~bit(i);

  std::vector<std::uint64_t> n_r(n + 1, 0);
  ComponentMask x = 0;
  do {
    if (evaluate(phi, x | bit(i)) && !evaluate(phi, x)) ++n_r[static_cast<std::size_t>(std::popcount(x)) + 1];
    x = (x - others) & others;
  } while (x != 0);

  const Rational n_fact = factorial(n);
  Rational total = 0;
  for (std::size_t r = 1; r <= n; ++r) {
    if (n_r[r] == 0) continue;
    total += Rational(n_r[r]) * factorial(r - 1) * factorial(n - r) / n_fact;
  }
  return total;
}

double barlow_proschan_combinatorial(const StructureFunction& phi, ComponentId i, std::size_t cap) {
  return static_cast<double>(barlow_proschan_combinatorial_exact(phi, i, cap));
}

LifetimeImportance barlow_proschan_lifetime(const StructureFunction& phi, const LifetimeSpec& lifetimes,
                                            double t, double rel_tol) {
  const std::size_t n = phi.size();
  if (lifetimes.cdf.size() != n || lifetimes.density.size() != n) {
    throw ValidationError("lifetime spec must give a cdf and a density for every component");
  }
  if (!(lifetimes.t_max > 0.0)) throw ValidationError("lifetime horizon t_max must be positive");
  if (!(t > 0.0 && t <= lifetimes.t_max)) throw ValidationError("t must lie in (0, t_max]");

  const auto terms = path_union_expansion(phi);
  LifetimeImportance out;
  out.numerator.assign(n, 0.0);
  out.ratio.assign(n, 0.0);
  std::vector<double> survival(n);

  for (std::size_t i = 0; i < n; ++i) {
    auto integrand = [&](double u) {
      for (std::size_t j = 0; j < n; ++j) survival[j] = 1.0 - lifetimes.cdf[j](u);
      long double d = 0.0L;
      for (const UnionTerm& term : terms) {
        if (!(term.components & bit(i))) continue;
        long double prod = static_cast<long double>(term.coefficient);
        for (ComponentMask rest = term.components & ~bit(i); rest; rest &= rest - 1) {
          prod *= survival[static_cast<std::size_t>(std::countr_zero(rest))];
        }
        d += prod;
      }
      return static_cast<double>(d) * lifetimes.density[i](u);
    };
    out.numerator[i] = adaptive_simpson(integrand, 0.0, t, rel_tol).value;
    out.denominator += out.numerator[i];
  }
  if (!(out.denominator > 0.0) || !std::isfinite(out.denominator)) {
    throw ValidationError("lifetimes give no system failure mass on [0, t]; ratio is undefined");
  }
  for (std::size_t i = 0; i < n; ++i) out.ratio[i] = out.numerator[i] / out.denominator;
  return out;
}

double value_of(const ComponentImportance& r, Measure m) {
  switch (m) {
    case Measure::birnbaum: return r.birnbaum;
    case Measure::birnbaum_functioning: return r.birnbaum_functioning;
    case Measure::birnbaum_failure: return r.birnbaum_failure;
    case Measure::barlow_proschan: return r.barlow_proschan;
  }
  return 0.0;
}

std::vector<ComponentId> rank(const ImportanceReport& report, Measure measure) {
  struct Key {
    long long scaled;
    ComponentId id;
  };
  std::vector<Key> keys;
  keys.reserve(report.records.size());
  for (const auto& r : report.records) keys.push_back({std::llround(value_of(r, measure) * 1e12), r.component});
  std::sort(keys.begin(), keys.end(), [](const Key& a, const Key& b) {
    return a.scaled != b.scaled ? a.scaled > b.scaled : a.id < b.id;
  });
  std::vector<ComponentId> out;
  out.reserve(keys.size());
  for (const Key& k : keys) out.push_back(k.id);
  return out;
}

ImportanceReport importance_report(const StructureFunction& phi, const ReliabilityVector& p,
                                   EvaluationMode mode, Measure ranked_by) {
  ImportanceReport report;
  report.mode = mode;
  report.ranked_by = ranked_by;
  for (std::size_t i = 0; i < phi.size(); ++i) {
    ComponentId id(i);
    ComponentImportance rec;
    rec.component = id;
    rec.birnbaum = birnbaum_reliability(phi, p, id, mode);
    rec.birnbaum_functioning = (1.0 - p[i]) * rec.birnbaum;
    rec.birnbaum_failure = p[i] * rec.birnbaum;
    rec.barlow_proschan = barlow_proschan(phi, id);
    report.records.push_back(rec);
  }
  report.ranking = rank(report, ranked_by);
  return report;
}

ImportanceReport structural_report(const StructureFunction& phi, EvaluationMode mode, Measure ranked_by) {
  ImportanceReport report =
      importance_report(phi, ReliabilityVector::uniform(phi.size(), 0.5), mode, ranked_by);
  if (mode == EvaluationMode::exact) {
    for (auto& rec : report.records) {
      rec.birnbaum = birnbaum_structural(phi, rec.component);
      rec.birnbaum_functioning = rec.birnbaum_failure = 0.5 * rec.birnbaum;
    }
    report.ranking = rank(report, ranked_by);
  }
  return report;
}

}  // namespace roadrel
