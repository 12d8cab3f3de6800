#pragma once

// Reliability, structural and Barlow-Proschan importance of components.

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "roadrel/structure.hpp"

namespace roadrel {

using Rational = boost::multiprecision::cpp_rational;

enum class Measure { birnbaum, birnbaum_functioning, birnbaum_failure, barlow_proschan };

const char* to_string(Measure m);
Measure parse_measure(const std::string& text);

/// B(i|p) = h(1_i,p) - h(0_i,p). In paper-naive mode this is the partial
/// derivative of the naive path-product expression, with every occurrence of
/// p_i differentiated jointly.
double birnbaum_reliability(const StructureFunction& phi, const ReliabilityVector& p, ComponentId i,
                            EvaluationMode mode = EvaluationMode::exact);

struct BirnbaumSplit {
  double functioning;  ///< (1 - p_i) * B(i|p)
  double failure;      ///< p_i * B(i|p)
};
BirnbaumSplit birnbaum_split(const StructureFunction& phi, const ReliabilityVector& p, ComponentId i,
                             EvaluationMode mode = EvaluationMode::exact);

/// Structural importance 2^{-n} sum_x delta_i(x), exact. Computed both by
/// counting critical vectors and from the path-union expansion at p = 1/2;
/// a disagreement throws InvariantBreach.
Rational birnbaum_structural_exact(const StructureFunction& phi, ComponentId i,
                                   std::size_t cap = kDefaultEnumerationCap);
double birnbaum_structural(const StructureFunction& phi, ComponentId i,
                           std::size_t cap = kDefaultEnumerationCap);

/// Integral over p in [0,1] of h(1_i,p) - h(0_i,p) with one scalar p shared
/// by every other component, integrated term by term from the path-union
/// polynomial.
Rational barlow_proschan_exact(const StructureFunction& phi, ComponentId i,
                               std::size_t cap = kDefaultEnumerationCap);
double barlow_proschan(const StructureFunction& phi, ComponentId i,
                       std::size_t cap = kDefaultEnumerationCap);

/// sum_r n_r(i) (r-1)!(n-r)!/n!, where n_r(i) counts critical path vectors
/// for i with r working components (i included).
Rational barlow_proschan_combinatorial_exact(const StructureFunction& phi, ComponentId i,
                                             std::size_t cap = kDefaultEnumerationCap);
double barlow_proschan_combinatorial(const StructureFunction& phi, ComponentId i,
                                     std::size_t cap = kDefaultEnumerationCap);

/// Coefficients a_0..a_{n-1} of h(1_i,p) - h(0_i,p) as a polynomial in the
/// shared scalar p.
std::vector<Rational> birnbaum_polynomial(const StructureFunction& phi, ComponentId i,
                                          std::size_t cap = kDefaultEnumerationCap);

/// Component lifetime laws for the time-dependent Barlow-Proschan measure.
struct LifetimeSpec {
  std::vector<std::function<double(double)>> cdf;
  std::vector<std::function<double(double)>> density;
  double t_max = 0.0;
};

struct LifetimeImportance {
  std::vector<double> numerator;  ///< int_0^t [h(1_i,Fbar) - h(0_i,Fbar)] dF_i
  std::vector<double> ratio;      ///< numerator / sum of numerators
  double denominator = 0.0;
};

LifetimeImportance barlow_proschan_lifetime(const StructureFunction& phi, const LifetimeSpec& lifetimes,
                                            double t, double rel_tol = 1e-8);

struct ComponentImportance {
  ComponentId component;
  double birnbaum = 0.0;
  double birnbaum_functioning = 0.0;
  double birnbaum_failure = 0.0;
  double barlow_proschan = 0.0;
};

struct ImportanceReport {
  std::vector<ComponentImportance> records;
  EvaluationMode mode = EvaluationMode::exact;
  Measure ranked_by = Measure::birnbaum;
  std::vector<ComponentId> ranking;
};

double value_of(const ComponentImportance& r, Measure m);

/// Descending by the chosen measure; ties (equal to 1e-12) by ascending id.
std::vector<ComponentId> rank(const ImportanceReport& report, Measure measure);

/// Birnbaum measures at p; the Barlow-Proschan column is always the exact
/// integral, which does not depend on p or on the evaluation mode.
ImportanceReport importance_report(const StructureFunction& phi, const ReliabilityVector& p,
                                   EvaluationMode mode, Measure ranked_by = Measure::birnbaum);

/// Same, at p = (1/2, ..., 1/2).
ImportanceReport structural_report(const StructureFunction& phi, EvaluationMode mode,
                                   Measure ranked_by = Measure::birnbaum);

}  // namespace roadrel
