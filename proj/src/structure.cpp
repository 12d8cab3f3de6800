#include "roadrel/structure.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <sstream>

#include "roadrel/error.hpp"

namespace roadrel {
namespace {

ComponentMask full_mask(std::size_t n) { return n == 64 ? ~ComponentMask{0} : bit(n) - 1; }

void check_size(const StructureFunction& phi, std::size_t got, const char* what) {
  if (got != phi.size()) {
    std::ostringstream os;
    os << what << " has " << got << " entries, system has " << phi.size() << " components";
    throw ValidationError(os.str());
  }
}

void check_cap(const StructureFunction& phi, std::size_t cap) {
  if (phi.size() > cap) {
    std::ostringstream os;
    os << "exact evaluation over " << phi.size() << " components exceeds the enumeration cap of "
       << cap << "; use the Monte Carlo estimator";
    throw CapExceeded(os.str());
  }
}

bool subset(ComponentMask a, ComponentMask b) { return (a & ~b) == 0; }

// Keeps only inclusion-minimal sets, sorted by (size, value).
std::vector<ComponentMask> minimize(std::vector<ComponentMask> sets) {
  std::sort(sets.begin(), sets.end(), [](ComponentMask a, ComponentMask b) {
    int pa = std::popcount(a), pb = std::popcount(b);
    return pa != pb ? pa < pb : a < b;
  });
  sets.erase(std::unique(sets.begin(), sets.end()), sets.end());
  std::vector<ComponentMask> out;
  for (ComponentMask s : sets) {
    bool dominated = std::any_of(out.begin(), out.end(), [&](ComponentMask m) { return subset(m, s); });
    if (!dominated) out.push_back(s);
  }
  return out;
}

// Sum over all vertices of prob(x) * phi(x), by depth-first expansion.
long double enumerate(const StructureFunction& phi, std::span<const double> p, std::size_t i,
                      ComponentMask x, long double weight) {
  if (weight == 0.0L) return 0.0L;
  if (i == phi.size()) return evaluate(phi, x) ? weight : 0.0L;
  long double pi = p[i];
  return enumerate(phi, p, i + 1, x | bit(i), weight * pi) +
         enumerate(phi, p, i + 1, x, weight * (1.0L - pi));
}

}  // namespace

StateVector::StateVector(std::size_t n, ComponentMask working) : n_(n), mask_(working) {
  if (n > kMaxComponents) throw ValidationError("state vector longer than 64 components");
  if ((working & ~full_mask(n)) != 0) throw ValidationError("state bits set beyond vector length");
}

StateVector StateVector::from_bits(std::span<const int> states) {
  ComponentMask m = 0;
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states[i] != 0 && states[i] != 1) throw ValidationError("state entries must be 0 or 1");
    if (states[i]) m |= bit(i);
  }
  return {states.size(), m};
}

StateVector StateVector::all_ones(std::size_t n) { return {n, full_mask(n)}; }

StateVector StateVector::with(ComponentId i, bool state) const {
  if (i.index >= n_) throw ValidationError("component index out of range");
  return {n_, state ? (mask_ | bit(i)) : (mask_ & ~bit(i))};
}

ReliabilityVector::ReliabilityVector(std::vector<double> p) : p_(std::move(p)) {
  for (std::size_t i = 0; i < p_.size(); ++i) {
    if (!(p_[i] >= 0.0 && p_[i] <= 1.0)) {
      std::ostringstream os;
      os << "reliability p[" << i << "] = " << p_[i] << " is outside [0,1]";
      throw ValidationError(os.str());
    }
  }
}

ReliabilityVector ReliabilityVector::uniform(std::size_t n, double value) {
  return ReliabilityVector(std::vector<double>(n, value));
}

ReliabilityVector ReliabilityVector::with(ComponentId i, double value) const {
  if (i.index >= p_.size()) throw ValidationError("component index out of range");
  auto copy = p_;
  copy[i.index] = value;
  return ReliabilityVector(std::move(copy));
}

StructureFunction::StructureFunction(std::size_t n, std::vector<ComponentMask> paths) : n_(n) {
  if (n == 0 || n > kMaxComponents) throw ValidationError("component count must be in [1, 64]");
  if (paths.empty()) throw ValidationError("a structure needs at least one minimal path");
  for (ComponentMask p : paths) {
    if (p == 0) throw ValidationError("minimal paths must be non-empty");
    if ((p & ~full_mask(n)) != 0) throw ValidationError("path references a component outside [0, n)");
  }
  paths_ = minimize(paths);
  if (paths_.size() != paths.size()) {
    for (ComponentMask p : paths) {
      if (std::find(paths_.begin(), paths_.end(), p) == paths_.end()) {
        notes_.push_back("dropped non-minimal path " + format_mask(p));
      }
    }
    std::size_t duplicates = paths.size() - paths_.size() - notes_.size();
    if (duplicates > 0) notes_.push_back("dropped " + std::to_string(duplicates) + " duplicate path(s)");
  }
}

StructureFunction::StructureFunction(std::size_t n, const std::vector<std::vector<std::size_t>>& paths)
    : StructureFunction(n, [&] {
        std::vector<ComponentMask> masks;
        for (const auto& path : paths) {
          ComponentMask m = 0;
          for (std::size_t c : path) {
            if (c >= n) throw ValidationError("path references component " + std::to_string(c) +
                                              " outside [0, " + std::to_string(n) + ")");
            m |= bit(c);
          }
          masks.push_back(m);
        }
        return masks;
      }()) {}

ComponentMask StructureFunction::relevant_components() const {
  ComponentMask m = 0;
  for (ComponentMask p : paths_) m |= p;
  return m;
}

const char* to_string(EvaluationMode mode) {
  return mode == EvaluationMode::exact ? "exact" : "paper-naive";
}

EvaluationMode parse_evaluation_mode(const std::string& text) {
  if (text == "exact") return EvaluationMode::exact;
  if (text == "paper-naive" || text == "paper_naive") return EvaluationMode::paper_naive;
  throw ValidationError("unknown evaluation mode '" + text + "' (expected exact or paper-naive)");
}

bool evaluate(const StructureFunction& phi, ComponentMask x) {
  for (ComponentMask p : phi.min_paths()) {
    if (subset(p, x)) return true;
  }
  return false;
}

bool evaluate(const StructureFunction& phi, const StateVector& x) {
  check_size(phi, x.size(), "state vector");
  return evaluate(phi, x.mask());
}

int delta(const StructureFunction& phi, ComponentId i, const StateVector& x) {
  check_size(phi, x.size(), "state vector");
  if (i.index >= phi.size()) throw ValidationError("component index out of range");
  return int{evaluate(phi, x.mask() | bit(i))} - int{evaluate(phi, x.mask() & ~bit(i))};
}

std::vector<ComponentMask> minimal_cuts(const StructureFunction& phi) {
  // Berge's incremental transversal construction.
  std::vector<ComponentMask> cuts{0};
  for (ComponentMask path : phi.min_paths()) {
    std::vector<ComponentMask> next;
    for (ComponentMask c : cuts) {
      if (c & path) {
        next.push_back(c);
        continue;
      }
      for (ComponentMask rest = path; rest; rest &= rest - 1) {
        next.push_back(c | (rest & -rest));
      }
    }
    cuts = minimize(std::move(next));
  }
  return cuts;
}

bool evaluate_by_cuts(std::span<const ComponentMask> cuts, ComponentMask x) {
  for (ComponentMask c : cuts) {
    if ((c & x) == 0) return false;
  }
  return true;
}

std::vector<UnionTerm> path_union_expansion(const StructureFunction& phi) {
  // Fold paths in one at a time: terms(S u {P}) = terms(S) - terms(S) * P + P.
  std::map<ComponentMask, std::int64_t> terms;
  for (ComponentMask path : phi.min_paths()) {
    std::map<ComponentMask, std::int64_t> next = terms;
    for (const auto& [u, c] : terms) next[u | path] -= c;
    next[path] += 1;
    terms.clear();
    for (const auto& [u, c] : next) {
      if (c != 0) terms.emplace(u, c);
    }
  }
  std::vector<UnionTerm> out;
  out.reserve(terms.size());
  for (const auto& [u, c] : terms) out.push_back({u, c});
  return out;
}

double reliability_enumeration(const StructureFunction& phi, const ReliabilityVector& p, std::size_t cap) {
  check_size(phi, p.size(), "reliability vector");
  check_cap(phi, cap);
  return static_cast<double>(enumerate(phi, p.values(), 0, 0, 1.0L));
}

double reliability_inclusion_exclusion(const StructureFunction& phi, const ReliabilityVector& p,
                                       std::size_t cap) {
  check_size(phi, p.size(), "reliability vector");
  check_cap(phi, cap);
  long double h = 0.0L;
  for (const UnionTerm& t : path_union_expansion(phi)) {
    long double prod = static_cast<long double>(t.coefficient);
    for (ComponentMask rest = t.components; rest; rest &= rest - 1) {
      prod *= p[static_cast<std::size_t>(std::countr_zero(rest))];
    }
    h += prod;
  }
  return static_cast<double>(h);
}

double reliability_exact(const StructureFunction& phi, const ReliabilityVector& p, std::size_t cap) {
  return reliability_enumeration(phi, p, cap);
}

double reliability_paper_naive(const StructureFunction& phi, const ReliabilityVector& p) {
  check_size(phi, p.size(), "reliability vector");
  long double all_fail = 1.0L;
  for (ComponentMask path : phi.min_paths()) {
    long double prod = 1.0L;
    for (ComponentMask rest = path; rest; rest &= rest - 1) {
      prod *= p[static_cast<std::size_t>(std::countr_zero(rest))];
    }
    all_fail *= 1.0L - prod;
  }
  return static_cast<double>(1.0L - all_fail);
}

double reliability(const StructureFunction& phi, const ReliabilityVector& p, EvaluationMode mode,
                   std::size_t cap) {
  return mode == EvaluationMode::exact ? reliability_exact(phi, p, cap) : reliability_paper_naive(phi, p);
}

double reliability_monte_carlo(const StructureFunction& phi, const ReliabilityVector& p,
                               std::uint64_t samples, std::uint64_t seed) {
  check_size(phi, p.size(), "reliability vector");
  if (samples == 0) throw ValidationError("Monte Carlo needs at least one sample");
  Rng rng(seed);
  std::uint64_t hits = 0;
  for (std::uint64_t s = 0; s < samples; ++s) {
    ComponentMask x = 0;
    for (std::size_t i = 0; i < phi.size(); ++i) {
      if (rng.uniform() < p[i]) x |= bit(i);
    }
    hits += evaluate(phi, x) ? 1 : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(samples);
}

std::string format_mask(ComponentMask mask, std::span<const int> labels) {
  std::ostringstream os;
  os << '{';
  bool first = true;
  for (ComponentMask rest = mask; rest; rest &= rest - 1) {
    auto i = static_cast<std::size_t>(std::countr_zero(rest));
    if (!first) os << ',';
    first = false;
    if (i < labels.size()) {
      os << labels[i];
    } else {
      os << i;
    }
  }
  os << '}';
  return os.str();
}

}  // namespace roadrel
