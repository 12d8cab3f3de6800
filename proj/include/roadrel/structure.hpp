#pragma once

// Binary coherent systems described by their minimal path sets.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "roadrel/random.hpp"

namespace roadrel {

/// Bit set over component indices; bit i set means component i belongs to the
/// set (or, for a state, that component i functions).
using ComponentMask = std::uint64_t;

inline constexpr std::size_t kMaxComponents = 64;
inline constexpr std::size_t kDefaultEnumerationCap = 20;

/// Zero-based component index within one system.
struct ComponentId {
  std::size_t index = 0;

  constexpr ComponentId() = default;
  constexpr explicit ComponentId(std::size_t i) : index(i) {}
  friend constexpr auto operator<=>(ComponentId, ComponentId) = default;
};

inline constexpr ComponentMask bit(std::size_t i) { return ComponentMask{1} << i; }
inline constexpr ComponentMask bit(ComponentId c) { return bit(c.index); }

/// Component states x = (x_1..x_n), 1 = functioning.
class StateVector {
 public:
  StateVector(std::size_t n, ComponentMask working);
  static StateVector from_bits(std::span<const int> states);
  static StateVector all_ones(std::size_t n);
  static StateVector all_zeros(std::size_t n) { return {n, 0}; }

  std::size_t size() const { return n_; }
  ComponentMask mask() const { return mask_; }
  bool operator[](std::size_t i) const { return (mask_ >> i) & 1u; }
  StateVector with(ComponentId i, bool state) const;

 private:
  std::size_t n_;
  ComponentMask mask_;
};

/// Per-component reliabilities p_i = P(X_i = 1).
class ReliabilityVector {
 public:
  ReliabilityVector() = default;
  explicit ReliabilityVector(std::vector<double> p);
  static ReliabilityVector uniform(std::size_t n, double value);

  std::size_t size() const { return p_.size(); }
  double operator[](std::size_t i) const { return p_[i]; }
  std::span<const double> values() const { return p_; }
  ReliabilityVector with(ComponentId i, double value) const;

 private:
  std::vector<double> p_;
};

/// Monotone structure function phi stored as its minimal path sets.
///
/// Construction canonicalizes the input: duplicate and dominated
/// (non-minimal) paths are dropped and a note is kept for each, so phi is
/// unchanged. Cut sets are always derived from the paths.
class StructureFunction {
 public:
  StructureFunction(std::size_t n, std::vector<ComponentMask> paths);
  StructureFunction(std::size_t n, const std::vector<std::vector<std::size_t>>& paths);

  std::size_t size() const { return n_; }
  std::span<const ComponentMask> min_paths() const { return paths_; }
  /// Notes produced while canonicalizing (dropped paths).
  std::span<const std::string> canonicalization_notes() const { return notes_; }
  /// Components appearing in at least one path.
  ComponentMask relevant_components() const;

 private:
  std::size_t n_;
  std::vector<ComponentMask> paths_;
  std::vector<std::string> notes_;
};

/// How h(p) is computed: exactly, or with the product-over-paths expression
/// that treats paths as independent even when they share components.
enum class EvaluationMode { exact, paper_naive };

const char* to_string(EvaluationMode mode);
EvaluationMode parse_evaluation_mode(const std::string& text);

bool evaluate(const StructureFunction& phi, ComponentMask x);
bool evaluate(const StructureFunction& phi, const StateVector& x);

/// phi(1_i, x) - phi(0_i, x).
int delta(const StructureFunction& phi, ComponentId i, const StateVector& x);

/// All minimal cut sets (minimal hitting sets of the paths), sorted by size
/// then by mask value.
std::vector<ComponentMask> minimal_cuts(const StructureFunction& phi);

/// Series of parallel cuts: prod_k (1 - prod_{i in K_k} (1 - x_i)).
bool evaluate_by_cuts(std::span<const ComponentMask> cuts, ComponentMask x);

/// Signed inclusion-exclusion terms of h over distinct path unions:
/// h(p) = sum_U coefficient(U) * prod_{i in U} p_i.
struct UnionTerm {
  ComponentMask components;
  std::int64_t coefficient;
};
std::vector<UnionTerm> path_union_expansion(const StructureFunction& phi);

double reliability_enumeration(const StructureFunction& phi, const ReliabilityVector& p,
                               std::size_t cap = kDefaultEnumerationCap);
double reliability_inclusion_exclusion(const StructureFunction& phi, const ReliabilityVector& p,
                                       std::size_t cap = kDefaultEnumerationCap);

/// h(p) = E[phi(X)] for independent components, by vertex enumeration.
/// Throws CapExceeded when n > cap; use reliability_monte_carlo instead.
double reliability_exact(const StructureFunction& phi, const ReliabilityVector& p,
                         std::size_t cap = kDefaultEnumerationCap);

/// 1 - prod_k (1 - prod_{i in P_k} p_i), without merging shared components.
double reliability_paper_naive(const StructureFunction& phi, const ReliabilityVector& p);

double reliability(const StructureFunction& phi, const ReliabilityVector& p, EvaluationMode mode,
                   std::size_t cap = kDefaultEnumerationCap);

/// Sample-mean estimate of h(p); deterministic for a fixed seed.
double reliability_monte_carlo(const StructureFunction& phi, const ReliabilityVector& p,
                               std::uint64_t samples, std::uint64_t seed);

std::string format_mask(ComponentMask mask, std::span<const int> labels = {});

}  // namespace roadrel
