#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "sft/grid_graph.hpp"
#include "sft/spectral_filter.hpp"

namespace sft {

/// Signature of chebyshev_responses; the property checks take it as a
/// parameter so a deliberately broken recurrence can be substituted.
using ResponseFn =
    std::function<FilterResponseStack(const LaplacianOperator&, const Matrix&, int)>;

/// chebyshev_responses with a dense leak added to every block k >= 1. Each
/// vertex receives a small multiple of the column sum, which breaks locality.
FilterResponseStack perturbed_chebyshev_responses(const LaplacianOperator& lap_tilde,
                                                  const Matrix& X, int order);

struct PropertyReport {
  std::string name;
  bool passed = false;
  int cases = 0;
  double worst = 0.0;  // largest observed error for the property
  double tolerance = 0.0;
  std::string detail;
};

/// Random lattice with n <= max_vertices covering all four patterns and
/// both weightings; every pattern's skip step fits the lattice.
GridGraph random_grid_graph(std::mt19937_64& rng, int max_vertices = 64);

/// apply_filter against the dense eigendecomposition oracle.
PropertyReport check_spectral_equivalence(std::uint64_t seed, int graphs, double tolerance,
                                          const ResponseFn& responses = chebyshev_responses);

/// T_k(L~) e_i vanishes beyond hop distance k, for all i and k < max_order.
PropertyReport check_khop_locality(std::uint64_t seed, int graphs, int max_order,
                                   double tolerance,
                                   const ResponseFn& responses = chebyshev_responses);

/// fit_ridge against an explicit-inverse normal-equations solve, plus the
/// first-order stationarity residual.
PropertyReport check_ridge_oracle(std::uint64_t seed, int instances, double tolerance,
                                  double stationarity_tolerance);

enum class FaultInjection { None, PerturbedRecurrence };

struct SelfTestOptions {
  std::uint64_t seed = 0;
  FaultInjection fault = FaultInjection::None;
};

std::vector<PropertyReport> run_selftest(const SelfTestOptions& options);

/// One "PASS|FAIL name ..." line per property.
std::string format_report(const std::vector<PropertyReport>& reports);

}  // namespace sft
