#pragma once

#include "sdof/model.hpp"
#include "sdof/precoding.hpp"
#include "sdof/rational.hpp"

#include <functional>
#include <string>
#include <vector>

namespace sdof {

struct SchemeSpec;

struct MiResult {
  double bits = 0.0;
  double standard_error = 0.0;  // zero for closed forms
  std::string conditioning;
  double power = 0.0;
};

/// I(secret; y_node | known) for unit-variance Gaussian symbols and unit
/// observation noise: log2det(I + P M_all M_all^H) - log2det(I + P M_nuis M_nuis^H),
/// evaluated from singular values so it stays finite at P = 2^60.
MiResult gaussian_mi(const EffectiveLinearSystem& system, Node node, const std::vector<std::string>& secret,
                     const PowerBudget& power, const std::vector<std::string>& known = {});

/// gaussian_mi with the node's intended messages as the secret.
MiResult achievable_rate(const EffectiveLinearSystem& system, Node node, const PowerBudget& power);

/// Largest leakage over the spec's adversaries (0 when it protects nothing).
double leakage_bits(const SchemeSpec& spec, const EffectiveLinearSystem& system, const PowerBudget& power);

struct SlopeEstimate {
  double slope = 0.0;
  double intercept = 0.0;
  std::vector<double> power_grid;
  double residual = 0.0;  // RMS of the fit
};

std::vector<double> default_power_grid();
std::vector<double> power_grid_from_exponents(const std::vector<int>& exponents);

/// Least-squares slope of metric(P)/slots against log2 P.
SlopeEstimate estimate_slope(const std::function<double(double)>& metric, const Rational& slots,
                             const std::vector<double>& grid = default_power_grid());

/// Sample-average estimate of the same mutual information: draws symbols,
/// nuisance and noise, and averages log p(y|s) - log p(y).
MiResult mc_mi_oracle(const EffectiveLinearSystem& system, Node node, const std::vector<std::string>& secret,
                      const PowerBudget& power, int n_samples, std::uint64_t seed);

inline constexpr int kMcMaxDimension = 8;

/// Wraps a bare gain matrix as a one-node system (columns named s0, s1, ...).
EffectiveLinearSystem system_from_matrix(Node node, const Eigen::MatrixXcd& gain);

enum class SymmetryInput : std::uint8_t { White, Zero, Correlated };

struct SymmetryOptions {
  SymmetryInput input = SymmetryInput::White;
  int slots = 1;
  bool twin_equals_actual = false;
};

struct SymmetryReport {
  double entropy_actual = 0.0;  // bits, averaged over channel draws
  double entropy_twin = 0.0;
  double abs_gap = 0.0;
  double standard_error = 0.0;  // of the gap
};

/// Conditional output entropy of the eavesdropper-side row versus an
/// independently drawn, identically distributed twin row, for Gaussian
/// inputs, by closed-form log-det averaged over n_trials channel draws.
SymmetryReport check_output_symmetry(const Topology& topology, int n_trials, std::uint64_t seed,
                                     const SymmetryOptions& options = {});

}  // namespace sdof
