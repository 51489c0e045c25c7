#pragma once

#include <string>

#include "qlsq/block_encoding.hpp"
#include "qlsq/cost.hpp"
#include "qlsq/state.hpp"

namespace qlsq {

// One regularized least-squares instance. Inputs are real; the boundary caps
// keep the simulated register sizes at desk scale. weights (diagonal of W) and
// omega are optional: empty means absent.
struct RegressionProblem {
  RealMatrix A;        // N x d data
  RealMatrix L;        // penalty, d columns
  double lambda = 0.0;
  RealVector b;        // length N
  RealVector weights;  // optional positive diagonal of W
  RealMatrix omega;    // optional SPD covariance, N x N
  double delta = 1e-3;
  int maxQubits = 22;

  Index rows() const { return A.rows(); }
  Index cols() const { return A.cols(); }
  bool hasWeights() const { return weights.size() > 0; }
  bool hasOmega() const { return omega.size() > 0; }
};

// The condition number the run is charged against; independent of kappa_A.
struct ModifiedCondNumber {
  double kappa = 0.0;
  std::string formulaKind;  // OLS, WLS, or GLS
};

ModifiedCondNumber modified_cond_number(const RegressionProblem& problem);

struct SolutionReport {
  std::string pipeline;  // ols, ridge, wls, gls
  Index rowsN = 0;
  Index colsD = 0;
  double lambda = 0.0;
  StateVector quantumState;       // normalized |x> on the logical register
  RealVector classicalSolution;   // dense closed form
  double fidelity = 0.0;          // |<x_classical | x_quantum>|^2
  double traceDistance = 0.0;
  double residualS = 0.0;
  bool residualRescaled = false;  // S >= 1/2: success accounting rescaled
  ModifiedCondNumber kappaReported;
  double kappaMeasured = 0.0;
  CostLedger costs;
  CostPrediction predictedCost;
  double wallTimeSeconds = 0.0;
};

SolutionReport solve_ols_reg(const RegressionProblem& problem);
SolutionReport solve_ridge(const RealMatrix& A, double lambda, const RealVector& b,
                           double delta);
SolutionReport solve_wls_reg(const RegressionProblem& problem);
SolutionReport solve_gls_reg(const RegressionProblem& problem);

// Encoding of sqrt(W) A with alpha = sqrt(w_max) ||A||_F, the data-structure
// sub-normalization; block entry (j, k) is sqrt(w_j / w_max) A_jk / ||A||_F.
BlockEncoding build_sqrtW_A_encoding(const RealVector& weights, const RealMatrix& A,
                                     double targetEps);

// Normalized sqrt(W) b plus the amplification rounds charged to prepare it.
struct WeightedState {
  StateVector state;
  long rounds = 0;
};
WeightedState build_sqrtW_b_state(const RealVector& weights, const RealVector& b,
                                  double targetEps);

// Dense closed form through two independent routes (normal equations and a
// stacked least-squares SVD); the oracle every fidelity figure is checked
// against.
RealVector classical_solution(const RegressionProblem& problem);

// Normalized residual sum of squares S = 1 - ||proj_col(A_L) (b, 0)||^2 for
// the problem's own augmented matrix (weighted or whitened when applicable).
double residual_diagnostic(const RegressionProblem& problem);

struct SpectrumCheck {
  double normLower = 0.0;    // max(||A||, sqrt(lambda) ||L||)
  double normUpper = 0.0;    // ||A|| + sqrt(lambda) ||L||
  double kappaBound = 0.0;
  double measuredNorm = 0.0;
  double measuredKappa = 0.0;
  bool checked = false;      // false when L is not positive definite
  std::string notice;
};

// Measures the augmented spectrum against the stated bounds; skipped with a
// notice when L is not positive definite (kappaBound then echoes the measured
// value).
SpectrumCheck augmented_spectrum_check(const RealMatrix& A, const RealMatrix& L,
                                       double lambda);

}  // namespace qlsq
