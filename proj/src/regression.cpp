#include "qlsq/regression.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "qlsq/be_arith.hpp"
#include "qlsq/solvers.hpp"

namespace qlsq {

namespace {

constexpr Index kMaxLogical = 16;

void check_problem(const RegressionProblem& p, const char* where) {
  if (p.A.size() == 0)
    throw PreconditionError(std::string(where) + ": data matrix is empty");
  if (!(p.lambda > 0.0))
    throw PreconditionError(std::string(where) + ": lambda must be positive");
  if (!(p.delta > 0.0) || p.delta >= 1.0)
    throw PreconditionError(std::string(where) + ": delta must lie in (0, 1)");
  if (p.A.rows() > kMaxLogical || p.A.cols() > kMaxLogical || p.L.rows() > kMaxLogical)
    throw PreconditionError(std::string(where) +
                            ": dimensions exceed the desk-scale cap of 16");
  if (p.L.size() == 0 || p.L.cols() != p.A.cols())
    throw PreconditionError(std::string(where) +
                            ": penalty must share the column count of the data");
  if (p.b.size() != p.A.rows())
    throw PreconditionError(std::string(where) +
                            ": right-hand side length must match the data rows");
  if (p.hasWeights()) {
    if (p.weights.size() != p.A.rows())
      throw PreconditionError(std::string(where) + ": weight count must match the data rows");
    if (p.weights.minCoeff() <= 0.0)
      throw PreconditionError(std::string(where) + ": nonpositive weight");
  }
  if (p.hasOmega() && (p.omega.rows() != p.A.rows() || p.omega.cols() != p.A.rows()))
    throw PreconditionError(std::string(where) +
                            ": covariance must be square with the data row count");
}

RealMatrix pad_rows(const RealMatrix& m, Index rows) {
  RealMatrix out = RealMatrix::Zero(rows, m.cols());
  out.topRows(m.rows()) = m;
  return out;
}

Matrix to_complex(const RealMatrix& m) { return m.cast<Complex>(); }

double tight_alpha(double norm) { return norm * (1.0 + 1e-12); }

double clamped_log(double x) { return std::max(1.0, std::log(x)); }

// Admissible input-encoding error at the inversion stage, with the implied
// constant fixed at 1/8.
double inversion_budget(double kappa, double delta) {
  const double l = clamped_log(kappa / delta);
  return 0.125 * delta / (kappa * kappa * kappa * l * l);
}

void check_budget(double eps, double bound, const std::string& pipeline,
                  const char* which) {
  if (eps <= bound) return;
  std::ostringstream os;
  os << pipeline << ": " << which << " encoding error " << eps
     << " exceeds the admissible bound " << bound;
  throw PreconditionError(os.str());
}

struct PenaltyInfo {
  double norm = 0.0;
  double cond = 1.0;  // effective condition over the nonzero spectrum
  bool good = false;  // full column rank: sigma_min > 0
};

PenaltyInfo penalty_info(const RealMatrix& L) {
  PenaltyInfo info;
  SvdResult dec = svd(to_complex(L));
  info.norm = dec.singularValues.size() ? dec.singularValues(0) : 0.0;
  if (info.norm <= 0.0) return info;
  info.cond = effective_condition_number(to_complex(L)).value;
  const Index full = L.cols();
  info.good = dec.singularValues.size() >= full &&
              dec.singularValues(full - 1) > kDefaultRankTol * info.norm;
  return info;
}

struct OmegaInfo {
  double norm = 0.0;
  double kappa = 1.0;
  RealMatrix invSqrt;  // Omega^{-1/2} in original units
  bool identity = false;
};

OmegaInfo omega_info(const RealMatrix& omega, const char* where) {
  if ((omega - omega.transpose()).cwiseAbs().maxCoeff() >
      1e-10 * (1.0 + omega.cwiseAbs().maxCoeff()))
    throw PreconditionError(std::string(where) +
                            ": covariance must be symmetric positive definite");
  Eigen::SelfAdjointEigenSolver<RealMatrix> eig(omega);
  const RealVector lam = eig.eigenvalues();
  if (lam(0) <= 0.0)
    throw PreconditionError(std::string(where) +
                            ": covariance must be symmetric positive definite");
  OmegaInfo info;
  info.norm = lam(lam.size() - 1);
  info.kappa = info.norm / lam(0);
  RealVector inv = lam.array().rsqrt();
  info.invSqrt = eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose();
  info.identity =
      (omega - RealMatrix::Identity(omega.rows(), omega.cols())).cwiseAbs().maxCoeff() < 1e-14;
  return info;
}

// Whitening (or weighting) transform for the problem's own augmented system.
RealMatrix problem_transform(const RegressionProblem& p, const char* where) {
  if (p.hasOmega()) return omega_info(p.omega, where).invSqrt;
  if (p.hasWeights()) return RealMatrix(p.weights.array().sqrt().matrix().asDiagonal());
  return RealMatrix::Identity(p.rows(), p.rows());
}

// Everything one invert run needs beyond the problem itself.
struct CoreInput {
  std::string pipeline;
  std::string formulaId;
  BlockEncoding data;
  BlockEncoding penalty;
  RealVector bTransformed;  // in the data encoding's logical row order
  long bPrepRounds = 1;
  // Oracle queries spent per preparation of the transformed right-hand side,
  // on top of the U_b call itself.
  std::map<std::string, double> bPrepQueryWeights;
  bool penaltyGood = true;
  ModifiedCondNumber mc;
  std::map<std::string, double> predictParams;
};

// Grid used to quantize the run condition number upward so the stage
// polynomials hit the construction cache across runs.
double quantize_up(double kappa) {
  const double step = std::log(1.05);
  return std::exp(std::ceil(std::log(kappa) / step) * step);
}

SolutionReport run_core(const RegressionProblem& p, CoreInput in) {
  const auto t0 = std::chrono::steady_clock::now();
  SolutionReport rep;
  rep.pipeline = in.pipeline;
  rep.rowsN = p.rows();
  rep.colsD = p.cols();
  rep.lambda = p.lambda;
  rep.residualS = residual_diagnostic(p);

  BlockEncoding aug = augment(in.data, in.penalty, p.lambda);
  const double nu = aug.alpha * spectral_norm(aug.block);
  if (!(nu > 0.0))
    throw PreconditionError(in.pipeline + ": data and penalty are both zero");
  BlockEncoding norm = reinterpreted(aug, nu);
  if (norm.alpha < 2.0) {
    BlockEncoding zero = zero_encoding(2.0 - norm.alpha, norm.systemQubits,
                                       norm.logicalRows, norm.logicalCols);
    zero.rowMap = norm.rowMap;
    zero.colMap = norm.colMap;
    norm = lcu_pair(1.0, norm, 1.0, zero);
    // The sum is 2 by construction; pin it so stage polynomials key on one
    // exact scale across runs.
    norm.alpha = 2.0;
  }

  rep.kappaMeasured = effective_condition_number(Matrix(norm.alpha * norm.block)).value;
  ModifiedCondNumber mc = in.mc;
  if (!in.penaltyGood || !(mc.kappa > 0.0)) mc.kappa = rep.kappaMeasured;
  rep.kappaReported = mc;
  const double kappaRun =
      quantize_up(std::max(mc.kappa, rep.kappaMeasured * (1.0 + 1e-9)));

  Vector bBlock = Vector::Zero(norm.blockDim());
  for (Index i = 0; i < in.bTransformed.size(); ++i)
    bBlock(norm.rowMap[i]) += in.bTransformed(i);
  // The right-hand side generally has a residual component outside the column
  // space; the solver only touches the part inside, and the residual shows up
  // in the success accounting below.
  SvdResult decNorm = svd(norm.block);
  const double sigmaCut =
      decNorm.singularValues.size() ? kDefaultRankTol * decNorm.singularValues(0) : 0.0;
  Vector bInSpan = Vector::Zero(norm.blockDim());
  for (Index k = 0; k < decNorm.singularValues.size(); ++k) {
    if (decNorm.singularValues(k) <= sigmaCut) continue;
    bInSpan += decNorm.leftVectors.col(k) * decNorm.leftVectors.col(k).dot(bBlock);
  }
  const double bNorm = bInSpan.norm();
  if (!(bNorm > 0.0))
    throw PreconditionError(in.pipeline +
                            ": right-hand side has no weight in the column space");
  StateVector bState = make_state(bInSpan / bNorm, {{"I", norm.systemQubits}});

  VtResult res = variable_time_invert(norm, bState, kappaRun, p.delta, p.maxQubits);

  // The flagged branch holds the pseudoinverse image in the bottom half of the
  // doubled system register; the first d logical columns carry the solution.
  const Index pDim = norm.blockDim();
  const Index base =
      ((Index(1) << res.stats.m) << norm.ancillaCount) * (2 * pDim) + pDim;
  const Index d = p.cols();
  Vector xLog(d);
  for (Index j = 0; j < d; ++j)
    xLog(j) = res.state.amplitudes(base + norm.colMap[j]);
  const double xNorm = xLog.norm();
  if (!(xNorm > 0.0))
    throw std::runtime_error(in.pipeline + ": solution register came back empty");
  xLog /= xNorm;
  const Index stateDim = std::max<Index>(2, next_pow2(d));
  Vector padded = Vector::Zero(stateDim);
  padded.head(d) = xLog;
  rep.quantumState = make_state(padded, {{"X", log2_exact(stateDim)}});

  rep.classicalSolution = classical_solution(p);
  const double cNorm = rep.classicalSolution.norm();
  Complex overlap = 0.0;
  for (Index j = 0; j < d; ++j)
    overlap += std::conj(xLog(j)) * Complex(rep.classicalSolution(j) / cNorm);
  rep.fidelity = std::norm(overlap);
  rep.traceDistance = std::sqrt(std::max(0.0, 1.0 - rep.fidelity));

  double rescale = 1.0;
  if (rep.residualS >= 0.5) {
    rep.residualRescaled = true;
    rescale = 1.0 / std::sqrt(std::max(1e-12, 1.0 - rep.residualS));
  }
  for (const auto& [tag, queries] : res.chargedQueries) {
    if (tag == "prepare_b")
      rep.costs.add("U_b", queries * double(in.bPrepRounds) * rescale);
    else
      rep.costs.add(tag, queries * rescale);
  }
  const double bPreps = double(2 * res.rounds + 1) * double(in.bPrepRounds);
  for (const auto& [tag, weight] : in.bPrepQueryWeights)
    rep.costs.add(tag, weight * bPreps * rescale);
  for (int j = 0; j < res.stats.m; ++j)
    rep.costs.recordDegree("cascade_stage_" + std::to_string(j + 1),
                           std::llround(res.stats.stopTimes(j)));
  rep.costs.recordDegree("cascade_total", std::llround(res.stats.maxTime));
  rep.costs.aaRounds = res.rounds;

  in.predictParams["kappa"] = mc.kappa;
  in.predictParams["delta"] = p.delta;
  in.predictParams["lambda"] = p.lambda;
  rep.predictedCost = predict(in.formulaId, in.predictParams);

  rep.wallTimeSeconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

SolutionReport ols_like(const RegressionProblem& p, const std::string& pipeline,
                        const std::string& formulaId,
                        std::map<std::string, double> extraParams) {
  check_problem(p, pipeline.c_str());
  const Index rows = std::max(p.A.rows(), p.L.rows());
  const RealMatrix ax = pad_rows(p.A, rows);
  const RealMatrix lx = pad_rows(p.L, rows);
  const double normA = spectral_norm(to_complex(ax));
  if (!(normA > 0.0)) throw PreconditionError(pipeline + ": data matrix is zero");
  BlockEncoding beA = encode_exact(to_complex(ax), tight_alpha(normA), "U_A");
  const PenaltyInfo pen = penalty_info(p.L);
  BlockEncoding beL;
  ModifiedCondNumber mc;
  if (pen.norm > 0.0) {
    beL = encode_exact(to_complex(lx), tight_alpha(pen.norm), "U_L");
    mc = modified_cond_number(p);
    const double bound = inversion_budget(mc.kappa, p.delta);
    check_budget(beA.epsilon, bound, pipeline, "data");
    check_budget(std::sqrt(p.lambda) * beL.epsilon, bound, pipeline, "penalty");
  } else {
    beL = zero_encoding(1.0, beA.systemQubits, beA.logicalRows, beA.logicalCols);
    beL.rowMap = beA.rowMap;
    beL.colMap = beA.colMap;
    mc.formulaKind = p.hasOmega() ? "GLS" : (p.hasWeights() ? "WLS" : "OLS");
  }

  CoreInput in;
  in.pipeline = pipeline;
  in.formulaId = formulaId;
  in.data = std::move(beA);
  in.penalty = std::move(beL);
  in.bTransformed = RealVector::Zero(rows);
  in.bTransformed.head(p.b.size()) = p.b;
  in.penaltyGood = pen.good;
  in.mc = mc;
  in.predictParams = std::move(extraParams);
  in.predictParams["alphaA"] = in.data.alpha;
  in.predictParams["alphaL"] = in.penalty.alpha;
  in.predictParams["normA"] = normA;
  in.predictParams["normL"] = pen.norm;
  return run_core(p, std::move(in));
}

}  // namespace

ModifiedCondNumber modified_cond_number(const RegressionProblem& problem) {
  check_problem(problem, "modified_cond_number");
  const double normA = spectral_norm(to_complex(problem.A));
  const PenaltyInfo pen = penalty_info(problem.L);
  if (!(pen.norm > 0.0))
    throw PreconditionError("modified_cond_number: penalty matrix is zero");
  const double rootLambda = std::sqrt(problem.lambda);
  ModifiedCondNumber out;
  double scale = 1.0;
  if (problem.hasOmega()) {
    const OmegaInfo om = omega_info(problem.omega, "modified_cond_number");
    scale = std::sqrt(om.kappa / om.norm);
    out.formulaKind = "GLS";
  } else if (problem.hasWeights()) {
    scale = std::sqrt(problem.weights.maxCoeff());
    out.formulaKind = "WLS";
  } else {
    out.formulaKind = "OLS";
  }
  out.kappa = pen.cond * (1.0 + scale * normA / (rootLambda * pen.norm));
  return out;
}

SolutionReport solve_ols_reg(const RegressionProblem& problem) {
  return ols_like(problem, "ols", "OLS-Thm", {});
}

SolutionReport solve_ridge(const RealMatrix& A, double lambda, const RealVector& b,
                           double delta) {
  RegressionProblem p;
  p.A = A;
  p.L = RealMatrix::Identity(A.cols(), A.cols());
  p.lambda = lambda;
  p.b = b;
  p.delta = delta;
  return ols_like(p, "ridge", "Ridge-Cor", {});
}

SolutionReport solve_wls_reg(const RegressionProblem& problem) {
  check_problem(problem, "wls");
  if (!problem.hasWeights())
    throw PreconditionError("wls: problem carries no weight vector");
  const double wMax = problem.weights.maxCoeff();
  const double wMin = problem.weights.minCoeff();
  if ((problem.weights.array() - 1.0).abs().maxCoeff() < 1e-14) {
    // Unit weights: literally the ordinary pipeline.
    const double normA = spectral_norm(to_complex(problem.A));
    return ols_like(problem, "wls", "WLS-Thm",
                    {{"alphaB", tight_alpha(normA)}, {"wMax", 1.0}});
  }

  const Index rows = std::max(problem.A.rows(), problem.L.rows());
  const RealMatrix ax = pad_rows(problem.A, rows);
  const RealMatrix lx = pad_rows(problem.L, rows);
  RealVector wx = RealVector::Ones(rows);
  wx.head(problem.weights.size()) = problem.weights;
  const double normA = spectral_norm(to_complex(ax));
  if (!(normA > 0.0)) throw PreconditionError("wls: data matrix is zero");
  const PenaltyInfo pen = penalty_info(problem.L);

  ModifiedCondNumber mc;
  double targetEps = 0.25 * problem.delta;
  if (pen.norm > 0.0) {
    mc = modified_cond_number(problem);
    // Size the weighted-data encoding against the inversion stage's budget in
    // the normalized frame.
    RealMatrix stack(rows + lx.rows(), problem.A.cols());
    stack.topRows(rows) = wx.array().sqrt().matrix().asDiagonal() * ax;
    stack.bottomRows(lx.rows()) = std::sqrt(problem.lambda) * lx;
    const double nuEst = spectral_norm(to_complex(stack));
    targetEps =
        0.2 * std::min(1.0, nuEst) * inversion_budget(mc.kappa, problem.delta);
  }
  BlockEncoding beB = build_sqrtW_A_encoding(wx, ax, targetEps);
  BlockEncoding beL;
  if (pen.norm > 0.0) {
    beL = encode_exact(to_complex(lx), tight_alpha(pen.norm), "U_L");
    const double bound = inversion_budget(mc.kappa, problem.delta);
    check_budget(beB.epsilon, bound, "wls", "weighted data");
    check_budget(std::sqrt(problem.lambda) * beL.epsilon, bound, "wls", "penalty");
  } else {
    beL = zero_encoding(1.0, beB.systemQubits, beB.logicalRows, beB.logicalCols);
    beL.rowMap = beB.rowMap;
    beL.colMap = beB.colMap;
    mc.formulaKind = "WLS";
  }

  CoreInput in;
  in.pipeline = "wls";
  in.formulaId = "WLS-Thm";
  in.predictParams = {{"alphaB", beB.alpha}, {"alphaL", beL.alpha},
                      {"normA", normA},      {"normL", pen.norm},
                      {"wMax", wMax}};
  in.data = std::move(beB);
  in.penalty = std::move(beL);
  in.bTransformed = RealVector::Zero(rows);
  in.bTransformed.head(problem.b.size()) =
      problem.weights.array().sqrt() * problem.b.array();
  in.bPrepRounds = long(std::ceil(std::sqrt(wMax / wMin)));
  in.penaltyGood = pen.good;
  in.mc = mc;
  return run_core(problem, std::move(in));
}

SolutionReport solve_gls_reg(const RegressionProblem& problem) {
  check_problem(problem, "gls");
  if (!problem.hasOmega())
    throw PreconditionError("gls: problem carries no covariance matrix");
  const OmegaInfo om = omega_info(problem.omega, "gls");
  if (om.identity) {
    // Unit covariance: literally the ordinary pipeline.
    return ols_like(problem, "gls", "GLS-Thm",
                    {{"alphaOmega", 2.0}, {"normOmega", 1.0}, {"kappaOmega", 1.0}});
  }

  const Index rows = std::max(problem.A.rows(), problem.L.rows());
  const Index side = std::max(rows, problem.A.cols());
  const RealMatrix ax = pad_rows(problem.A, side);
  const RealMatrix lx = pad_rows(problem.L, side);
  const double normA = spectral_norm(to_complex(ax));
  if (!(normA > 0.0)) throw PreconditionError("gls: data matrix is zero");
  const PenaltyInfo pen = penalty_info(problem.L);
  if (!(pen.norm > 0.0)) throw PreconditionError("gls: penalty matrix is zero");

  // Normalized covariance extended by the identity on the padding rows; its
  // inverse square root restricted to the data rows is the whitening matrix.
  RealMatrix omExt = RealMatrix::Identity(side, side);
  omExt.topLeftCorner(problem.A.rows(), problem.A.rows()) = problem.omega / om.norm;
  BlockEncoding encOmega = encode_exact(to_complex(omExt), 2.0, "U_Omega");
  BlockEncoding beA = encode_exact(to_complex(ax), tight_alpha(normA), "U_A");
  BlockEncoding beL = encode_exact(to_complex(lx), tight_alpha(pen.norm), "U_L");

  ModifiedCondNumber mc = modified_cond_number(problem);
  {
    // Admissible input errors, with the implied constant fixed at 1/8. The
    // covariance encoding is held to its bound in original units.
    const double l = clamped_log(mc.kappa / problem.delta);
    const double kcub = std::pow(mc.kappa, 3);
    const double boundA =
        0.125 * problem.delta * std::sqrt(om.norm) / (kcub * std::sqrt(om.kappa) * l * l);
    const double boundL =
        0.125 * problem.delta / (std::sqrt(problem.lambda) * kcub * l * l);
    const double boundOm =
        0.125 * problem.delta /
        (normA * kcub * std::pow(om.kappa, 1.5) * l * l * l *
         clamped_log(om.kappa / (normA * om.norm)));
    check_budget(beA.epsilon, boundA, "gls", "data");
    check_budget(beL.epsilon, boundL, "gls", "penalty");
    check_budget(encOmega.epsilon * om.norm, boundOm, "gls", "covariance");
  }

  // Internal accuracies sized against the inversion stage's budget in the
  // normalized frame, with headroom for the measured condition number landing
  // slightly above the formula value.
  const RealMatrix whitenedA = om.invSqrt * problem.A;
  RealMatrix stack(side + lx.rows(), problem.A.cols());
  stack.topRows(side) = pad_rows(whitenedA, side);
  stack.bottomRows(lx.rows()) = std::sqrt(problem.lambda) * lx;
  const double nuEst = spectral_norm(to_complex(stack));
  const double budget =
      0.4 * std::min(1.0, nuEst) * inversion_budget(mc.kappa, problem.delta);
  const double gammaProd = 0.5 * budget;
  const double deltaL = 0.5 * budget / std::sqrt(problem.lambda);
  const double normB = std::sqrt(om.kappa / om.norm);
  const double deltaHalf =
      0.9 * std::sqrt(om.norm) * gammaProd / (4.0 * std::sqrt(2.0) * normA);

  BlockEncoding halfNorm = neg_power_be(encOmega, 0.5, deltaHalf, om.kappa);
  BlockEncoding beWhiten = reinterpreted(halfNorm, std::sqrt(om.norm));
  BlockEncoding beBA = product_amplified(beWhiten, beA, gammaProd, normB, normA);
  BlockEncoding beLamp = amplify(beL, deltaL, pen.norm);

  CoreInput in;
  in.pipeline = "gls";
  in.formulaId = "GLS-Thm";
  in.predictParams = {{"alphaA", beA.alpha},
                      {"alphaL", beL.alpha},
                      {"alphaOmega", 2.0 * om.norm},
                      {"normA", normA},
                      {"normL", pen.norm},
                      {"normOmega", om.norm},
                      {"kappaOmega", om.kappa}};
  in.data = std::move(beBA);
  // Each preparation of the whitened right-hand side spends one application
  // of the inverse-root encoding on top of the U_b call.
  in.bPrepQueryWeights = beWhiten.queryWeights;
  in.penalty = std::move(beLamp);
  in.bTransformed = RealVector::Zero(side);
  in.bTransformed.head(problem.A.rows()) = om.invSqrt * problem.b;
  in.bPrepRounds = long(std::ceil(std::sqrt(om.kappa)));
  in.penaltyGood = pen.good;
  in.mc = mc;
  return run_core(problem, std::move(in));
}

BlockEncoding build_sqrtW_A_encoding(const RealVector& weights, const RealMatrix& A,
                                     double targetEps) {
  if (weights.size() != A.rows())
    throw PreconditionError("build_sqrtW_A_encoding: weight count must match the data rows");
  if (weights.size() == 0 || weights.minCoeff() <= 0.0)
    throw PreconditionError("build_sqrtW_A_encoding: nonpositive weight");
  if (!(targetEps > 0.0))
    throw PreconditionError("build_sqrtW_A_encoding: target precision must be positive");
  const double wMax = weights.maxCoeff();
  const double alpha = std::sqrt(wMax) * frobenius_norm(to_complex(A));
  if (!(alpha > 0.0)) throw PreconditionError("build_sqrtW_A_encoding: data matrix is zero");
  const RealMatrix scaled = weights.array().sqrt().matrix().asDiagonal() * A;
  BlockEncoding be = encode_exact(to_complex(scaled), alpha, "U_A");
  // The stored rows are exact; the declared error stands in for the requested
  // accuracy of the state-preparation pair.
  be.epsilon = std::max(be.epsilon, targetEps);
  return be;
}

WeightedState build_sqrtW_b_state(const RealVector& weights, const RealVector& b,
                                  double targetEps) {
  if (weights.size() != b.size())
    throw PreconditionError("build_sqrtW_b_state: weight count must match the vector");
  if (weights.size() == 0 || weights.minCoeff() <= 0.0)
    throw PreconditionError("build_sqrtW_b_state: nonpositive weight");
  if (!(targetEps > 0.0))
    throw PreconditionError("build_sqrtW_b_state: target precision must be positive");
  RealVector scaled = weights.array().sqrt() * b.array();
  const double norm = scaled.norm();
  if (!(norm > 0.0)) throw PreconditionError("build_sqrtW_b_state: vector has no weight");
  const Index dim = std::max<Index>(2, next_pow2(b.size()));
  Vector padded = Vector::Zero(dim);
  padded.head(b.size()) = (scaled / norm).cast<Complex>();
  WeightedState out;
  out.state = make_state(padded, {{"I", log2_exact(dim)}});
  out.rounds = long(std::ceil(std::sqrt(weights.maxCoeff() / weights.minCoeff())));
  return out;
}

RealVector classical_solution(const RegressionProblem& problem) {
  check_problem(problem, "classical_solution");
  const RealMatrix t = problem_transform(problem, "classical_solution");
  const RealMatrix ta = t * problem.A;
  const RealVector tb = t * problem.b;
  const Index d = problem.A.cols();

  const RealMatrix normalMat =
      ta.transpose() * ta + problem.lambda * problem.L.transpose() * problem.L;
  Eigen::SelfAdjointEigenSolver<RealMatrix> eig(normalMat);
  const RealVector lam = eig.eigenvalues();
  if (lam(0) <= kDefaultRankTol * std::max(1.0, lam(d - 1)))
    throw PreconditionError(
        "classical_solution: singular normal matrix; the penalty leaves the null space "
        "of the data unregularized");
  const RealVector viaNormal = normalMat.ldlt().solve(ta.transpose() * tb);

  RealMatrix stacked(ta.rows() + problem.L.rows(), d);
  stacked.topRows(ta.rows()) = ta;
  stacked.bottomRows(problem.L.rows()) = std::sqrt(problem.lambda) * problem.L;
  RealVector rhs = RealVector::Zero(stacked.rows());
  rhs.head(ta.rows()) = tb;
  const RealVector viaSvd =
      stacked.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(rhs);

  if ((viaNormal - viaSvd).norm() > 1e-9 * (1.0 + viaNormal.norm()))
    throw std::runtime_error(
        "classical_solution: normal-equation and stacked-SVD routes disagree");
  return viaNormal;
}

double residual_diagnostic(const RegressionProblem& problem) {
  check_problem(problem, "residual_diagnostic");
  const RealMatrix t = problem_transform(problem, "residual_diagnostic");
  RealMatrix stacked(problem.A.rows() + problem.L.rows(), problem.A.cols());
  stacked.topRows(problem.A.rows()) = t * problem.A;
  stacked.bottomRows(problem.L.rows()) = std::sqrt(problem.lambda) * problem.L;
  RealVector bt = RealVector::Zero(stacked.rows());
  bt.head(problem.A.rows()) = t * problem.b;
  const double bNorm = bt.norm();
  if (!(bNorm > 0.0)) return 1.0;

  SvdResult dec = svd(to_complex(stacked));
  double captured = 0.0;
  for (Index j = 0; j < dec.singularValues.size(); ++j) {
    if (dec.singularValues(j) <= kDefaultRankTol * dec.singularValues(0)) break;
    captured += std::norm(dec.leftVectors.col(j).dot(bt.cast<Complex>()));
  }
  return std::clamp(1.0 - captured / (bNorm * bNorm), 0.0, 1.0);
}

SpectrumCheck augmented_spectrum_check(const RealMatrix& A, const RealMatrix& L,
                                       double lambda) {
  if (!(lambda > 0.0))
    throw PreconditionError("augmented_spectrum_check: lambda must be positive");
  if (L.cols() != A.cols())
    throw PreconditionError(
        "augmented_spectrum_check: penalty must share the column count of the data");
  const double rootLambda = std::sqrt(lambda);
  const double normA = spectral_norm(to_complex(A));
  const PenaltyInfo pen = penalty_info(L);

  RealMatrix stacked(A.rows() + L.rows(), A.cols());
  stacked.topRows(A.rows()) = A;
  stacked.bottomRows(L.rows()) = rootLambda * L;
  SpectrumCheck out;
  out.measuredNorm = spectral_norm(to_complex(stacked));
  out.measuredKappa = effective_condition_number(to_complex(stacked)).value;
  out.normLower = std::max(normA, rootLambda * pen.norm);
  out.normUpper = normA + rootLambda * pen.norm;

  if (!pen.good) {
    out.checked = false;
    out.kappaBound = out.measuredKappa;
    out.notice =
        "penalty is not positive definite; bound check skipped and kappa taken from the "
        "measured augmented spectrum";
    return out;
  }
  out.checked = true;
  out.kappaBound = pen.cond * (1.0 + normA / (rootLambda * pen.norm));
  const double slack = 1e-9 * (1.0 + out.normUpper);
  if (out.measuredNorm < out.normLower - slack || out.measuredNorm > out.normUpper + slack)
    throw std::runtime_error("augmented_spectrum_check: measured norm escaped its bounds");
  if (out.measuredKappa > out.kappaBound * (1.0 + 1e-9))
    throw std::runtime_error(
        "augmented_spectrum_check: measured condition number exceeded its bound");
  return out;
}

}  // namespace qlsq
