#include "qlsq/qsvt.hpp"

#include <cmath>

#include "qlsq/dense.hpp"

namespace qlsq {

namespace {

// Phase schedule of the alternating circuit equivalent to the scalar signal
// product with angles phi. One direction of the product alternates with its
// adjoint, and every slot adjacent to an adjoint absorbs a quarter turn.
RealVector circuit_phases(const RealVector& phi) {
  const int n = int(phi.size());
  RealVector out = phi;
  for (int j = 0; j < n; ++j)
    if (n % 2 == 0 || j >= 1) out(j) -= M_PI / 2.0;
  return out;
}

double circuit_sign(int n) {
  const int flips = (n % 2 == 1) ? (n - 1) / 2 : n / 2;
  return (flips % 2 == 0) ? 1.0 : -1.0;
}

// Top cornerDim rows of M e, where M = Ph_1 S_1 Ph_2 S_2 ... Ph_n S_n, the
// phase ops act as e^{+i phi} on the corner rows and e^{-i phi} elsewhere, and
// S_j alternates between the unitary and its adjoint ending on the unitary.
Matrix circuit_corner(const Matrix& u, Index cornerDim, const RealVector& ph) {
  const Index dim = u.rows();
  const int n = int(ph.size());
  Matrix y = Matrix::Zero(dim, cornerDim);
  y.topLeftCorner(cornerDim, cornerDim).setIdentity();
  const Matrix uAdj = u.adjoint();
  for (int j = n; j >= 1; --j) {
    y = (((j + n) % 2 == 0) ? u : uAdj) * y;
    const Complex ep = std::exp(Complex(0, ph(j - 1)));
    y.topRows(cornerDim) *= ep;
    y.bottomRows(dim - cornerDim) *= std::conj(ep);
  }
  return y.topRows(cornerDim);
}

}  // namespace

std::string qsvt_mode_name(QsvtMode m) {
  return m == QsvtMode::oracle ? "oracle" : "circuit";
}

QsvtMode qsvt_mode_from_name(const std::string& name) {
  if (name == "oracle") return QsvtMode::oracle;
  if (name == "circuit") return QsvtMode::circuit;
  throw PreconditionError("unknown transform mode: " + name);
}

QsvtApplication qsvt_apply(const BlockEncoding& be, const ApproxPolynomial& poly, QsvtMode mode) {
  if (poly.parity == Parity::none)
    throw PreconditionError("qsvt_apply: polynomial must have definite parity");
  if (poly.degree < 1) throw PreconditionError("qsvt_apply: need degree at least 1");
  if (admissible_sup(poly) > 1.0 + 1e-9)
    throw PreconditionError("qsvt_apply: polynomial exceeds the unit bound");
  const double blockNorm = spectral_norm(be.block);
  if (blockNorm > 0.5 + 1e-9)
    throw PreconditionError("qsvt_apply: encoded operator exceeds half the scale");

  const int n = poly.degree;
  const bool odd = (poly.parity == Parity::odd);
  const SvdResult dec = svd(be.block);
  const Index dim = be.blockDim();

  Matrix blockOut;
  if (mode == QsvtMode::oracle) {
    Vector fvals(dim);
    for (Index j = 0; j < dim; ++j)
      fvals(j) = eval_coeffs(poly.chebCoefficients, dec.singularValues(j));
    blockOut = odd ? Matrix(dec.leftVectors * fvals.asDiagonal() * dec.rightVectors.adjoint())
                   : Matrix(dec.rightVectors * fvals.asDiagonal() * dec.rightVectors.adjoint());
  } else {
    if (n > 32) throw PreconditionError("qsvt_apply: circuit mode is capped at degree 32");
    const Matrix ufull = materialize_unitary(be, 12);
    const PhaseSequence phi = qsp_angles(poly);
    const double sgn = circuit_sign(n);
    // Averaging the runs for phi and -phi keeps the real part of the scalar
    // transform, which is the polynomial itself.
    const Matrix plus = circuit_corner(ufull, dim, circuit_phases(phi.phases));
    const Matrix minus = circuit_corner(ufull, dim, circuit_phases(RealVector(-phi.phases)));
    blockOut = sgn * 0.5 * (plus + minus);
  }

  BlockEncoding out;
  out.block = blockOut;
  out.alpha = 1.0;
  out.ancillaCount = be.ancillaCount + 1;
  out.epsilon = 2.0 * n * be.epsilon / be.alpha + 1e-12 * (n + 1) +
                (mode == QsvtMode::circuit ? 2e-8 : 0.0);
  out.systemQubits = be.systemQubits;
  if (odd) {
    out.logicalRows = be.logicalRows;
    out.logicalCols = be.logicalCols;
    out.rowMap = be.rowMap;
    out.colMap = be.colMap;
  } else {
    out.logicalRows = be.logicalCols;
    out.logicalCols = be.logicalCols;
    out.rowMap = be.colMap;
    out.colMap = be.colMap;
  }
  out.queryWeights = be.queryWeights;
  for (auto& [tag, weight] : out.queryWeights) weight *= n;

  QsvtApplication app;
  app.input = be;
  app.poly = poly;
  app.mode = mode;
  app.output = std::move(out);
  app.chargedQueries = n;
  return app;
}

double qsvt_circuit_check(const BlockEncoding& be, const PhaseSequence& phi) {
  const int n = phi.degree();
  if (n < 1) throw PreconditionError("qsvt_circuit_check: need at least one phase");
  if (n > 32) throw PreconditionError("qsvt_circuit_check: capped at degree 32");
  const Matrix ufull = materialize_unitary(be, 12);
  const Index dim = be.blockDim();
  const Matrix corner =
      circuit_sign(n) * circuit_corner(ufull, dim, circuit_phases(phi.phases));

  const SvdResult dec = svd(be.block);
  Vector pvals(dim);
  for (Index j = 0; j < dim; ++j) pvals(j) = qsp_unitary(phi, dec.singularValues(j))(0, 0);
  const Matrix ref =
      (n % 2 == 1) ? Matrix(dec.leftVectors * pvals.asDiagonal() * dec.rightVectors.adjoint())
                   : Matrix(dec.rightVectors * pvals.asDiagonal() * dec.rightVectors.adjoint());
  return spectral_norm(corner - ref);
}

double svt_stability_bound(int degree, double midNorm, double deviation) {
  if (degree < 0) throw PreconditionError("svt_stability_bound: negative degree");
  if (deviation < 0) throw PreconditionError("svt_stability_bound: negative deviation");
  if (midNorm < 0 || midNorm >= 1)
    throw PreconditionError("svt_stability_bound: blocks must sit strictly inside radius 1");
  return degree * std::sqrt(2.0 / (1.0 - midNorm * midNorm)) * deviation;
}

}  // namespace qlsq
