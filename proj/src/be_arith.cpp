#include "qlsq/be_arith.hpp"

#include <cmath>
#include <sstream>

#include "qlsq/poly.hpp"

namespace qlsq {

namespace {

constexpr int kExplicitLimitQubits = 10;

std::vector<Index> iota_map(Index n) {
  std::vector<Index> m(n);
  for (Index i = 0; i < n; ++i) m[i] = i;
  return m;
}

void merge_weights(std::map<std::string, double>& into,
                   const std::map<std::string, double>& from, double factor = 1.0) {
  for (const auto& [tag, weight] : from) into[tag] += factor * weight;
}

bool same_maps(const std::vector<Index>& a, const std::vector<Index>& b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin());
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Extends a unitary acting on the qubits named in `pos` (most significant
// first, matching the unitary's own ordering) to the full register.
Matrix embed_unitary(const Matrix& u, const std::vector<int>& pos, int totalQubits) {
  const Index dim = Index(1) << totalQubits;
  const int m = int(pos.size());
  std::vector<int> activeSlot(totalQubits, -1);
  for (int k = 0; k < m; ++k) activeSlot[pos[k]] = k;
  std::vector<Index> act(dim), idle(dim);
  for (Index i = 0; i < dim; ++i) {
    Index a = 0, s = 0;
    for (int p = 0; p < totalQubits; ++p) {
      const Index bit = (i >> (totalQubits - 1 - p)) & 1;
      if (activeSlot[p] >= 0)
        a |= bit << (m - 1 - activeSlot[p]);
      else
        s = (s << 1) | bit;
    }
    act[i] = a;
    idle[i] = s;
  }
  Matrix out = Matrix::Zero(dim, dim);
  for (Index i = 0; i < dim; ++i)
    for (Index j = 0; j < dim; ++j)
      if (idle[i] == idle[j]) out(i, j) = u(act[i], act[j]);
  return out;
}

std::vector<int> range_positions(int first, int count) {
  std::vector<int> pos(count);
  for (int k = 0; k < count; ++k) pos[k] = first + k;
  return pos;
}

// Spare-ancilla padding used when two encodings meet with different ancilla
// counts: idle qubits go in front, matching materialize_unitary.
Matrix pad_ancillas(const Matrix& u, int extraQubits) {
  if (extraQubits == 0) return u;
  return kron(Matrix(Matrix::Identity(Index(1) << extraQubits, Index(1) << extraQubits)), u);
}

double measured_norm(const BlockEncoding& be, double estimate) {
  if (estimate > 0) return estimate;
  double n = spectral_norm(encoded_block(be));
  if (n <= 0) throw PreconditionError("amplify: target norm is zero");
  return n;
}

}  // namespace

StatePrepUnitary make_state_prep(const RealVector& weights) {
  const Index m = weights.size();
  if (m < 1) throw PreconditionError("make_state_prep: empty weight vector");
  double total = 0.0;
  for (Index j = 0; j < m; ++j) {
    if (!(weights(j) > 0)) throw PreconditionError("make_state_prep: weights must be positive");
    total += weights(j);
  }
  const Index dim = next_pow2(m);
  Matrix col = Matrix::Zero(dim, 1);
  for (Index j = 0; j < m; ++j) col(j, 0) = std::sqrt(weights(j) / total);
  return StatePrepUnitary{weights, complete_isometry(col)};
}

BlockEncoding lcu(const std::vector<std::pair<double, BlockEncoding>>& terms,
                  const StatePrepUnitary& prep) {
  const int m = int(terms.size());
  if (m < 1) throw PreconditionError("lcu: no terms");
  if (prep.weights.size() != m) throw PreconditionError("lcu: weight/encoding count mismatch");

  const BlockEncoding& first = terms.front().second;
  double alpha = 0.0, eps = 0.0;
  int maxAnc = 0;
  for (const auto& [y, be] : terms) {
    if (!(y > 0)) throw PreconditionError("lcu: coefficients must be positive");
    if (be.systemQubits != first.systemQubits || be.logicalRows != first.logicalRows ||
        be.logicalCols != first.logicalCols || !same_maps(be.rowMap, first.rowMap) ||
        !same_maps(be.colMap, first.colMap))
      throw PreconditionError("lcu: incompatible dimensions");
    alpha += y * be.alpha;
    eps += y * be.epsilon;
    maxAnc = std::max(maxAnc, be.ancillaCount);
  }

  // The preparation must weight branch j by exactly y_j alpha_j.
  double total = 0.0;
  for (int j = 0; j < m; ++j) total += prep.weights(j);
  for (int j = 0; j < m; ++j) {
    const double want = terms[j].first * terms[j].second.alpha;
    if (std::abs(prep.weights(j) - want) > 1e-9 * std::max(1.0, want))
      throw PreconditionError("lcu: prep weights must equal y_j * alpha_j");
    const double amp = std::abs(prep.prep(j, 0));
    if (std::abs(amp - std::sqrt(prep.weights(j) / total)) > 1e-10)
      throw PreconditionError("lcu: prep amplitudes inconsistent with weights");
  }

  BlockEncoding out;
  out.block = Matrix::Zero(first.block.rows(), first.block.cols());
  for (const auto& [y, be] : terms) out.block += (y * be.alpha / alpha) * be.block;
  out.alpha = alpha;
  out.ancillaCount = maxAnc + int(std::ceil(std::log2(double(m))));
  out.epsilon = eps;
  out.systemQubits = first.systemQubits;
  out.logicalRows = first.logicalRows;
  out.logicalCols = first.logicalCols;
  out.rowMap = first.rowMap;
  out.colMap = first.colMap;
  for (const auto& [y, be] : terms) merge_weights(out.queryWeights, be.queryWeights);
  return out;
}

BlockEncoding lcu_pair(double y0, const BlockEncoding& be0, double y1, const BlockEncoding& be1) {
  if (!(y0 > 0) || !(y1 > 0)) throw PreconditionError("lcu_pair: coefficients must be positive");
  if (be0.systemQubits != be1.systemQubits || be0.logicalRows != be1.logicalRows ||
      be0.logicalCols != be1.logicalCols || !same_maps(be0.rowMap, be1.rowMap) ||
      !same_maps(be0.colMap, be1.colMap))
    throw PreconditionError("lcu_pair: incompatible dimensions");

  const double w0 = y0 * be0.alpha, w1 = y1 * be1.alpha;
  const double alpha = w0 + w1;
  const int maxAnc = std::max(be0.ancillaCount, be1.ancillaCount);

  BlockEncoding out;
  out.block = (w0 / alpha) * be0.block + (w1 / alpha) * be1.block;
  out.alpha = alpha;
  out.ancillaCount = 1 + maxAnc;
  out.epsilon = y0 * be0.epsilon + y1 * be1.epsilon;
  out.systemQubits = be0.systemQubits;
  out.logicalRows = be0.logicalRows;
  out.logicalCols = be0.logicalCols;
  out.rowMap = be0.rowMap;
  out.colMap = be0.colMap;
  out.queryWeights = be0.queryWeights;
  merge_weights(out.queryWeights, be1.queryWeights);

  // Rotate-select-unrotate with the explicit two-branch rotation; kept as a
  // full unitary whenever both inputs carry theirs and the result fits.
  const int total = 1 + maxAnc + out.systemQubits;
  if (be0.explicitUnitary && be1.explicitUnitary && total <= kExplicitLimitQubits) {
    const Index half = Index(1) << (maxAnc + out.systemQubits);
    Matrix rot(2, 2);
    rot << std::sqrt(w0 / alpha), -std::sqrt(w1 / alpha), std::sqrt(w1 / alpha),
        std::sqrt(w0 / alpha);
    Matrix select = Matrix::Zero(2 * half, 2 * half);
    select.topLeftCorner(half, half) =
        pad_ancillas(*be0.explicitUnitary, maxAnc - be0.ancillaCount);
    select.bottomRightCorner(half, half) =
        pad_ancillas(*be1.explicitUnitary, maxAnc - be1.ancillaCount);
    Matrix eye = Matrix::Identity(half, half);
    out.explicitUnitary =
        std::make_shared<const Matrix>(Matrix(kron(rot.adjoint(), eye) * select * kron(rot, eye)));
  }
  return out;
}

BlockEncoding product(const BlockEncoding& beA, const BlockEncoding& beB) {
  if (beA.logicalCols != beB.logicalRows || !same_maps(beA.colMap, beB.rowMap))
    throw PreconditionError("product: dimension mismatch");

  const int s = std::max(beA.systemQubits, beB.systemQubits);
  const Index p = Index(1) << s;
  const Matrix blockA = (beA.systemQubits == s) ? beA.block : pad_to(beA.block, p, p);
  const Matrix blockB = (beB.systemQubits == s) ? beB.block : pad_to(beB.block, p, p);

  BlockEncoding out;
  out.block = blockA * blockB;
  out.alpha = beA.alpha * beB.alpha;
  out.ancillaCount = beA.ancillaCount + beB.ancillaCount;
  out.epsilon = beA.alpha * beB.epsilon + beB.alpha * beA.epsilon;
  out.systemQubits = s;
  out.logicalRows = beA.logicalRows;
  out.logicalCols = beB.logicalCols;
  out.rowMap = beA.rowMap;
  out.colMap = beB.colMap;
  out.queryWeights = beA.queryWeights;
  merge_weights(out.queryWeights, beB.queryWeights);

  const int total = out.ancillaCount + s;
  if (beA.explicitUnitary && beB.explicitUnitary && beA.systemQubits == beB.systemQubits &&
      total <= kExplicitLimitQubits) {
    const int aA = beA.ancillaCount, aB = beB.ancillaCount;
    std::vector<int> posA = range_positions(0, aA), posB = range_positions(aA, aB);
    std::vector<int> sys = range_positions(aA + aB, s);
    posA.insert(posA.end(), sys.begin(), sys.end());
    posB.insert(posB.end(), sys.begin(), sys.end());
    out.explicitUnitary = std::make_shared<const Matrix>(
        Matrix(embed_unitary(*beA.explicitUnitary, posA, total) *
               embed_unitary(*beB.explicitUnitary, posB, total)));
  }
  return out;
}

BlockEncoding product_amplified(const BlockEncoding& beA, const BlockEncoding& beB, double delta,
                                double normA, double normB) {
  if (!(delta > 0)) throw PreconditionError("product_amplified: delta must be positive");
  const double nA = measured_norm(beA, normA);
  const double nB = measured_norm(beB, normB);
  const double boundA = delta / (4.0 * std::sqrt(2.0) * nB);
  const double boundB = delta / (4.0 * std::sqrt(2.0) * nA);
  if (beA.epsilon > boundA) {
    std::ostringstream msg;
    msg << "product_amplified: left epsilon " << beA.epsilon
        << " exceeds delta / (4 sqrt2 ||B||) = " << boundA;
    throw PreconditionError(msg.str());
  }
  if (beB.epsilon > boundB) {
    std::ostringstream msg;
    msg << "product_amplified: right epsilon " << beB.epsilon
        << " exceeds delta / (4 sqrt2 ||A||) = " << boundB;
    throw PreconditionError(msg.str());
  }

  BlockEncoding out = product(amplify(beA, 2.0 * boundA, nA), amplify(beB, 2.0 * boundB, nB));
  out.alpha = 2.0 * nA * nB;
  out.epsilon = delta;
  return out;
}

BlockEncoding tensor(const BlockEncoding& be1, const BlockEncoding& be2) {
  BlockEncoding out;
  out.block = kron(be1.block, be2.block);
  out.alpha = be1.alpha * be2.alpha;
  out.ancillaCount = be1.ancillaCount + be2.ancillaCount;
  out.epsilon = be1.alpha * be2.epsilon + be2.alpha * be1.epsilon + be1.epsilon * be2.epsilon;
  out.systemQubits = be1.systemQubits + be2.systemQubits;
  out.logicalRows = be1.logicalRows * be2.logicalRows;
  out.logicalCols = be1.logicalCols * be2.logicalCols;
  const Index p2 = Index(1) << be2.systemQubits;
  out.rowMap.resize(out.logicalRows);
  for (Index i = 0; i < out.logicalRows; ++i)
    out.rowMap[i] = be1.rowMap[i / be2.logicalRows] * p2 + be2.rowMap[i % be2.logicalRows];
  out.colMap.resize(out.logicalCols);
  for (Index j = 0; j < out.logicalCols; ++j)
    out.colMap[j] = be1.colMap[j / be2.logicalCols] * p2 + be2.colMap[j % be2.logicalCols];
  out.queryWeights = be1.queryWeights;
  merge_weights(out.queryWeights, be2.queryWeights);

  const int total = out.ancillaCount + out.systemQubits;
  if (be1.explicitUnitary && be2.explicitUnitary && total <= kExplicitLimitQubits) {
    const int a1 = be1.ancillaCount, a2 = be2.ancillaCount;
    std::vector<int> pos1 = range_positions(0, a1);
    std::vector<int> sys1 = range_positions(a1 + a2, be1.systemQubits);
    pos1.insert(pos1.end(), sys1.begin(), sys1.end());
    std::vector<int> pos2 = range_positions(a1, a2);
    std::vector<int> sys2 = range_positions(a1 + a2 + be1.systemQubits, be2.systemQubits);
    pos2.insert(pos2.end(), sys2.begin(), sys2.end());
    out.explicitUnitary = std::make_shared<const Matrix>(
        Matrix(embed_unitary(*be1.explicitUnitary, pos1, total) *
               embed_unitary(*be2.explicitUnitary, pos2, total)));
  }
  return out;
}

BlockEncoding augment(const BlockEncoding& beA, const BlockEncoding& beL, double lambda) {
  if (!(lambda > 0)) throw PreconditionError("augment: lambda must be positive");
  if (beA.logicalRows != beL.logicalRows || beA.logicalCols != beL.logicalCols ||
      !same_maps(beA.colMap, beL.colMap))
    throw PreconditionError("augment: dimension mismatch");

  const double rootLambda = std::sqrt(lambda);
  const int s = std::max(beA.systemQubits, beL.systemQubits);
  const Index p = Index(1) << s;
  const Matrix blockA = (beA.systemQubits == s) ? beA.block : pad_to(beA.block, p, p);
  const Matrix blockL = (beL.systemQubits == s) ? beL.block : pad_to(beL.block, p, p);

  BlockEncoding out;
  out.alpha = beA.alpha + rootLambda * beL.alpha;
  out.ancillaCount = std::max(beA.ancillaCount, beL.ancillaCount) + 2;
  out.epsilon = beA.epsilon + rootLambda * beL.epsilon;
  out.systemQubits = s + 1;
  out.block = Matrix::Zero(2 * p, 2 * p);
  out.block.topLeftCorner(p, p) = (beA.alpha / out.alpha) * blockA;
  out.block.block(p, 0, p, p) = (rootLambda * beL.alpha / out.alpha) * blockL;
  out.logicalRows = 2 * beA.logicalRows;
  out.logicalCols = 2 * beA.logicalCols;
  out.rowMap.resize(out.logicalRows);
  for (Index i = 0; i < beA.logicalRows; ++i) {
    out.rowMap[i] = beA.rowMap[i];
    out.rowMap[beA.logicalRows + i] = p + beL.rowMap[i];
  }
  out.colMap.resize(out.logicalCols);
  for (Index j = 0; j < beA.logicalCols; ++j) {
    out.colMap[j] = beA.colMap[j];
    out.colMap[beA.logicalCols + j] = p + beA.colMap[j];
  }
  out.queryWeights = beA.queryWeights;
  merge_weights(out.queryWeights, beL.queryWeights);
  return out;
}

BlockEncoding amplify(const BlockEncoding& be, double delta, double normEstimate) {
  if (!(delta > 0)) throw PreconditionError("amplify: delta must be positive");
  const double norm = measured_norm(be, normEstimate);
  if (be.epsilon > delta / 2.0) {
    std::ostringstream msg;
    msg << "amplify: epsilon " << be.epsilon << " exceeds delta / 2 = " << delta / 2.0;
    throw PreconditionError(msg.str());
  }

  // The realized polynomial is always tight (exact inputs come out at the
  // 1e-8 level no matter how loose delta is); delta only caps the claimed
  // epsilon and sets the charged cost.
  const double ratio = std::max(1.0, be.alpha / norm);
  const double tolRel = std::min(0.9, std::min(delta, 1e-8) / (2.0 * norm));
  ApproxPolynomial poly = amplify_poly(ratio, tolRel);

  SvdResult dec = svd(be.block);
  Vector vals = Vector::Zero(dec.singularValues.size());
  for (Index j = 0; j < vals.size(); ++j)
    vals(j) = eval(poly, std::min(dec.singularValues(j), 1.0));
  BlockEncoding out;
  out.block = dec.leftVectors * vals.asDiagonal() * dec.rightVectors.adjoint();
  out.alpha = std::sqrt(2.0) * norm;
  out.ancillaCount = be.ancillaCount + 1;
  out.epsilon = delta;
  out.systemQubits = be.systemQubits;
  out.logicalRows = be.logicalRows;
  out.logicalCols = be.logicalCols;
  out.rowMap = be.rowMap;
  out.colMap = be.colMap;
  const double charge = std::ceil((be.alpha / norm) * std::log(std::max(norm / delta, M_E)));
  out.queryWeights = be.queryWeights;
  for (auto& [tag, weight] : out.queryWeights) weight *= charge;
  return out;
}

}  // namespace qlsq
