#include "qlsq/block_encoding.hpp"

#include <cmath>
#include <complex>
#include <fstream>
#include <sstream>

namespace qlsq {

namespace {

constexpr int kExplicitLimitQubits = 10;

std::vector<Index> iota_map(Index n) {
  std::vector<Index> m(n);
  for (Index i = 0; i < n; ++i) m[i] = i;
  return m;
}

std::map<std::string, double> tag_weights(const std::string& tag) {
  std::map<std::string, double> w;
  if (!tag.empty()) w[tag] = 1.0;
  return w;
}

// Small roundoff allowance claimed by exact constructors so the soundness
// invariant verify <= epsilon holds with a strictly positive claim.
double roundoff_floor(double alpha, Index dim) {
  return alpha * static_cast<double>(dim) * 1e-13;
}

}  // namespace

Matrix complete_isometry(const Matrix& isometryCols) {
  const Index n = isometryCols.rows();
  const Index k = isometryCols.cols();
  if (k > n) throw PreconditionError("complete_isometry: more columns than rows");
  Eigen::HouseholderQR<Matrix> qr(isometryCols);
  Matrix q = qr.householderQ();
  Matrix r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  for (Index i = 0; i < k; ++i) {
    Complex d = r(i, i);
    if (std::abs(d) < 1e-12) throw PreconditionError("complete_isometry: columns not independent");
    q.col(i) *= d / std::abs(d);
  }
  // With orthonormal input columns R is diagonal up to roundoff, so the phase
  // fix above restores them exactly; enforce that before returning.
  if ((q.leftCols(k) - isometryCols).cwiseAbs().maxCoeff() > 1e-9)
    throw PreconditionError("complete_isometry: input columns not orthonormal");
  q.leftCols(k) = isometryCols;
  return q;
}

BlockEncoding encode_exact_perturbed(const Matrix& A, double alpha, const Matrix& E,
                                     const std::string& oracleTag) {
  if (A.rows() < 1 || A.cols() < 1) throw PreconditionError("encode_exact: empty matrix");
  if (E.rows() != A.rows() || E.cols() != A.cols())
    throw PreconditionError("encode_exact: perturbation shape mismatch");
  Matrix target = A + E;
  double nrm = spectral_norm(target);
  if (alpha < nrm * (1 - 1e-12))
    throw PreconditionError("encode_exact: alpha below the spectral norm of the target");
  const Index p = next_pow2(std::max(A.rows(), A.cols()));
  BlockEncoding be;
  be.block = pad_to(target, p, p) / alpha;
  be.alpha = alpha;
  be.ancillaCount = 1;
  be.epsilon = roundoff_floor(alpha, p) + spectral_norm(E);
  be.systemQubits = log2_exact(p);
  be.logicalRows = A.rows();
  be.logicalCols = A.cols();
  be.rowMap = iota_map(A.rows());
  be.colMap = iota_map(A.cols());
  be.queryWeights = tag_weights(oracleTag);
  if (be.systemQubits + 1 <= kExplicitLimitQubits)
    be.explicitUnitary = std::make_shared<const Matrix>(unitary_dilation(be.block));
  return be;
}

BlockEncoding encode_exact(const Matrix& A, double alpha, const std::string& oracleTag) {
  return encode_exact_perturbed(A, alpha, Matrix::Zero(A.rows(), A.cols()), oracleTag);
}

BlockEncoding encode_sparse_oracle(const Matrix& A, int rowSparsity, int colSparsity,
                                   double targetEps, const std::string& oracleTag) {
  const Index n = A.rows(), d = A.cols();
  if (n < 1 || d < 1) throw PreconditionError("encode_sparse_oracle: empty matrix");
  if (rowSparsity < 1 || colSparsity < 1)
    throw PreconditionError("encode_sparse_oracle: sparsity bounds must be positive");
  for (Index i = 0; i < n; ++i) {
    Index nz = 0;
    for (Index j = 0; j < d; ++j)
      if (std::abs(A(i, j)) > 0) ++nz;
    if (nz > rowSparsity) throw PreconditionError("encode_sparse_oracle: row sparsity violated");
  }
  for (Index j = 0; j < d; ++j) {
    Index nz = 0;
    for (Index i = 0; i < n; ++i)
      if (std::abs(A(i, j)) > 0) ++nz;
    if (nz > colSparsity) throw PreconditionError("encode_sparse_oracle: column sparsity violated");
  }
  if (A.cwiseAbs().maxCoeff() > 1.0 + 1e-12)
    throw PreconditionError("encode_sparse_oracle: entries must satisfy |a_ij| <= 1");

  const Index p = next_pow2(std::max(n, d));
  const Index full = 4 * p * p;  // branch register (4) x index register (p) x index register (p)
  auto idx = [p](Index branch, Index mid, Index last) { return (branch * p + mid) * p + last; };

  // Row states: sqrt-amplitude spread of row i over branch 0, slack on branch 1,
  // padding rows parked on branch 3. Column states mirror this with slack on
  // branch 2 and padding on branch 2 with a distinct middle label. The only
  // overlaps between the two families are the branch-0 terms, whose inner
  // products reproduce a_ij / sqrt(s_r s_c).
  Matrix psi = Matrix::Zero(full, p);
  Matrix phi = Matrix::Zero(full, p);
  for (Index i = 0; i < p; ++i) {
    if (i >= n) {
      psi(idx(3, i, 0), i) = 1.0;
      continue;
    }
    double mass = 0.0;
    for (Index j = 0; j < d; ++j) {
      Complex a = A(i, j);
      if (std::abs(a) == 0.0) continue;
      psi(idx(0, i, j), i) = std::conj(std::sqrt(a)) / std::sqrt(double(rowSparsity));
      mass += std::abs(a) / rowSparsity;
    }
    if (mass < 1.0 - 1e-15) psi(idx(1, i, 0), i) = std::sqrt(std::max(0.0, 1.0 - mass));
  }
  for (Index j = 0; j < p; ++j) {
    if (j >= d) {
      phi(idx(2, 1, j), j) = 1.0;
      continue;
    }
    double mass = 0.0;
    for (Index i = 0; i < n; ++i) {
      Complex a = A(i, j);
      if (std::abs(a) == 0.0) continue;
      phi(idx(0, i, j), j) = std::sqrt(a) / std::sqrt(double(colSparsity));
      mass += std::abs(a) / colSparsity;
    }
    if (mass < 1.0 - 1e-15) phi(idx(2, 0, j), j) = std::sqrt(std::max(0.0, 1.0 - mass));
  }

  BlockEncoding be;
  be.block = psi.adjoint() * phi;
  be.alpha = std::sqrt(double(rowSparsity) * double(colSparsity));
  be.ancillaCount = 2 + log2_exact(p);
  be.systemQubits = log2_exact(p);
  be.epsilon = targetEps;
  be.logicalRows = n;
  be.logicalCols = d;
  be.rowMap = iota_map(n);
  be.colMap = iota_map(d);
  be.queryWeights = tag_weights(oracleTag);
  if (be.systemQubits + be.ancillaCount <= kExplicitLimitQubits) {
    Matrix ur = complete_isometry(psi);
    Matrix ul = complete_isometry(phi);
    be.explicitUnitary = std::make_shared<const Matrix>(Matrix(ur.adjoint() * ul));
  }
  double measured = verify_encoding(be, A);
  if (measured > targetEps)
    throw PreconditionError("encode_sparse_oracle: measured error exceeds the requested bound");
  return be;
}

BlockEncoding encode_data_structure(const Matrix& A, double targetEps,
                                    const std::string& oracleTag) {
  const Index n = A.rows(), d = A.cols();
  if (n < 1 || d < 1) throw PreconditionError("encode_data_structure: empty matrix");
  double fro = frobenius_norm(A);
  if (fro == 0.0) throw PreconditionError("encode_data_structure: zero matrix");

  const Index p = next_pow2(std::max(n, d));
  const Index q = next_pow2(n + d);
  const Index full = q * p;
  auto idx = [p](Index first, Index second) { return first * p + second; };

  // psi_i spreads the conjugated row i over the second register; phi_j carries
  // the row-norm profile against a fixed second label j. Padding states sit on
  // first-register labels >= n (rows) and second labels >= d (columns) and are
  // orthogonal to everything logical.
  Matrix psi = Matrix::Zero(full, p);
  Matrix phi = Matrix::Zero(full, p);
  for (Index i = 0; i < p; ++i) {
    if (i >= n) {
      psi(idx(i, 0), i) = 1.0;
      continue;
    }
    double rowNorm = A.row(i).norm();
    if (rowNorm == 0.0) {
      psi(idx(i, 0), i) = 1.0;
      continue;
    }
    for (Index j = 0; j < d; ++j) psi(idx(i, j), i) = std::conj(A(i, j)) / rowNorm;
  }
  for (Index j = 0; j < p; ++j) {
    if (j >= d) {
      phi(idx(0, j), j) = 1.0;
      continue;
    }
    for (Index i = 0; i < n; ++i) phi(idx(i, j), j) = A.row(i).norm() / fro;
  }

  BlockEncoding be;
  be.block = psi.adjoint() * phi;
  be.alpha = fro;
  be.ancillaCount = log2_exact(q);
  be.systemQubits = log2_exact(p);
  be.epsilon = targetEps;
  be.logicalRows = n;
  be.logicalCols = d;
  be.rowMap = iota_map(n);
  be.colMap = iota_map(d);
  be.queryWeights = tag_weights(oracleTag);
  if (be.systemQubits + be.ancillaCount <= kExplicitLimitQubits) {
    Matrix ur = complete_isometry(psi);
    Matrix ul = complete_isometry(phi);
    be.explicitUnitary = std::make_shared<const Matrix>(Matrix(ur.adjoint() * ul));
  }
  double measured = verify_encoding(be, A);
  if (measured > targetEps)
    throw PreconditionError("encode_data_structure: measured error exceeds the requested bound");
  return be;
}

BlockEncoding identity_encoding(int systemQubits) {
  const Index p = Index(1) << systemQubits;
  BlockEncoding be;
  be.block = Matrix::Identity(p, p);
  be.alpha = 1.0;
  be.ancillaCount = 0;
  be.epsilon = 0.0;
  be.systemQubits = systemQubits;
  be.logicalRows = p;
  be.logicalCols = p;
  be.rowMap = iota_map(p);
  be.colMap = iota_map(p);
  be.explicitUnitary = std::make_shared<const Matrix>(Matrix(Matrix::Identity(p, p)));
  return be;
}

BlockEncoding zero_encoding(double alpha, int systemQubits, Index rows, Index cols) {
  const Index p = Index(1) << systemQubits;
  if (rows > p || cols > p) throw PreconditionError("zero_encoding: logical shape too large");
  if (alpha <= 0) throw PreconditionError("zero_encoding: alpha must be positive");
  BlockEncoding be;
  be.block = Matrix::Zero(p, p);
  be.alpha = alpha;
  be.ancillaCount = 1;
  be.epsilon = 0.0;
  be.systemQubits = systemQubits;
  be.logicalRows = rows;
  be.logicalCols = cols;
  be.rowMap = iota_map(rows);
  be.colMap = iota_map(cols);
  if (systemQubits + 1 <= kExplicitLimitQubits)
    be.explicitUnitary = std::make_shared<const Matrix>(unitary_dilation(be.block));
  return be;
}

Matrix encoded_block(const BlockEncoding& be) {
  Matrix out(be.logicalRows, be.logicalCols);
  for (Index i = 0; i < be.logicalRows; ++i)
    for (Index j = 0; j < be.logicalCols; ++j)
      out(i, j) = be.alpha * be.block(be.rowMap[i], be.colMap[j]);
  return out;
}

double verify_encoding(const BlockEncoding& be, const Matrix& target) {
  if (target.rows() != be.logicalRows || target.cols() != be.logicalCols)
    throw PreconditionError("verify_encoding: target shape mismatch");
  return spectral_norm(Matrix(target - encoded_block(be)));
}

BlockEncoding reinterpreted(const BlockEncoding& be, double c) {
  if (c <= 0) throw PreconditionError("reinterpreted: scale must be positive");
  BlockEncoding out = be;
  out.alpha = be.alpha / c;
  out.epsilon = be.epsilon / c;
  return out;
}

Matrix materialize_unitary(const BlockEncoding& be, int maxQubits) {
  if (be.explicitUnitary) return *be.explicitUnitary;
  const int total = be.systemQubits + be.ancillaCount;
  if (total > maxQubits)
    throw PreconditionError("materialize_unitary: dilated unitary exceeds the qubit cap");
  if (be.ancillaCount == 0) {
    if ((be.block.adjoint() * be.block - Matrix::Identity(be.blockDim(), be.blockDim())).norm() >
        1e-8)
      throw PreconditionError("materialize_unitary: ancilla-free encoding with non-unitary block");
    return be.block;
  }
  Matrix dil = unitary_dilation(be.block);
  const Index spare = Index(1) << (be.ancillaCount - 1);
  if (spare == 1) return dil;
  Matrix full = Matrix::Zero(spare * dil.rows(), spare * dil.rows());
  for (Index k = 0; k < spare; ++k)
    full.block(k * dil.rows(), k * dil.rows(), dil.rows(), dil.rows()) = dil;
  return full;
}

void write_block_encoding(const std::string& path, const BlockEncoding& be, int maxQubits) {
  Matrix u = materialize_unitary(be, maxQubits);
  // Fold the logical index maps into the system register so the file format
  // needs no separate map section: conjugate by permutations that move the
  // mapped rows/columns to the leading positions.
  const Index p = be.blockDim();
  auto fold = [p](const std::vector<Index>& map) {
    std::vector<Index> perm(p, -1);
    std::vector<bool> used(p, false);
    for (Index i = 0; i < Index(map.size()); ++i) {
      perm[i] = map[i];
      used[map[i]] = true;
    }
    Index next = 0;
    for (Index i = Index(map.size()); i < p; ++i) {
      while (used[next]) ++next;
      perm[i] = next;
      used[next] = true;
    }
    return perm;
  };
  std::vector<Index> rp = fold(be.rowMap), cp = fold(be.colMap);
  const Index anc = u.rows() / p;
  Matrix folded(u.rows(), u.cols());
  for (Index a = 0; a < anc; ++a)
    for (Index b = 0; b < anc; ++b)
      for (Index i = 0; i < p; ++i)
        for (Index j = 0; j < p; ++j)
          folded(a * p + i, b * p + j) = u(a * p + rp[i], b * p + cp[j]);

  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out.precision(17);
  out << be.alpha << ' ' << be.ancillaCount << ' ' << be.epsilon << ' ' << be.systemQubits << ' '
      << be.logicalRows << ' ' << be.logicalCols << '\n';
  write_matrix(out, folded);
  if (!out) throw IoError("write failed: " + path);
}

BlockEncoding read_block_encoding(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path);
  std::string header;
  if (!std::getline(in, header)) throw IoError("missing header: " + path);
  std::istringstream hs(header);
  BlockEncoding be;
  if (!(hs >> be.alpha >> be.ancillaCount >> be.epsilon >> be.systemQubits >> be.logicalRows >>
        be.logicalCols))
    throw IoError("malformed header: " + path);
  if (be.alpha <= 0 || be.ancillaCount < 0 || be.epsilon < 0 || be.systemQubits < 0 ||
      be.systemQubits + be.ancillaCount > 30)
    throw IoError("invalid metadata: " + path);
  Matrix u = read_matrix(in, path);
  if (u.rows() != u.cols() || u.rows() != be.totalDim())
    throw IoError("unitary dimension disagrees with header: " + path);
  if ((u.adjoint() * u - Matrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff() > 1e-10)
    throw IoError("stored matrix is not unitary: " + path);
  const Index p = Index(1) << be.systemQubits;
  if (be.logicalRows < 1 || be.logicalRows > p || be.logicalCols < 1 || be.logicalCols > p)
    throw IoError("logical shape out of range: " + path);
  be.block = u.topLeftCorner(p, p);
  be.rowMap = iota_map(be.logicalRows);
  be.colMap = iota_map(be.logicalCols);
  be.explicitUnitary = std::make_shared<const Matrix>(std::move(u));
  return be;
}

}  // namespace qlsq
