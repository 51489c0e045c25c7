#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "qlsq/dense.hpp"
#include "qlsq/types.hpp"

namespace qlsq {

// An (alpha, a, epsilon) block encoding of a logicalRows x logicalCols matrix A.
// The full dilated unitary U acts on a + s qubits with A/alpha sitting (up to
// epsilon) in its top-left 2^s x 2^s corner. We keep that corner (`block`)
// plus the metadata; the full unitary is only stored when it is small enough
// to be useful, and can otherwise be rebuilt on demand by materialize_unitary.
struct BlockEncoding {
  Matrix block;  // 2^s x 2^s top-left corner of the dilated unitary
  double alpha = 1.0;
  int ancillaCount = 0;
  double epsilon = 0.0;
  int systemQubits = 0;
  Index logicalRows = 0;
  Index logicalCols = 0;
  std::vector<Index> rowMap;  // logical row index -> block row index
  std::vector<Index> colMap;  // logical col index -> block col index
  std::map<std::string, double> queryWeights;  // oracle tag -> queries per application
  std::shared_ptr<const Matrix> explicitUnitary;  // full 2^(s+a) unitary when kept

  Index blockDim() const { return block.rows(); }
  Index totalDim() const { return Index(1) << (systemQubits + ancillaCount); }
};

// Exact dilation of A/alpha; one ancilla qubit.
BlockEncoding encode_exact(const Matrix& A, double alpha, const std::string& oracleTag = "");

// Same as encode_exact but the unitary actually encodes A + E while the
// metadata still claims A; epsilon accounts for ||E||.
BlockEncoding encode_exact_perturbed(const Matrix& A, double alpha, const Matrix& E,
                                     const std::string& oracleTag = "");

// Simulated sparse-access model: alpha = sqrt(rowSparsity * colSparsity),
// built from the state-preparation pair with slack and padding branches.
BlockEncoding encode_sparse_oracle(const Matrix& A, int rowSparsity, int colSparsity,
                                   double targetEps, const std::string& oracleTag = "");

// Simulated quantum data structure: alpha = ||A||_F, ancillas ceil(log2(rows+cols)).
BlockEncoding encode_data_structure(const Matrix& A, double targetEps,
                                    const std::string& oracleTag = "");

// (1, 0, 0) encoding of the identity on `systemQubits` qubits.
BlockEncoding identity_encoding(int systemQubits);

// (alpha, 1, 0) encoding of the rows x cols zero matrix.
BlockEncoding zero_encoding(double alpha, int systemQubits, Index rows, Index cols);

// alpha * (logical sub-block): the matrix the encoding represents.
Matrix encoded_block(const BlockEncoding& be);

// Measured spectral deviation ||target - encoded_block(be)||.
double verify_encoding(const BlockEncoding& be, const Matrix& target);

// The same unitary read as an (alpha/c, a, epsilon/c) encoding of A/c.
BlockEncoding reinterpreted(const BlockEncoding& be, double c);

// Full 2^(s+a) unitary: the stored one if present, otherwise identity on the
// spare ancillas tensored with a fresh dilation of the block.
Matrix materialize_unitary(const BlockEncoding& be, int maxQubits = 12);

void write_block_encoding(const std::string& path, const BlockEncoding& be, int maxQubits = 12);
BlockEncoding read_block_encoding(const std::string& path);

// Extends a matrix with orthonormal columns to a full unitary (first columns preserved).
Matrix complete_isometry(const Matrix& isometryCols);

}  // namespace qlsq
