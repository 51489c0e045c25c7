#pragma once

#include <iosfwd>
#include <string>

#include "qlsq/types.hpp"

namespace qlsq {

struct SvdResult {
  Matrix leftVectors;          // columns w_j, unitary
  RealVector singularValues;   // non-increasing, >= 0
  Matrix rightVectors;         // columns v_j, unitary
};

struct EffCondNumber {
  double value;          // sigma_max / smallest sigma above the tolerance
  double rankTolerance;  // relative to sigma_max
};

SvdResult svd(const Matrix& M);

double spectral_norm(const Matrix& M);
double frobenius_norm(const Matrix& M);

constexpr double kDefaultRankTol = 1e-10;

EffCondNumber effective_condition_number(const Matrix& M, double tol = kDefaultRankTol);

// Embeds B (padded with zeros to a power-of-two square) as the top-left block of a
// unitary of doubled dimension. Requires ||B|| <= 1 + 1e-12.
Matrix unitary_dilation(const Matrix& B);

// Zero-pads M to rows x cols.
Matrix pad_to(const Matrix& M, Index rows, Index cols);

// Text format: first line "rows cols", then one line per row. Entries are plain
// decimals or "(re,im)" pairs; commas outside parentheses are treated as blanks,
// so CSV layouts parse identically.
Matrix read_matrix(const std::string& path);
Matrix read_matrix(std::istream& in, const std::string& name);
void write_matrix(const std::string& path, const Matrix& M);
void write_matrix(std::ostream& out, const Matrix& M);

// A vector file is a rows x 1 (or 1 x cols) matrix.
Vector read_vector(const std::string& path);

}  // namespace qlsq
