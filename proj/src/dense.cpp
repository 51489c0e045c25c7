#include "qlsq/dense.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace qlsq {

SvdResult svd(const Matrix& M) {
  if (!M.allFinite()) throw PreconditionError("svd: matrix has non-finite entries");
  Eigen::JacobiSVD<Matrix> dec(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  SvdResult r{dec.matrixU(), dec.singularValues(), dec.matrixV()};
  const double scale = std::max(1.0, r.singularValues.size() ? r.singularValues(0) : 0.0);
  Matrix recon = r.leftVectors.leftCols(r.singularValues.size()) *
                 r.singularValues.asDiagonal() *
                 r.rightVectors.leftCols(r.singularValues.size()).adjoint();
  if ((recon - M).norm() > 1e-9 * scale * std::sqrt(double(M.size()) + 1.0))
    throw std::runtime_error("svd: decomposition failed to reconstruct input");
  return r;
}

double spectral_norm(const Matrix& M) {
  if (M.size() == 0) return 0.0;
  if (!M.allFinite()) throw PreconditionError("spectral_norm: non-finite entries");
  Eigen::JacobiSVD<Matrix> dec(M);
  return dec.singularValues().size() ? dec.singularValues()(0) : 0.0;
}

double frobenius_norm(const Matrix& M) {
  if (!M.allFinite()) throw PreconditionError("frobenius_norm: non-finite entries");
  return M.norm();
}

EffCondNumber effective_condition_number(const Matrix& M, double tol) {
  SvdResult r = svd(M);
  const double smax = r.singularValues.size() ? r.singularValues(0) : 0.0;
  if (smax <= 0.0)
    throw PreconditionError("effective_condition_number: all-zero matrix has no nonzero singular values");
  double smin = smax;
  for (Index i = 0; i < r.singularValues.size(); ++i) {
    const double s = r.singularValues(i);
    if (s > tol * smax) smin = s;
  }
  return EffCondNumber{smax / smin, tol};
}

Matrix pad_to(const Matrix& M, Index rows, Index cols) {
  if (rows < M.rows() || cols < M.cols())
    throw std::logic_error("pad_to: target smaller than input");
  Matrix P = Matrix::Zero(rows, cols);
  P.topLeftCorner(M.rows(), M.cols()) = M;
  return P;
}

Matrix unitary_dilation(const Matrix& B) {
  const double nb = spectral_norm(B);
  if (nb > 1.0 + 1e-12)
    throw PreconditionError("unitary_dilation: ||B|| = " + std::to_string(nb) + " exceeds 1");
  const Index n = next_pow2(std::max<Index>({B.rows(), B.cols(), 1}));
  Matrix Bs = pad_to(B, n, n);
  SvdResult r = svd(Bs);
  RealVector c(n);
  for (Index i = 0; i < n; ++i) {
    const double s = std::min(r.singularValues(i), 1.0);
    c(i) = std::sqrt(std::max(0.0, 1.0 - s * s));
  }
  // [[ W S V*, W C W* ], [ V C V*, -V S W* ]] with S^2 + C^2 = I is unitary and
  // keeps the top-left block equal to Bs.
  Matrix U(2 * n, 2 * n);
  Matrix S = r.singularValues.asDiagonal();
  Matrix C = c.asDiagonal();
  U.topLeftCorner(n, n) = Bs;
  U.topRightCorner(n, n) = r.leftVectors * C * r.leftVectors.adjoint();
  U.bottomLeftCorner(n, n) = r.rightVectors * C * r.rightVectors.adjoint();
  U.bottomRightCorner(n, n) = -r.rightVectors * S * r.leftVectors.adjoint();
  return U;
}

namespace {

// Splits a line into tokens, keeping "(re,im)" pairs intact and treating commas
// outside parentheses as separators.
std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char ch : line) {
    if (ch == '(') depth++;
    if (ch == ')') depth--;
    const bool sep = (depth == 0) && (ch == ',' || ch == ' ' || ch == '\t' || ch == '\r');
    if (sep) {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

Complex parse_entry(const std::string& tok, const std::string& path) {
  std::istringstream ss(tok);
  if (tok.size() && tok[0] == '(') {
    Complex z;
    ss >> z;
    if (ss.fail()) throw IoError(path + ": bad complex entry '" + tok + "'");
    return z;
  }
  double x;
  ss >> x;
  if (ss.fail()) throw IoError(path + ": bad entry '" + tok + "'");
  return Complex(x, 0.0);
}

}  // namespace

Matrix read_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return read_matrix(in, path);
}

Matrix read_matrix(std::istream& in, const std::string& path) {
  std::string line;
  if (!std::getline(in, line)) throw IoError(path + ": empty file");
  auto header = tokenize(line);
  if (header.size() != 2) throw IoError(path + ": header must be 'rows cols'");
  Index rows = 0, cols = 0;
  try {
    rows = std::stoll(header[0]);
    cols = std::stoll(header[1]);
  } catch (const std::exception&) {
    throw IoError(path + ": header must be 'rows cols'");
  }
  if (rows <= 0 || cols <= 0) throw IoError(path + ": non-positive dimensions");
  Matrix M(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    if (!std::getline(in, line)) throw IoError(path + ": expected " + std::to_string(rows) + " rows");
    auto toks = tokenize(line);
    if (Index(toks.size()) != cols)
      throw IoError(path + ": row " + std::to_string(i) + " has " + std::to_string(toks.size()) +
                    " entries, expected " + std::to_string(cols));
    for (Index j = 0; j < cols; ++j) M(i, j) = parse_entry(toks[j], path);
  }
  if (!M.allFinite()) throw IoError(path + ": non-finite entries");
  return M;
}

void write_matrix(const std::string& path, const Matrix& M) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  write_matrix(out, M);
}

void write_matrix(std::ostream& out, const Matrix& M) {
  out.precision(17);
  out << M.rows() << " " << M.cols() << "\n";
  for (Index i = 0; i < M.rows(); ++i) {
    for (Index j = 0; j < M.cols(); ++j) {
      const Complex z = M(i, j);
      if (j) out << " ";
      if (z.imag() == 0.0)
        out << z.real();
      else
        out << "(" << z.real() << "," << z.imag() << ")";
    }
    out << "\n";
  }
}

Vector read_vector(const std::string& path) {
  Matrix M = read_matrix(path);
  if (M.cols() == 1) return M.col(0);
  if (M.rows() == 1) return M.row(0).transpose();
  throw IoError(path + ": expected a vector (one row or one column)");
}

}  // namespace qlsq
