#pragma once

#include <random>

#include "qlsq/dense.hpp"
#include "qlsq/types.hpp"

namespace qlsq::testutil {

inline std::mt19937_64 rng(uint64_t seed = 0) { return std::mt19937_64(seed); }

inline Matrix random_matrix(std::mt19937_64& g, Index rows, Index cols, bool complexEntries = true) {
  std::normal_distribution<double> d(0.0, 1.0);
  Matrix M(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j)
      M(i, j) = Complex(d(g), complexEntries ? d(g) : 0.0);
  return M;
}

inline Matrix random_unitary(std::mt19937_64& g, Index n) {
  Matrix M = random_matrix(g, n, n);
  Eigen::HouseholderQR<Matrix> qr(M);
  Matrix Q = qr.householderQ();
  Matrix R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index i = 0; i < n; ++i) {
    Complex r = R(i, i);
    Q.col(i) *= (std::abs(r) > 0 ? r / std::abs(r) : Complex(1, 0));
  }
  return Q;
}

// Matrix with the prescribed singular values and Haar-ish singular vectors.
inline Matrix random_with_spectrum(std::mt19937_64& g, const RealVector& sigmas, Index rows, Index cols) {
  Matrix W = random_unitary(g, rows);
  Matrix V = random_unitary(g, cols);
  Matrix S = Matrix::Zero(rows, cols);
  for (Index i = 0; i < std::min({rows, cols, sigmas.size()}); ++i) S(i, i) = sigmas(i);
  return W * S * V.adjoint();
}

inline Matrix random_spd(std::mt19937_64& g, Index n, double condNumber) {
  RealVector ev(n);
  for (Index i = 0; i < n; ++i) {
    double t = n == 1 ? 0.0 : double(i) / double(n - 1);
    ev(i) = 1.0 * std::pow(1.0 / condNumber, t);
  }
  Matrix U = random_unitary(g, n);
  return U * ev.asDiagonal() * U.adjoint();
}

// Random direction matrix of unit spectral norm, scaled to the requested norm.
inline Matrix random_perturbation(std::mt19937_64& g, Index rows, Index cols, double norm) {
  Matrix E = random_matrix(g, rows, cols);
  return E * (norm / spectral_norm(E));
}

inline Vector random_state(std::mt19937_64& g, Index n) {
  Matrix M = random_matrix(g, n, 1);
  Vector v = M.col(0);
  return v / v.norm();
}

}  // namespace qlsq::testutil
