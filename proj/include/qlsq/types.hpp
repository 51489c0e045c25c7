#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace qlsq {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

// Violated theorem precondition or caller contract; the CLI maps this to exit 2.
struct PreconditionError : std::runtime_error {
  explicit PreconditionError(const std::string& msg) : std::runtime_error(msg) {}
};

// File or format problem; the CLI maps this to exit 1.
struct IoError : std::runtime_error {
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

inline Index next_pow2(Index n) {
  Index p = 1;
  while (p < n) p <<= 1;
  return p;
}

inline int log2_exact(Index n) {
  int k = 0;
  while ((Index(1) << k) < n) ++k;
  if ((Index(1) << k) != n) throw std::logic_error("dimension is not a power of two");
  return k;
}

}  // namespace qlsq
