#pragma once

#include <Eigen/Dense>

#include "qlsq/cheb.hpp"

namespace qlsq {

struct PhaseSequence {
  RealVector phases;  // phi_1 .. phi_d, applied left to right
  int degree() const { return int(phases.size()); }
};

// Product prod_j exp(i phi_j sigma_z) W(x) with W(x) the x-signal rotation
// [[x, i sqrt(1-x^2)], [i sqrt(1-x^2), x]].
Eigen::Matrix2cd qsp_unitary(const PhaseSequence& phi, double x);

// Complex Chebyshev-basis coefficient pair (P, Q) of a degree-d sequence:
// top-left P, top-right i Q sqrt(1-x^2).
struct CompletionPair {
  Vector p;  // length d+1
  Vector q;  // length d (absent terms zero)
};

// Recovers phases from a consistent (P, Q) pair by stripping one signal layer
// at a time from the left.
PhaseSequence qsp_angles_from_pair(const Vector& pCheb, const Vector& qCheb);

// Completes a real polynomial f (|f| <= 1) to a unitary-consistent pair with
// real part of P equal to f up to a 1e-10 relative offset.
CompletionPair complete_to_unitary_pair(const RealVector& fCheb);

// Completion followed by stripping; the result reproduces poly (through the
// real part of the top-left entry) to 1e-8 on a grid.
PhaseSequence qsp_angles(const ApproxPolynomial& poly, int maxDegree = 32);

void write_phase_sequence(const std::string& path, const PhaseSequence& phi);
PhaseSequence read_phase_sequence(const std::string& path);

}  // namespace qlsq
