#pragma once

#include <map>
#include <string>

#include "qlsq/block_encoding.hpp"
#include "qlsq/state.hpp"

namespace qlsq {

// Flag-adjoined discriminator D on one extra qubit: |0>|v_j> stays put when
// sigma_j <= phi and flips the flag when sigma_j >= 2 phi; the gap between is
// unconstrained. Returns a (1, a+1, delta)-encoding of D.
BlockEncoding svd_discriminator(const BlockEncoding& be, double phi, double delta);

// (2 kappa, a+1, delta)-encoding of the pseudoinverse of the normalized
// target, whose nonzero singular values must lie in [1/kappa, 1].
BlockEncoding pseudo_inverse_be(const BlockEncoding& be, double kappa, double delta);

// Inversion unitary acting on flag (x) ancilla (x) system, most significant
// first. On the flagged branch the input picks up a_max^{-1} A^+ restricted to
// the span of left singular vectors with sigma in [gamma, 1].
struct WindowUnitary {
  Matrix unitary;
  double aMax = 0.0;
  int ancillaQubits = 0;
  int systemQubits = 0;
};

// a_max = 2 kappa is tied to the global condition bound, not to gamma; when
// kappa is not supplied it defaults to 1/gamma.
WindowUnitary window_inverter(const BlockEncoding& be, double gamma, double delta,
                              double kappa = -1.0);

struct AppliedState {
  StateVector state;
  long rounds = 0;
  double successProb = 0.0;
  std::map<std::string, double> chargedQueries;
};

// Applies the encoded target to b and renormalizes, charging the stated count
// of amplitude-amplification rounds. With preamplified set, the input is
// assumed already tightened to the root-two envelope and the cheaper round
// count is charged.
AppliedState apply_be_to_state(const BlockEncoding& be, const StateVector& b, double kappa,
                               double delta, bool preamplified = false);

struct VtStats {
  int m = 0;
  RealVector stopTimes;
  RealVector stopProbs;
  double l2AvgTime = 0.0;
  double maxTime = 0.0;
  double successProb = 0.0;
  double amplitudeConst = 0.0;
};

struct VtResult {
  StateVector state;
  VtStats stats;
  long rounds = 0;
  std::map<std::string, double> chargedQueries;
};

// Variable-stopping-time inversion cascade on flag (x) clock (x) ancilla (x)
// input registers, with the input register doubled to hold the Hermitian
// dilation of the target. The flagged output is delta-close to the normalized
// A^+ b; stats carry the measured stopping profile.
VtResult variable_time_invert(const BlockEncoding& be, const StateVector& b, double kappa,
                              double delta, int maxQubits = 22);

// (2 kappa^c, a+1, delta)-encoding of the c-th negative power of a Hermitian
// positive definite normalized target. When kappa is not supplied it is
// measured from the encoded block.
BlockEncoding neg_power_be(const BlockEncoding& be, double exponent, double delta,
                           double kappa = -1.0);

}  // namespace qlsq
