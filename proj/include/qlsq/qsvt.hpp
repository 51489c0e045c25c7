#pragma once

#include "qlsq/block_encoding.hpp"
#include "qlsq/qsp.hpp"

namespace qlsq {

enum class QsvtMode { oracle, circuit };

std::string qsvt_mode_name(QsvtMode m);
QsvtMode qsvt_mode_from_name(const std::string& name);

// Record of one singular-value transform: what went in, what came out, and how
// many uses of the input encoding the run is charged.
struct QsvtApplication {
  BlockEncoding input;
  ApproxPolynomial poly;
  QsvtMode mode;
  BlockEncoding output;
  long chargedQueries = 0;
};

// Applies poly to the singular values of the encoded operator (at scale alpha),
// producing a (1, a+1, delta) encoding of the transformed block. Oracle mode
// evaluates the transform through the SVD; circuit mode runs the alternating
// phased-unitary product for the same polynomial and keeps its corner.
QsvtApplication qsvt_apply(const BlockEncoding& be, const ApproxPolynomial& poly,
                           QsvtMode mode = QsvtMode::oracle);

// Spectral distance between the corner realized by the alternating circuit for
// phi and the transform computed from scalar signal products. Small for exact
// encodings of any shape.
double qsvt_circuit_check(const BlockEncoding& be, const PhaseSequence& phi);

// Bound on how far a degree-d transform moves when the encoded block moves by
// deviation, with both blocks inside radius midNorm < 1.
double svt_stability_bound(int degree, double midNorm, double deviation);

}  // namespace qlsq
