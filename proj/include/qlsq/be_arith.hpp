#pragma once

#include <utility>
#include <vector>

#include "qlsq/block_encoding.hpp"

namespace qlsq {

// State-preparation unitary for a positive weight vector: column zero of P
// carries amplitudes sqrt(eta_j / sum eta).
struct StatePrepUnitary {
  RealVector weights;
  Matrix prep;
};

StatePrepUnitary make_state_prep(const RealVector& weights);

// Linear combination sum_j y_j A_j of m encodings sharing system size.
// Output metadata (sum y_j alpha_j, max a_j + ceil(log2 m), sum y_j eps_j);
// the supplied prep must carry weights eta_j = y_j alpha_j.
BlockEncoding lcu(const std::vector<std::pair<double, BlockEncoding>>& terms,
                  const StatePrepUnitary& prep);

// Two-term combination with the explicit 2x2 rotation; saves ancillas over
// the general path: (y0 a0 + y1 a1, 1 + max(a0, a1), y0 e0 + y1 e1).
BlockEncoding lcu_pair(double y0, const BlockEncoding& be0, double y1, const BlockEncoding& be1);

// Encoding of A*B with metadata (alphaA alphaB, aA + aB, alphaA epsB + alphaB epsA).
BlockEncoding product(const BlockEncoding& beA, const BlockEncoding& beB);

// Product of pre-amplified factors: (2 ||A|| ||B||, aA + aB + 2, delta).
// Requires epsA <= delta / (4 sqrt2 ||B||) and symmetrically for B. Norm
// estimates default to the spectral norms of the encoded blocks.
BlockEncoding product_amplified(const BlockEncoding& beA, const BlockEncoding& beB, double delta,
                                double normA = -1.0, double normB = -1.0);

// Encoding of A1 (x) A2 with metadata (a1 a2, n1 + n2, a1 e2 + a2 e1 + e1 e2).
BlockEncoding tensor(const BlockEncoding& be1, const BlockEncoding& be2);

// Encoding of the stacked matrix [[A, 0], [sqrt(lambda) L, 0]] with metadata
// (alphaA + sqrt(lambda) alphaL, max(aA, aL) + 2, epsA + sqrt(lambda) epsL).
BlockEncoding augment(const BlockEncoding& beA, const BlockEncoding& beL, double lambda);

// Tightens a loose sub-normalization to (sqrt2 ||A||, a + 1, delta); requires
// eps <= delta / 2. Charges ceil((alpha/||A||) ln(||A||/delta)) input uses.
// The norm estimate defaults to the spectral norm of the encoded block.
BlockEncoding amplify(const BlockEncoding& be, double delta, double normEstimate = -1.0);

}  // namespace qlsq
