#pragma once

#include "qlsq/cheb.hpp"

namespace qlsq {

// Even approximation of sign(center - x) on [0,1] away from the width-`gap`
// transition band around `center`; degree grows like (1/gap) log(1/eps).
ApproxPolynomial sign_poly(double eps, double gap, double center);

// Odd approximation of 1/(2 kappa x) on [1/kappa, 1] to within eps/(2 kappa),
// bounded by 1 on all of [-1,1]; degree grows like kappa log(kappa/eps).
ApproxPolynomial inversion_poly(double kappa, double eps);

// Even approximation of (lowerCut^c / 2) x^{-c} on [lowerCut, 1] to within eps,
// bounded by 1 on [-1,1].
ApproxPolynomial neg_power_poly(double exponent, double eps, double lowerCut);

// Odd low-pass-windowed line (ratio/sqrt(2)) * y, accurate on [0, 1/ratio] to
// within tolRel/sqrt(2) and bounded by 1 everywhere; used to tighten loose
// sub-normalizations.
ApproxPolynomial amplify_poly(double ratio, double tolRel);

// Chebyshev coefficients of (1 - (1 - x^2)^B) / (2 kappa x), the exact odd
// series whose windowed form inversion_poly interpolates, from binomial tail
// probabilities.
RealVector cheb_coeffs_inverse_series(long long B, double kappa);

}  // namespace qlsq
