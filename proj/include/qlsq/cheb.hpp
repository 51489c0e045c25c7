#pragma once

#include <functional>
#include <string>
#include <vector>

#include "qlsq/types.hpp"

namespace qlsq {

enum class Parity { even, odd, none };

std::string parity_name(Parity p);
Parity parity_from_name(const std::string& name);

struct Interval {
  double lo;
  double hi;
};

// Real polynomial in the Chebyshev-T basis on [-1,1] with a certified sup-norm
// error against its target function over the stated domain intervals.
struct ApproxPolynomial {
  RealVector chebCoefficients;  // c_0 .. c_degree
  int degree = 0;
  Parity parity = Parity::none;
  std::vector<Interval> domain;
  std::string targetTag;
  double certifiedError = 0.0;
};

// Clenshaw evaluation; |x| beyond 1 (plus roundoff slack) is an error.
double eval(const ApproxPolynomial& poly, double x);
double eval_coeffs(const RealVector& coeffs, double x);

struct GridReport {
  double supError;     // max |P(x) - target(x)| over the grid
  double maxAbsValue;  // max |P(x)| over the grid
};

// Chebyshev-spaced grid over [lo, hi], endpoints included.
RealVector cheb_grid(double lo, double hi, int points);

GridReport eval_grid(const ApproxPolynomial& poly, const std::function<double(double)>& target,
                     Interval iv, int points);

constexpr int kCertGridPoints = 10000;

// Grid max of |P| over [-1,1]; admissibility demands <= 1 + 1e-9.
double admissible_sup(const ApproxPolynomial& poly);

// Truncated Chebyshev expansion of f computed by cosine quadrature.
RealVector cheb_interpolate(const std::function<double(double)>& f, int degree);

// Coefficients of the product polynomial (T_i T_j = (T_{i+j} + T_{|i-j|}) / 2).
RealVector cheb_product(const RealVector& a, const RealVector& b);

// Zeroes coefficients of the opposite parity; they must already be negligible.
void force_parity(RealVector& coeffs, Parity p);

// Drops trailing coefficients below relTol * max |c_k|.
void trim_coefficients(RealVector& coeffs, double relTol = 1e-14);

void write_polynomial(const std::string& path, const ApproxPolynomial& poly);
ApproxPolynomial read_polynomial(const std::string& path);

}  // namespace qlsq
