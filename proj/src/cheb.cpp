#include "qlsq/cheb.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace qlsq {

std::string parity_name(Parity p) {
  switch (p) {
    case Parity::even: return "even";
    case Parity::odd: return "odd";
    default: return "none";
  }
}

Parity parity_from_name(const std::string& name) {
  if (name == "even") return Parity::even;
  if (name == "odd") return Parity::odd;
  if (name == "none") return Parity::none;
  throw IoError("unknown parity '" + name + "'");
}

double eval_coeffs(const RealVector& coeffs, double x) {
  const Index n = coeffs.size();
  if (n == 0) return 0.0;
  double b1 = 0.0, b2 = 0.0;
  for (Index k = n - 1; k >= 1; --k) {
    double b0 = 2.0 * x * b1 - b2 + coeffs(k);
    b2 = b1;
    b1 = b0;
  }
  return x * b1 - b2 + coeffs(0);
}

double eval(const ApproxPolynomial& poly, double x) {
  if (std::abs(x) > 1.0 + 1e-12) throw PreconditionError("eval: point outside [-1,1]");
  return eval_coeffs(poly.chebCoefficients, std::clamp(x, -1.0, 1.0));
}

RealVector cheb_grid(double lo, double hi, int points) {
  if (points < 2 || hi < lo) throw PreconditionError("cheb_grid: bad interval");
  RealVector xs(points);
  const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
  for (int m = 0; m < points; ++m)
    xs(m) = mid - half * std::cos(M_PI * m / (points - 1));
  xs(0) = lo;
  xs(points - 1) = hi;
  return xs;
}

GridReport eval_grid(const ApproxPolynomial& poly, const std::function<double(double)>& target,
                     Interval iv, int points) {
  RealVector xs = cheb_grid(iv.lo, iv.hi, points);
  GridReport rep{0.0, 0.0};
  for (Index m = 0; m < xs.size(); ++m) {
    double v = eval(poly, xs(m));
    rep.supError = std::max(rep.supError, std::abs(v - target(xs(m))));
    rep.maxAbsValue = std::max(rep.maxAbsValue, std::abs(v));
  }
  return rep;
}

double admissible_sup(const ApproxPolynomial& poly) {
  RealVector xs = cheb_grid(-1.0, 1.0, kCertGridPoints);
  double sup = 0.0;
  for (Index m = 0; m < xs.size(); ++m) sup = std::max(sup, std::abs(eval(poly, xs(m))));
  return sup;
}

RealVector cheb_interpolate(const std::function<double(double)>& f, int degree) {
  if (degree < 0) throw PreconditionError("cheb_interpolate: negative degree");
  const int n = degree;
  const int nodes = 2 * (n + 1);
  RealVector fv(nodes), theta(nodes);
  for (int m = 0; m < nodes; ++m) {
    theta(m) = M_PI * (m + 0.5) / nodes;
    fv(m) = f(std::cos(theta(m)));
  }
  RealVector coeffs(n + 1);
  for (int k = 0; k <= n; ++k) {
    double s = 0.0;
    for (int m = 0; m < nodes; ++m) s += fv(m) * std::cos(k * theta(m));
    coeffs(k) = (k == 0 ? 1.0 : 2.0) * s / nodes;
  }
  return coeffs;
}

RealVector cheb_product(const RealVector& a, const RealVector& b) {
  if (a.size() == 0 || b.size() == 0) return RealVector::Zero(1);
  RealVector out = RealVector::Zero(a.size() + b.size() - 1);
  for (Index i = 0; i < a.size(); ++i) {
    if (a(i) == 0.0) continue;
    for (Index j = 0; j < b.size(); ++j) {
      double w = 0.5 * a(i) * b(j);
      out(i + j) += w;
      out(std::abs(i - j)) += w;
    }
  }
  return out;
}

void force_parity(RealVector& coeffs, Parity p) {
  if (p == Parity::none) return;
  const Index keep = (p == Parity::even) ? 0 : 1;
  double scale = coeffs.cwiseAbs().maxCoeff();
  for (Index k = 0; k < coeffs.size(); ++k) {
    if (k % 2 == keep) continue;
    if (std::abs(coeffs(k)) > 1e-8 * std::max(1.0, scale))
      throw PreconditionError("force_parity: non-negligible opposite-parity coefficient");
    coeffs(k) = 0.0;
  }
}

void trim_coefficients(RealVector& coeffs, double relTol) {
  double scale = coeffs.cwiseAbs().maxCoeff();
  Index last = coeffs.size() - 1;
  while (last > 0 && std::abs(coeffs(last)) <= relTol * scale) --last;
  coeffs.conservativeResize(last + 1);
}

void write_polynomial(const std::string& path, const ApproxPolynomial& poly) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out.precision(17);
  out << poly.degree << ' ' << parity_name(poly.parity) << ' '
      << (poly.targetTag.empty() ? "-" : poly.targetTag) << '\n';
  for (Index k = 0; k < poly.chebCoefficients.size(); ++k) out << poly.chebCoefficients(k) << '\n';
  if (!out) throw IoError("write failed: " + path);
}

ApproxPolynomial read_polynomial(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string header;
  if (!std::getline(in, header)) throw IoError(path + ": empty file");
  std::istringstream hs(header);
  ApproxPolynomial poly;
  std::string parity, tag;
  if (!(hs >> poly.degree >> parity >> tag)) throw IoError(path + ": malformed header");
  if (poly.degree < 0 || poly.degree > 1000000) throw IoError(path + ": bad degree");
  poly.parity = parity_from_name(parity);
  poly.targetTag = (tag == "-") ? "" : tag;
  poly.chebCoefficients = RealVector::Zero(poly.degree + 1);
  for (Index k = 0; k <= poly.degree; ++k) {
    if (!(in >> poly.chebCoefficients(k))) throw IoError(path + ": expected coefficient");
  }
  return poly;
}

}  // namespace qlsq
