#include "qlsq/poly.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qlsq {

namespace {

constexpr int kMaxDegree = 200000;

std::string fmt_tag(const std::string& name, std::initializer_list<double> args) {
  std::ostringstream os;
  os.precision(6);
  os << name << '(';
  bool first = true;
  for (double a : args) {
    if (!first) os << ',';
    os << a;
    first = false;
  }
  os << ')';
  return os.str();
}

ApproxPolynomial expand_to_poly(const std::function<double(double)>& f, Parity parity,
                                int degree) {
  ApproxPolynomial poly;
  poly.chebCoefficients = cheb_interpolate(f, degree);
  force_parity(poly.chebCoefficients, parity);
  trim_coefficients(poly.chebCoefficients);
  poly.degree = int(poly.chebCoefficients.size()) - 1;
  poly.parity = parity;
  return poly;
}

// Divides out a sup marginally above 1 so admissibility holds; callers only
// invoke this when their error budget covers the shift.
bool rescale_into_unit(ApproxPolynomial& poly, double slack) {
  double sup = admissible_sup(poly);
  if (sup <= 1.0 + 1e-9) return true;
  if (sup > 1.0 + slack) return false;
  poly.chebCoefficients /= sup * (1.0 + 1e-14);
  return admissible_sup(poly) <= 1.0 + 1e-9;
}

double rising_step(double kSharp, double center, double x) {
  return 0.5 * (1.0 + std::erf(kSharp * (std::abs(x) - center)));
}

// Inverse of erfc by bisection. Only used to shape cutoffs, and the
// certification pass re-measures whatever comes out.
double erfc_inv(double q) {
  q = std::clamp(q, 1e-300, 1.999);
  double lo = -6.0, hi = 27.0;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    (std::erfc(mid) > q ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

ApproxPolynomial sign_poly(double eps, double gap, double center) {
  if (!(eps > 0 && eps < 1) || !(gap > 0 && gap < 1) || !(center > 0 && center < 1))
    throw PreconditionError("sign_poly: eps, gap, center must lie in (0,1)");
  const double k = (2.0 / gap) * (std::sqrt(std::log(2.0 / eps)) + 1.0);
  auto target = [&](double x) { return (1.0 - eps / 4.0) * std::erf(k * (center - std::abs(x))); };
  auto signRef = [&](double x) { return center - x > 0 ? 1.0 : -1.0; };

  std::vector<Interval> domain;
  if (center - gap / 2 > 0) domain.push_back({0.0, center - gap / 2});
  if (center + gap / 2 < 1) domain.push_back({center + gap / 2, 1.0});

  for (int degree = std::max(32, int(std::ceil(2 * k))); degree <= kMaxDegree; degree *= 2) {
    ApproxPolynomial poly = expand_to_poly(target, Parity::even, degree);
    double err = 0.0;
    for (const Interval& iv : domain)
      err = std::max(err, eval_grid(poly, signRef, iv, kCertGridPoints).supError);
    if (err <= eps && rescale_into_unit(poly, eps / 8)) {
      for (const Interval& iv : domain)
        err = std::max(err, eval_grid(poly, signRef, iv, kCertGridPoints).supError);
      if (err > eps) continue;
      poly.domain = domain;
      poly.targetTag = fmt_tag("sign", {eps, gap, center});
      poly.certifiedError = 1.05 * err;
      return poly;
    }
  }
  throw std::runtime_error("sign_poly: failed to certify within the degree cap");
}

RealVector cheb_coeffs_inverse_series(long long B, double kappa) {
  if (B < 1) throw PreconditionError("cheb_coeffs_inverse_series: B must be positive");
  // (1 - (1-x^2)^B) / x = 4 sum_j (-1)^j D_j T_{2j+1}(x) with
  // D_j = P[Bin(2B, 1/2) >= B + j + 1]; accumulate the tail probabilities
  // from the top so each D_j is one running partial sum.
  const double lg2B = std::lgamma(double(2 * B + 1));
  const double ln2 = std::log(2.0);
  std::vector<double> tails(B, 0.0);
  double running = 0.0;
  for (long long m = 2 * B; m >= B + 1; --m) {
    double lp = lg2B - std::lgamma(double(m + 1)) - std::lgamma(double(2 * B - m + 1)) -
                2.0 * B * ln2;
    running += std::exp(lp);
    tails[m - B - 1] = running;
  }
  long long jmax = B - 1;
  while (jmax > 0 && tails[jmax] < 1e-300) --jmax;
  RealVector coeffs = RealVector::Zero(2 * jmax + 2);
  for (long long j = 0; j <= jmax; ++j)
    coeffs(2 * j + 1) = (j % 2 == 0 ? 1.0 : -1.0) * (2.0 / kappa) * tails[j];
  return coeffs;
}

ApproxPolynomial inversion_poly(double kappa, double eps) {
  if (kappa < 1.0) throw PreconditionError("inversion_poly: kappa must be at least 1");
  if (!(eps > 0)) throw PreconditionError("inversion_poly: eps must be positive");
  auto invRef = [&](double x) { return 1.0 / (2.0 * kappa * x); };
  const Interval dom{1.0 / kappa, 1.0};
  const double budget = eps / (2.0 * kappa);

  double bScale = 1.0;
  double shareW = 0.25;
  for (int attempt = 0; attempt < 7; ++attempt, bScale *= 1.4, shareW *= 0.6) {
    // Series length so the (1-x^2)^B remainder over [1/kappa, 1] stays under
    // half the budget.
    const double tailRate = -std::log1p(-1.0 / (kappa * kappa));
    long long B = std::isfinite(tailRate)
                      ? (long long)std::ceil(bScale * std::log(1.0 / budget) / tailRate)
                      : 1;
    B = std::max<long long>(B, 1);

    // The series factor is itself the cutoff: it tames the pole into a bump
    // below 1/kappa of height about 0.32 sqrt(B)/kappa. Scan that bump; only
    // when it would breach the unit cap is a gentle shaper multiplied in,
    // sized so its deficit at 1/kappa stays within shareW of the budget, then
    // sharpened until the shaped bump is back under the cap.
    auto seriesAt = [=](double x) {
      return std::abs(x) < 1e-150
                 ? 0.0
                 : -std::expm1(double(B) * std::log1p(-x * x)) / (2.0 * kappa * x);
    };
    double bumpPeak = 0.0;
    double xPeak = 0.5 / kappa;
    for (int i = 1; i <= 2000; ++i) {
      double x = (1.0 / kappa) * double(i) / 2000.0;
      double v = seriesAt(x);
      if (v > bumpPeak) {
        bumpPeak = v;
        xPeak = x;
      }
    }
    // The shaper rises in x^2, keeping the product smooth through zero.
    const bool windowed = bumpPeak > 0.96;
    double kv = 0.0;
    double c2 = 0.0;
    auto shaperAt = [&](double x) { return 0.5 * (1.0 + std::erf(kv * (x * x - c2))); };
    if (windowed) {
      const double z0 = erfc_inv(2.0 * (1.0 - 0.94 / bumpPeak));
      const double z1 = erfc_inv(4.0 * shareW * budget);
      kv = (z1 - z0) / (1.0 / (kappa * kappa) - xPeak * xPeak);
      for (int tries = 0; tries < 60; ++tries) {
        // Pinning the deficit at 1/kappa to its share, sharpening moves the
        // transition toward the working edge and off the bump.
        c2 = 1.0 / (kappa * kappa) - z1 / kv;
        double worst = 0.0;
        for (int i = 1; i <= 2000; ++i) {
          double x = (1.0 / kappa) * double(i) / 2000.0;
          worst = std::max(worst, seriesAt(x) * shaperAt(x));
        }
        if (worst <= 0.97) break;
        kv *= 1.2;
      }
    }

    const double kvFinal = kv;
    const double c2Final = c2;
    auto target = [=](double x) {
      double series = seriesAt(x);
      return windowed ? series * (0.5 * (1.0 + std::erf(kvFinal * (x * x - c2Final)))) : series;
    };

    auto certifies = [&](int d, ApproxPolynomial* out) {
      ApproxPolynomial p;
      p.chebCoefficients = cheb_interpolate(target, d);
      force_parity(p.chebCoefficients, Parity::odd);
      trim_coefficients(p.chebCoefficients);
      p.degree = int(p.chebCoefficients.size()) - 1;
      p.parity = Parity::odd;
      double err = eval_grid(p, invRef, dom, kCertGridPoints).supError;
      if (err > budget || admissible_sup(p) > 1.0 + 1e-9) return false;
      if (out) {
        p.domain = {dom};
        p.targetTag = fmt_tag("inverse", {kappa, eps});
        p.certifiedError = 1.05 * err;
        *out = p;
      }
      return true;
    };

    const int degreeCap = std::min(kMaxDegree, 20000);
    int high = std::max(
        24,
        int(std::ceil(1.15 * std::sqrt(double(B) * std::max(1.0, std::log(4.0 * double(B) / budget))))));
    while (high <= degreeCap && !certifies(high, nullptr)) high = int(std::ceil(high * 1.5));
    if (high > degreeCap) continue;

    // Truncation index: the smallest degree still meeting the grid bound.
    int low = 8;
    if (certifies(low, nullptr)) {
      high = low;
    } else {
      while (high - low > 1) {
        int mid = (low + high) / 2;
        if (certifies(mid, nullptr))
          high = mid;
        else
          low = mid;
      }
    }
    ApproxPolynomial poly;
    if (certifies(high, &poly)) return poly;
  }
  throw std::runtime_error("inversion_poly: failed to certify within the attempt cap");
}

ApproxPolynomial neg_power_poly(double exponent, double eps, double lowerCut) {
  if (!(exponent > 0 && exponent <= 1))
    throw PreconditionError("neg_power_poly: exponent must lie in (0,1]");
  if (!(eps > 0 && eps <= 0.5) || !(lowerCut > 0 && lowerCut <= 0.5))
    throw PreconditionError("neg_power_poly: eps and lowerCut must lie in (0,1/2]");
  const double c = exponent, delta = lowerCut;
  auto f = [&](double x) { return 0.5 * std::pow(delta, c) * std::pow(std::abs(x), -c); };
  const double epsW = eps / 2.0;
  const double kw = (4.0 / delta) * (std::sqrt(std::log(2.0 / epsW)) + 1.0);
  auto target = [&](double x) {
    double ax = std::abs(x);
    if (ax < 1e-12) return 0.0;
    return f(ax) * rising_step(kw, 3.0 * delta / 4.0, ax);
  };
  const Interval dom{delta, 1.0};

  for (int degree = std::max(32, int(std::ceil(2 * kw))); degree <= kMaxDegree; degree *= 2) {
    ApproxPolynomial poly = expand_to_poly(target, Parity::even, degree);
    if (eval_grid(poly, f, dom, kCertGridPoints).supError <= eps &&
        rescale_into_unit(poly, eps / 4)) {
      double err = eval_grid(poly, f, dom, kCertGridPoints).supError;
      if (err > eps) continue;
      poly.domain = {dom};
      poly.targetTag = fmt_tag("negPower", {exponent, eps, lowerCut});
      poly.certifiedError = 1.05 * err;
      return poly;
    }
  }
  throw std::runtime_error("neg_power_poly: failed to certify within the degree cap");
}

ApproxPolynomial amplify_poly(double ratio, double tolRel) {
  if (ratio < 1.0) throw PreconditionError("amplify_poly: ratio must be at least 1");
  if (!(tolRel > 0 && tolRel < 1)) throw PreconditionError("amplify_poly: tolRel must lie in (0,1)");
  const double c = ratio / std::sqrt(2.0);
  const double epsS = std::min(tolRel / 2.0, 1.0 / (2.0 * ratio));
  const double kw = 8.0 * ratio * (std::sqrt(std::log(2.0 / epsS)) + 1.0);
  auto target = [&](double y) {
    return c * y * (1.0 - rising_step(kw, 1.25 / ratio, y));
  };
  auto lineRef = [&](double y) { return c * y; };
  const Interval dom{0.0, 1.0 / ratio};
  const double bound = tolRel / std::sqrt(2.0);

  for (int degree = std::max(32, int(std::ceil(2 * kw))); degree <= kMaxDegree; degree *= 2) {
    ApproxPolynomial poly = expand_to_poly(target, Parity::odd, degree);
    if (eval_grid(poly, lineRef, dom, kCertGridPoints).supError <= bound &&
        rescale_into_unit(poly, tolRel / 8)) {
      double err = eval_grid(poly, lineRef, dom, kCertGridPoints).supError;
      if (err > bound) continue;
      poly.domain = {dom};
      poly.targetTag = fmt_tag("amplify", {ratio, tolRel});
      poly.certifiedError = 1.05 * err;
      return poly;
    }
  }
  throw std::runtime_error("amplify_poly: failed to certify within the degree cap");
}

}  // namespace qlsq
