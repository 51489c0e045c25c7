#include "qlsq/qsp.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <limits>

namespace qlsq {

namespace {

Complex cx_eval(const Vector& coeffs, double x) {
  if (coeffs.size() == 0) return 0.0;
  Complex b1 = 0.0, b2 = 0.0;
  for (Index k = coeffs.size() - 1; k >= 1; --k) {
    Complex b0 = 2.0 * x * b1 - b2 + coeffs(k);
    b2 = b1;
    b1 = b0;
  }
  return x * b1 - b2 + coeffs(0);
}

// Multiplication by x in the Chebyshev basis.
Vector shift_by_x(const Vector& p) {
  Vector out = Vector::Zero(p.size() + 1);
  if (p.size() > 0) out(1) += p(0);
  for (Index k = 1; k < p.size(); ++k) {
    out(k + 1) += 0.5 * p(k);
    out(k - 1) += 0.5 * p(k);
  }
  return out;
}

// Multiplication by (1 - x^2) = (T_0 - T_2)/2 in the Chebyshev basis.
Vector mul_one_minus_x2(const Vector& p) {
  Vector out = Vector::Zero(p.size() + 2);
  for (Index k = 0; k < p.size(); ++k) {
    out(k) += 0.5 * p(k);
    out(k + 2) -= 0.25 * p(k);
    out(std::abs(k - 2)) -= 0.25 * p(k);
  }
  return out;
}

double pair_residual(const Vector& p, const Vector& q, int samples = 512) {
  double worst = 0.0;
  for (int m = 0; m < samples; ++m) {
    double x = std::cos(M_PI * (m + 0.5) / samples);
    double s2 = 1.0 - x * x;
    double val = std::norm(cx_eval(p, x)) + s2 * std::norm(cx_eval(q, x));
    worst = std::max(worst, std::abs(val - 1.0));
  }
  return worst;
}

// U_n expressed in the T basis.
RealVector chebU_in_T(int n) {
  RealVector out = RealVector::Zero(n + 1);
  for (int k = n; k >= 0; k -= 2) out(k) = (k == 0) ? 1.0 : 2.0;
  return out;
}

std::vector<Complex> poly_roots(const RealVector& coeffs) {
  Index deg = coeffs.size() - 1;
  while (deg > 0 && coeffs(deg) == 0.0) --deg;
  if (deg < 1) throw std::runtime_error("poly_roots: degenerate polynomial");
  Matrix companion = Matrix::Zero(deg, deg);
  for (Index i = 1; i < deg; ++i) companion(i, i - 1) = 1.0;
  for (Index i = 0; i < deg; ++i) companion(i, deg - 1) = -coeffs(i) / coeffs(deg);
  Eigen::ComplexEigenSolver<Matrix> es(companion, false);
  if (es.info() != Eigen::Success) throw std::runtime_error("poly_roots: eigensolver failed");
  std::vector<Complex> roots(deg);
  for (Index i = 0; i < deg; ++i) roots[i] = es.eigenvalues()(i);
  return roots;
}

}  // namespace

Eigen::Matrix2cd qsp_unitary(const PhaseSequence& phi, double x) {
  if (std::abs(x) > 1.0 + 1e-12) throw PreconditionError("qsp_unitary: x outside [-1,1]");
  x = std::clamp(x, -1.0, 1.0);
  const double s = std::sqrt(std::max(0.0, 1.0 - x * x));
  Eigen::Matrix2cd w;
  w << Complex(x, 0), Complex(0, s), Complex(0, s), Complex(x, 0);
  Eigen::Matrix2cd u = Eigen::Matrix2cd::Identity();
  for (Index j = 0; j < phi.phases.size(); ++j) {
    Eigen::Matrix2cd ph = Eigen::Matrix2cd::Zero();
    ph(0, 0) = std::exp(Complex(0, phi.phases(j)));
    ph(1, 1) = std::exp(Complex(0, -phi.phases(j)));
    u = u * ph * w;
  }
  return u;
}

namespace {

struct StripResult {
  RealVector phases;
  Complex closure;
};

// The peeling recursion cancels leading coefficients, so it runs in extended
// precision to keep the guard thresholds meaningful at higher degrees.
StripResult strip_layers(const Vector& pIn, const Vector& qIn) {
  using CL = std::complex<long double>;
  const int d = int(pIn.size()) - 1;
  std::vector<CL> p(d + 1), q(d);
  for (int k = 0; k <= d; ++k) p[k] = CL(pIn(k).real(), pIn(k).imag());
  for (int k = 0; k < d; ++k) q[k] = CL(qIn(k).real(), qIn(k).imag());
  long double scale0 = 1.0L;
  for (const CL& c : p) scale0 = std::max(scale0, std::abs(c));

  RealVector phases(d);
  for (int layer = d; layer >= 1; --layer) {
    // Cancelling the leading coefficient of the stripped pair determines
    // exp(2 i phi) for this layer; the sign ambiguity of the half angle is
    // repaired by the constant-layer closure at the end.
    CL pl = p[layer], ql = q[layer - 1];
    const long double w = (layer >= 2) ? 0.5L : 1.0L;
    if (std::abs(pl) < 1e-12L * scale0 || std::abs(ql) < 1e-12L * scale0)
      throw std::runtime_error("qsp_angles_from_pair: leading coefficient vanished");
    const long double phiJ = 0.5L * std::arg(pl / (w * std::conj(ql)));
    phases(d - layer) = double(phiJ);
    const CL em = std::exp(CL(0, -phiJ)), ep = std::exp(CL(0, phiJ));

    // pNew = x e^{-i phi} P + (1 - x^2) e^{i phi} conj(Q)
    std::vector<CL> pNew(layer + 2, CL(0)), qNew(layer + 1, CL(0));
    pNew[1] += em * p[0];
    for (int k = 1; k <= layer; ++k) {
      pNew[k + 1] += 0.5L * em * p[k];
      pNew[k - 1] += 0.5L * em * p[k];
    }
    for (int k = 0; k <= layer - 1; ++k) {
      const CL qc = std::conj(q[k]) * ep;
      pNew[k] += 0.5L * qc;
      pNew[k + 2] -= 0.25L * qc;
      pNew[std::abs(k - 2)] -= 0.25L * qc;
    }
    // qNew = x e^{-i phi} Q - e^{i phi} conj(P)
    qNew[1] += em * q[0];
    for (int k = 1; k <= layer - 1; ++k) {
      qNew[k + 1] += 0.5L * em * q[k];
      qNew[k - 1] += 0.5L * em * q[k];
    }
    for (int k = 0; k <= layer; ++k) qNew[k] -= std::conj(p[k]) * ep;

    // One signal layer gone means one degree gone; residue above the new
    // degree signals a pair outside the representable family. The threshold
    // is loose because small leading coefficients amplify roundoff here; the
    // refinement pass afterwards restores full accuracy.
    for (int k = layer; k <= layer + 1; ++k)
      if (std::abs(pNew[k]) > 1e-3L * scale0)
        throw std::runtime_error("qsp_angles_from_pair: degree failed to drop");
    for (int k = layer - 1; k <= layer; ++k)
      if (std::abs(qNew[k]) > 1e-3L * scale0)
        throw std::runtime_error("qsp_angles_from_pair: degree failed to drop");
    p.assign(pNew.begin(), pNew.begin() + layer);
    q.assign(qNew.begin(), qNew.begin() + std::max(layer - 1, 0));
  }
  return {phases, Complex(double(p[0].real()), double(p[0].imag()))};
}

// Polishes stripped phases against the target top-left values. Peeling loses
// accuracy when leading coefficients collapse (products of near-zero cosines
// of interior phases), so a few Gauss-Newton steps on the sampled
// reconstruction error recover full precision from the approximate seed.
double refine_phases(RealVector& phases, const Vector& pCheb) {
  const int d = int(phases.size());
  const int m = std::max(2 * d, 8);
  std::vector<double> xs(m);
  std::vector<Complex> target(m);
  for (int k = 0; k < m; ++k) {
    xs[k] = std::cos(M_PI * (k + 0.5) / m);
    target[k] = cx_eval(pCheb, xs[k]);
  }

  double worst = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < 20; ++iter) {
    RealMatrix jac(2 * m, d);
    RealVector rhs(2 * m);
    worst = 0.0;
    for (int k = 0; k < m; ++k) {
      const double x = xs[k];
      const double s = std::sqrt(std::max(0.0, 1.0 - x * x));
      Eigen::Matrix2cd w;
      w << Complex(x, 0), Complex(0, s), Complex(0, s), Complex(x, 0);
      std::vector<Eigen::Matrix2cd> layer(d), prefix(d + 1), suffix(d + 1);
      for (int j = 0; j < d; ++j) {
        Eigen::Matrix2cd ph = Eigen::Matrix2cd::Zero();
        ph(0, 0) = std::exp(Complex(0, phases(j)));
        ph(1, 1) = std::conj(ph(0, 0));
        layer[j] = ph * w;
      }
      prefix[0].setIdentity();
      for (int j = 0; j < d; ++j) prefix[j + 1] = prefix[j] * layer[j];
      suffix[d].setIdentity();
      for (int j = d - 1; j >= 0; --j) suffix[j] = layer[j] * suffix[j + 1];

      const Complex r = prefix[d](0, 0) - target[k];
      rhs(k) = -r.real();
      rhs(m + k) = -r.imag();
      worst = std::max(worst, std::abs(r));
      for (int j = 0; j < d; ++j) {
        // The phase derivative inserts i sigma_z in front of layer j.
        const Complex g = Complex(0, 1) * (prefix[j](0, 0) * suffix[j](0, 0) -
                                           prefix[j](0, 1) * suffix[j](1, 0));
        jac(k, j) = g.real();
        jac(m + k, j) = g.imag();
      }
    }
    if (worst < 1e-12) break;
    // Degenerate configurations leave near-null directions in the Jacobian
    // (the residual barely depends on them); a truncated pseudo-inverse step
    // avoids amplifying curvature noise along those directions.
    Eigen::JacobiSVD<RealMatrix> dec(jac, Eigen::ComputeThinU | Eigen::ComputeThinV);
    dec.setThreshold(1e-6);
    RealVector step = dec.solve(rhs);
    const double cap = step.cwiseAbs().maxCoeff();
    if (cap > 0.5) step *= 0.5 / cap;
    phases += step;
  }
  return worst;
}

}  // namespace

PhaseSequence qsp_angles_from_pair(const Vector& pCheb, const Vector& qCheb) {
  const int d = int(pCheb.size()) - 1;
  if (d < 1) throw PreconditionError("qsp_angles_from_pair: need degree at least 1");
  if (qCheb.size() != d) throw PreconditionError("qsp_angles_from_pair: Q must have length d");
  if (pair_residual(pCheb, qCheb) > 1e-8)
    throw PreconditionError("qsp_angles_from_pair: pair is not unitary-consistent");

  // The norm identity leaves the relative phase of P and Q free, but the
  // phased-product family only realizes one relative phase per pair. Twisting
  // Q by e^{i chi} rotates the leftover closure constant by e^{-i chi / 2}
  // without touching the top-left entry, so a couple of corrections steer the
  // closure onto +-1.
  double chi = 0.0;
  StripResult res;
  bool done = false;
  for (int attempt = 0; attempt < 4 && !done; ++attempt) {
    res = strip_layers(pCheb, Vector(qCheb * std::exp(Complex(0, chi))));
    if (std::abs(res.closure - 1.0) < 1e-3) {
      done = true;
    } else if (std::abs(res.closure + 1.0) < 1e-3) {
      // A pi shift on the final z rotation flips the global sign only.
      res.phases(d - 1) += M_PI;
      done = true;
    } else {
      chi += 2.0 * std::arg(res.closure);
    }
  }
  if (!done) throw std::runtime_error("qsp_angles_from_pair: phase closure failed");

  // Badly conditioned strips can settle on a neighboring solution branch
  // whose product matches the target only to a few parts in 1e9; that still
  // satisfies the reconstruction tolerance, so the gate sits at the same
  // level as the synthesis certification.
  RealVector phases = res.phases;
  if (refine_phases(phases, pCheb) > 1e-8)
    throw std::runtime_error("qsp_angles_from_pair: refinement did not converge");
  for (Index j = 0; j < phases.size(); ++j) {
    double a = std::fmod(phases(j), 2.0 * M_PI);
    phases(j) = (a < 0) ? a + 2.0 * M_PI : a;
  }
  return PhaseSequence{phases};
}

CompletionPair complete_to_unitary_pair(const RealVector& fCheb) {
  RealVector f = fCheb;
  trim_coefficients(f);
  const int d = int(f.size()) - 1;
  if (d < 1) throw PreconditionError("complete_to_unitary_pair: need degree at least 1");

  for (double eta : {1e-10, 1e-9, 1e-8}) {
    RealVector ft = f * (1.0 - eta);
    // R = 1 - ft^2 stays strictly positive on [-1,1] thanks to the offset,
    // which keeps the factorization roots off the unit circle.
    RealVector r = -cheb_product(ft, ft);
    r(0) += 1.0;
    const int degR = int(r.size()) - 1;
    double rScale = r.cwiseAbs().maxCoeff();
    bool rEven = true;
    for (int m = 1; m <= degR; m += 2)
      if (std::abs(r(m)) > 1e-12 * rScale) rEven = false;

    // Laurent lift z^degR * R((z + 1/z)/2), a polynomial of degree 2 degR
    // whose roots split evenly across the unit circle.
    RealVector lift = RealVector::Zero(2 * degR + 1);
    lift(degR) = r(0);
    for (int m = 1; m <= degR; ++m) {
      lift(degR + m) += 0.5 * r(m);
      lift(degR - m) += 0.5 * r(m);
    }
    std::vector<Complex> roots;
    try {
      roots = poly_roots(lift);
    } catch (const std::runtime_error&) {
      continue;
    }
    std::vector<Complex> inside;
    for (const Complex& z : roots)
      if (std::abs(z) < 1.0) inside.push_back(z);
    if (int(inside.size()) != degR) continue;

    Vector gammaC = Vector::Zero(1);
    gammaC(0) = 1.0;
    for (const Complex& z : inside) {
      Vector next = Vector::Zero(gammaC.size() + 1);
      next.tail(gammaC.size()) += gammaC;
      next.head(gammaC.size()) -= z * gammaC;
      gammaC = next;
    }
    RealVector gamma = gammaC.real();
    double gScale = gamma.cwiseAbs().maxCoeff();
    if (gammaC.imag().cwiseAbs().maxCoeff() > 1e-7 * gScale) continue;
    if (rEven) {
      // An even R has an interior root set closed under negation, so the odd
      // part of gamma is pure root-finder noise.
      double oddJunk = 0.0;
      for (Index m = 1; m < gamma.size(); m += 2) oddJunk = std::max(oddJunk, std::abs(gamma(m)));
      if (oddJunk > 1e-6 * gScale) continue;
      for (Index m = 1; m < gamma.size(); m += 2) gamma(m) = 0.0;
    }

    // Fix the overall scale so K |gamma|^2 reproduces R on the circle.
    const int samples = 4 * degR + 64;
    double ksum = 0.0;
    bool bad = false;
    for (int t = 0; t < samples; ++t) {
      double theta = M_PI * (t + 0.5) / samples;
      Complex z = std::exp(Complex(0, theta));
      Complex g = 0.0;
      Complex zp = 1.0;
      for (Index m = 0; m < gamma.size(); ++m, zp *= z) g += gamma(m) * zp;
      double denom = std::norm(g);
      if (denom < 1e-280) {
        bad = true;
        break;
      }
      ksum += eval_coeffs(r, std::cos(theta)) / denom;
    }
    if (bad) continue;
    double kScale = ksum / samples;
    if (kScale <= 0) continue;
    double root = std::sqrt(kScale);

    // Splitting sqrt(K) e^{-i d theta} gamma(e^{i theta}) into its cosine and
    // sine series gives real u, v with u^2 + (1 - x^2) v^2 = R.
    RealVector u = RealVector::Zero(d + 1);
    RealVector v = RealVector::Zero(d);
    for (Index m = 0; m < gamma.size(); ++m) {
      int k = int(m) - d;
      u(std::abs(k)) += root * gamma(m);
      if (k != 0) {
        RealVector un = chebU_in_T(std::abs(k) - 1);
        double sgn = (k > 0) ? 1.0 : -1.0;
        for (Index t = 0; t < un.size(); ++t) v(t) += sgn * root * gamma(m) * un(t);
      }
    }

    CompletionPair pair;
    pair.p = Vector::Zero(d + 1);
    for (int k = 0; k <= d; ++k) pair.p(k) = Complex(ft(k), u(k));
    pair.q = Vector::Zero(d);
    for (int k = 0; k < d; ++k) pair.q(k) = v(k);
    if (pair_residual(pair.p, pair.q) < 5e-9) return pair;
  }
  throw std::runtime_error("complete_to_unitary_pair: factorization failed to stabilize");
}

PhaseSequence qsp_angles(const ApproxPolynomial& poly, int maxDegree) {
  if (poly.degree > maxDegree)
    throw PreconditionError("qsp_angles: degree exceeds the sequence cap");
  if (poly.parity == Parity::none)
    throw PreconditionError("qsp_angles: polynomial must have definite parity");
  double sup = admissible_sup(poly);
  if (sup > 1.0 + 1e-9) throw PreconditionError("qsp_angles: polynomial exceeds unit bound");
  RealVector f = poly.chebCoefficients;
  if (sup > 1.0 - 1e-12) f *= (1.0 - 1e-12) / sup;
  CompletionPair pair = complete_to_unitary_pair(f);
  PhaseSequence phi = qsp_angles_from_pair(pair.p, pair.q);
  double worst = 0.0;
  for (int m = 0; m <= 400; ++m) {
    double x = -1.0 + 2.0 * m / 400.0;
    double rec = qsp_unitary(phi, x)(0, 0).real();
    worst = std::max(worst, std::abs(rec - eval_coeffs(poly.chebCoefficients, x)));
  }
  if (worst > 1e-8) throw std::runtime_error("qsp_angles: grid verification failed");
  return phi;
}

void write_phase_sequence(const std::string& path, const PhaseSequence& phi) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out.precision(17);
  out << phi.degree() << '\n';
  for (Index j = 0; j < phi.phases.size(); ++j) out << phi.phases(j) << '\n';
  if (!out) throw IoError("write failed: " + path);
}

PhaseSequence read_phase_sequence(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  int d = -1;
  if (!(in >> d) || d < 0 || d > 1000000) throw IoError(path + ": bad degree");
  PhaseSequence phi;
  phi.phases = RealVector::Zero(d);
  for (int j = 0; j < d; ++j)
    if (!(in >> phi.phases(j))) throw IoError(path + ": expected angle");
  return phi;
}

}  // namespace qlsq
