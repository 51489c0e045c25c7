#include "qlsq/solvers.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <tuple>
#include <utility>
#include <vector>

#include "qlsq/dense.hpp"
#include "qlsq/poly.hpp"

namespace qlsq {
namespace {

std::vector<Index> iota_map(Index n) {
  std::vector<Index> m(n);
  for (Index i = 0; i < n; ++i) m[i] = i;
  return m;
}

std::map<std::string, double> scaled_weights(const std::map<std::string, double>& w,
                                             double factor) {
  std::map<std::string, double> out;
  for (const auto& kv : w) out[kv.first] = kv.second * factor;
  return out;
}

// Stage polynomials recur across runs with identical parameters, so builds are
// cached under their exact construction keys.
std::mutex polyCacheMutex;

const ApproxPolynomial& cached_sign(double eps, double gap, double center) {
  static std::map<std::tuple<double, double, double>, ApproxPolynomial> cache;
  std::lock_guard<std::mutex> lock(polyCacheMutex);
  auto key = std::make_tuple(eps, gap, center);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, sign_poly(eps, gap, center)).first;
  return it->second;
}

const ApproxPolynomial& cached_inverse(double kappa, double eps) {
  static std::map<std::pair<double, double>, ApproxPolynomial> cache;
  std::lock_guard<std::mutex> lock(polyCacheMutex);
  auto key = std::make_pair(kappa, eps);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, inversion_poly(kappa, eps)).first;
  return it->second;
}

double eval_in_unit(const ApproxPolynomial& poly, double x) {
  return eval(poly, std::clamp(x, -1.0, 1.0));
}

double safe_log(double x) { return std::log(std::max(x, M_E)); }

void check_alpha_floor(const BlockEncoding& be, const char* op) {
  if (be.alpha < 2.0 * (1.0 - 1e-12)) {
    std::ostringstream os;
    os << op << ": needs alpha >= 2, got " << be.alpha;
    throw PreconditionError(os.str());
  }
}

void check_epsilon(const BlockEncoding& be, double bound, const char* op) {
  if (be.epsilon > bound) {
    std::ostringstream os;
    os << op << ": input epsilon " << be.epsilon << " exceeds the admissible bound " << bound;
    throw PreconditionError(os.str());
  }
}

void check_delta(double delta, const char* op) {
  if (!(delta > 0.0 && delta < 1.0)) {
    std::ostringstream os;
    os << op << ": delta must lie in (0, 1), got " << delta;
    throw PreconditionError(os.str());
  }
}

// Nonzero singular values of the encoded target must sit in [1/kappa, 1], up
// to the claimed encoding error. Returns the zero cutoff used.
double check_spectrum(const RealVector& blockSigmas, const BlockEncoding& be, double kappa,
                      const char* op) {
  const double top = blockSigmas.size() ? blockSigmas(0) : 0.0;
  const double zeroCut = kDefaultRankTol * top;
  const double slack = be.epsilon + 1e-9;
  for (Index j = 0; j < blockSigmas.size(); ++j) {
    if (blockSigmas(j) <= zeroCut) continue;
    const double sigma = be.alpha * blockSigmas(j);
    if (sigma < 1.0 / kappa - slack || sigma > 1.0 + slack) {
      std::ostringstream os;
      os << op << ": spectrum outside declared range, singular value " << sigma
         << " not in [" << 1.0 / kappa << ", 1]";
      throw PreconditionError(os.str());
    }
  }
  return zeroCut;
}

}  // namespace

BlockEncoding svd_discriminator(const BlockEncoding& be, double phi, double delta) {
  if (!(phi > 0.0 && phi < 0.5)) {
    std::ostringstream os;
    os << "svd_discriminator: threshold must lie in (0, 1/2), got " << phi;
    throw PreconditionError(os.str());
  }
  check_delta(delta, "svd_discriminator");
  check_alpha_floor(be, "svd_discriminator");
  check_epsilon(be, 0.125 * delta * phi / safe_log(1.0 / delta), "svd_discriminator");

  // Even step approximation in block coordinates: +1 below phi/alpha, -1 above
  // 2 phi/alpha; the flag rotation angle comes from its value per right
  // singular vector.  The rotation amplitude scales as the square root of the
  // step error, so the tolerance is quadratic in the accuracy target.
  const ApproxPolynomial& step =
      cached_sign(0.5 * delta * delta, phi / be.alpha, 1.5 * phi / be.alpha);
  SvdResult dec = svd(be.block);
  const Index p = be.blockDim();
  Matrix d = Matrix::Zero(2 * p, 2 * p);
  for (Index j = 0; j < p; ++j) {
    const double s = std::clamp(eval_in_unit(step, dec.singularValues(j)), -1.0, 1.0);
    const double keep = std::sqrt((1.0 + s) / 2.0);
    const double flip = std::sqrt((1.0 - s) / 2.0);
    const Matrix proj = dec.rightVectors.col(j) * dec.rightVectors.col(j).adjoint();
    d.block(0, 0, p, p) += keep * proj;
    d.block(p, p, p, p) += keep * proj;
    d.block(p, 0, p, p) += flip * proj;
    d.block(0, p, p, p) -= flip * proj;
  }

  BlockEncoding out;
  out.block = std::move(d);
  out.alpha = 1.0;
  out.ancillaCount = be.ancillaCount + 1;
  out.epsilon = delta;
  out.systemQubits = be.systemQubits + 1;
  out.logicalRows = 2 * p;
  out.logicalCols = 2 * p;
  out.rowMap = iota_map(2 * p);
  out.colMap = iota_map(2 * p);
  out.queryWeights = scaled_weights(be.queryWeights, double(step.degree));
  return out;
}

BlockEncoding pseudo_inverse_be(const BlockEncoding& be, double kappa, double delta) {
  if (kappa < 1.0) throw PreconditionError("pseudo_inverse_be: kappa must be at least 1");
  check_delta(delta, "pseudo_inverse_be");
  check_alpha_floor(be, "pseudo_inverse_be");
  check_epsilon(be, 0.125 * delta / (kappa * kappa * safe_log(kappa / delta)),
                "pseudo_inverse_be");

  SvdResult dec = svd(be.block);
  const double zeroCut = check_spectrum(dec.singularValues, be, kappa, "pseudo_inverse_be");

  // Odd inversion polynomial at the block condition number kappa * alpha; its
  // values at the block singular values give the pseudoinverse spectrum after
  // the 2 kappa rescaling. Zero modes stay zero by parity.
  const ApproxPolynomial& inv = cached_inverse(kappa * be.alpha, be.alpha * delta / 2.0);
  const Index p = be.blockDim();
  RealVector vals = RealVector::Zero(p);
  for (Index j = 0; j < p; ++j) {
    if (dec.singularValues(j) <= zeroCut) continue;
    vals(j) = eval_in_unit(inv, dec.singularValues(j));
  }
  Matrix block = dec.rightVectors * vals.asDiagonal() * dec.leftVectors.adjoint();

  BlockEncoding out;
  out.block = std::move(block);
  out.alpha = 2.0 * kappa;
  out.ancillaCount = be.ancillaCount + 1;
  out.epsilon = delta;
  out.systemQubits = be.systemQubits;
  out.logicalRows = be.logicalCols;
  out.logicalCols = be.logicalRows;
  out.rowMap = be.colMap;
  out.colMap = be.rowMap;
  out.queryWeights = scaled_weights(be.queryWeights, double(inv.degree));
  return out;
}

WindowUnitary window_inverter(const BlockEncoding& be, double gamma, double delta,
                              double kappa) {
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    std::ostringstream os;
    os << "window_inverter: gamma must lie in (0, 1], got " << gamma;
    throw PreconditionError(os.str());
  }
  check_delta(delta, "window_inverter");
  check_alpha_floor(be, "window_inverter");
  if (kappa <= 0.0) kappa = 1.0 / gamma;
  if (kappa < 1.0 / gamma - 1e-9) {
    std::ostringstream os;
    os << "window_inverter: kappa " << kappa << " cannot be smaller than 1/gamma "
       << 1.0 / gamma;
    throw PreconditionError(os.str());
  }
  check_epsilon(be, 0.125 * delta * gamma * gamma / safe_log(1.0 / (delta * gamma)),
                "window_inverter");
  const int totalQubits = 1 + be.ancillaCount + be.systemQubits;
  if (totalQubits > 12) {
    std::ostringstream os;
    os << "window_inverter: dense unitary needs " << totalQubits
       << " qubits, above the limit of 12";
    throw PreconditionError(os.str());
  }

  const double aMax = 2.0 * kappa;
  SvdResult dec = svd(be.block);
  const double top = dec.singularValues.size() ? dec.singularValues(0) : 0.0;
  if (be.alpha * top > 1.0 + be.epsilon + 1e-9) {
    std::ostringstream os;
    os << "window_inverter: spectrum outside declared range, top singular value "
       << be.alpha * top << " exceeds 1";
    throw PreconditionError(os.str());
  }

  // The rotation amplitudes q_j = s * P(sigma_j) land at 1/(a_max sigma) on
  // the valid window and roll off below it; a_max >= 2/gamma keeps them within
  // [-1, 1].
  const ApproxPolynomial& inv = cached_inverse(be.alpha / gamma, be.alpha * delta / 2.0);
  const double scale = 2.0 / (gamma * aMax);
  const Index p = be.blockDim();
  Matrix wfi = Matrix::Zero(2 * p, 2 * p);
  for (Index j = 0; j < p; ++j) {
    const double q = std::clamp(scale * eval_in_unit(inv, dec.singularValues(j)), -1.0, 1.0);
    const double keep = std::sqrt(1.0 - q * q);
    const Matrix wProj = dec.leftVectors.col(j) * dec.leftVectors.col(j).adjoint();
    const Matrix vProj = dec.rightVectors.col(j) * dec.rightVectors.col(j).adjoint();
    wfi.block(0, 0, p, p) += keep * wProj;
    wfi.block(p, p, p, p) += keep * vProj;
    wfi.block(p, 0, p, p) += q * dec.rightVectors.col(j) * dec.leftVectors.col(j).adjoint();
    wfi.block(0, p, p, p) -= q * dec.leftVectors.col(j) * dec.rightVectors.col(j).adjoint();
  }

  // Ancillas sit between flag and system and stay idle.
  const Index anc = Index(1) << be.ancillaCount;
  Matrix full = Matrix::Zero(2 * anc * p, 2 * anc * p);
  for (int f = 0; f < 2; ++f)
    for (int g = 0; g < 2; ++g)
      for (Index a = 0; a < anc; ++a)
        full.block((f * anc + a) * p, (g * anc + a) * p, p, p) =
            wfi.block(Index(f) * p, Index(g) * p, p, p);

  WindowUnitary out;
  out.unitary = std::move(full);
  out.aMax = aMax;
  out.ancillaQubits = be.ancillaCount;
  out.systemQubits = be.systemQubits;
  return out;
}

AppliedState apply_be_to_state(const BlockEncoding& be, const StateVector& b, double kappa,
                               double delta, bool preamplified) {
  if (kappa < 1.0) throw PreconditionError("apply_be_to_state: kappa must be at least 1");
  check_delta(delta, "apply_be_to_state");
  if (b.dim() != be.blockDim()) {
    std::ostringstream os;
    os << "apply_be_to_state: state dimension " << b.dim()
       << " does not match the system register dimension " << be.blockDim();
    throw PreconditionError(os.str());
  }
  const double normA = spectral_norm(encoded_block(be));
  if (normA <= 0.0)
    throw PreconditionError("apply_be_to_state: encoded target has zero norm");
  check_epsilon(be, delta * normA / (2.0 * kappa), "apply_be_to_state");

  Vector image = be.alpha * (be.block * b.amplitudes);
  const double imageNorm = image.norm();
  if (imageNorm < normA / (100.0 * kappa)) {
    std::ostringstream os;
    os << "apply_be_to_state: ||A b|| = " << imageNorm
       << " sits below the amplification floor " << normA / (100.0 * kappa)
       << "; amplitude amplification at this kappa cannot reach the image";
    throw PreconditionError(os.str());
  }

  const long rounds = preamplified ? long(std::ceil(std::sqrt(2.0) * kappa))
                                   : long(std::ceil(be.alpha * kappa / normA));
  // The round count is charged from the theorem; the simulated rotation stops
  // at the optimal step so over-rotation cannot sink the success probability.
  const double amp = std::min(1.0, imageNorm / be.alpha);
  const double theta = std::asin(amp);
  const long optimal =
      std::max<long>(0, long(std::floor(M_PI / (4.0 * std::max(theta, 1e-12)) - 0.5)));
  const long used = std::min(rounds, optimal);
  const double success = std::pow(std::sin((2.0 * used + 1.0) * theta), 2);

  AppliedState out;
  out.state = make_state(image / imageNorm, {{"I", be.systemQubits}});
  out.rounds = rounds;
  out.successProb = success;
  out.chargedQueries = scaled_weights(be.queryWeights, double(2 * rounds + 1));
  out.chargedQueries["prepare_b"] += double(2 * rounds + 1);
  return out;
}

VtResult variable_time_invert(const BlockEncoding& be, const StateVector& b, double kappa,
                              double delta, int maxQubits) {
  if (kappa < 1.0) throw PreconditionError("variable_time_invert: kappa must be at least 1");
  check_delta(delta, "variable_time_invert");
  check_alpha_floor(be, "variable_time_invert");
  {
    const double l = safe_log(kappa / delta);
    check_epsilon(be, 0.125 * delta / (kappa * kappa * kappa * l * l), "variable_time_invert");
  }
  if (b.dim() != be.blockDim()) {
    std::ostringstream os;
    os << "variable_time_invert: state dimension " << b.dim()
       << " does not match the system register dimension " << be.blockDim();
    throw PreconditionError(os.str());
  }

  const int m = std::max(1, int(std::ceil(std::log2(kappa))) + 1);
  const int sDil = be.systemQubits + 1;
  const int totalQubits = 1 + m + be.ancillaCount + sDil;
  if (totalQubits > maxQubits) {
    std::ostringstream os;
    os << "variable_time_invert: cascade needs " << totalQubits
       << " qubits, above the cap of " << maxQubits;
    throw PreconditionError(os.str());
  }

  SvdResult dec = svd(be.block);
  const double zeroCut = check_spectrum(dec.singularValues, be, kappa, "variable_time_invert");
  const Index p = be.blockDim();

  // Components of b on the left singular basis; weight on zero modes means b
  // leaves the invertible span.
  Vector comps = dec.leftVectors.adjoint() * b.amplitudes;
  double outside = 0.0;
  std::vector<Index> live;
  for (Index k = 0; k < p; ++k) {
    if (dec.singularValues(k) <= zeroCut)
      outside += std::norm(comps(k));
    else if (std::norm(comps(k)) > 0.0)
      live.push_back(k);
  }
  if (outside > 1e-10) {
    std::ostringstream os;
    os << "variable_time_invert: b carries weight " << outside
       << " outside the span of the left singular vectors";
    throw PreconditionError(os.str());
  }

  const double aMax = 2.0 * kappa;
  const double epsStage = delta / (aMax * double(m));

  // Stage data. Windows discriminate at phi_j = gamma_j / 2 so a component
  // stops once sigma >= gamma_j; each inversion stays valid one octave below
  // its own threshold so gap stragglers meet an accurate rotation at both
  // stages they straddle.
  struct Stage {
    double gammaJ = 0.0;
    const ApproxPolynomial* window = nullptr;
    const ApproxPolynomial* inverse = nullptr;
    double scale = 0.0;
    double windowDeg = 0.0;
  };
  std::vector<Stage> stages(static_cast<size_t>(m));
  for (int j = 1; j <= m; ++j) {
    Stage& st = stages[size_t(j - 1)];
    st.gammaJ = std::max(std::pow(2.0, -j), 1.0 / kappa);
    if (j < m) {
      st.window = &cached_sign(epsStage, 0.5 * st.gammaJ / be.alpha, 0.75 * st.gammaJ / be.alpha);
      st.windowDeg = double(st.window->degree);
    }
    st.inverse = &cached_inverse(2.0 * be.alpha / st.gammaJ, be.alpha * epsStage);
    st.scale = 4.0 / (st.gammaJ * aMax);
  }

  // The cascade acts diagonally on the eigencomponents of the Hermitian
  // dilation [[0, B], [B+, 0]]; each component (singular value s, sign +-)
  // only ever mixes the flag with the one-hot clock patterns, so its state is
  // a real 2 x (m+1) array indexed by flag and stop slot (slot 0 = still
  // running, slot j = stopped at stage j).
  const Index clockDim = Index(1) << m;
  const Index ancDim = Index(1) << be.ancillaCount;
  const Index dilDim = 2 * p;
  Vector full = Vector::Zero(2 * clockDim * ancDim * dilDim);
  RealVector stopProbs = RealVector::Zero(m);
  double pSucc = 0.0;
  double formulaSum = 0.0;

  for (Index k : live) {
    const double x = dec.singularValues(k);
    const double weight = std::norm(comps(k)) / 2.0;  // each dilation sign carries half
    formulaSum += std::norm(comps(k)) / std::pow(be.alpha * x, 2);
    for (int sign = 0; sign < 2; ++sign) {
      const double lambda = sign == 0 ? x : -x;
      Eigen::Matrix<double, 2, Eigen::Dynamic> amp =
          Eigen::Matrix<double, 2, Eigen::Dynamic>::Zero(2, m + 1);
      amp(0, 0) = 1.0;
      for (int j = 1; j <= m; ++j) {
        const Stage& st = stages[size_t(j - 1)];
        const double w =
            j == m ? 1.0
                   : std::clamp((1.0 - eval_in_unit(*st.window, lambda)) / 2.0, 0.0, 1.0);
        const double cw = std::sqrt(1.0 - w);
        const double sw = std::sqrt(w);
        for (int f = 0; f < 2; ++f) {
          const double running = amp(f, 0);
          amp(f, 0) = cw * running;
          amp(f, j) = sw * running;
        }
        const double q =
            std::clamp(st.scale * eval_in_unit(*st.inverse, lambda), -1.0, 1.0);
        const double cq = std::sqrt(1.0 - q * q);
        const double a0 = amp(0, j);
        const double a1 = amp(1, j);
        amp(0, j) = cq * a0 - q * a1;
        amp(1, j) = q * a0 + cq * a1;
      }
      for (int j = 1; j <= m; ++j)
        stopProbs(j - 1) += weight * (amp(0, j) * amp(0, j) + amp(1, j) * amp(1, j));
      // Reverse-order cleanup, controlled on the flag and every other clock
      // zero, folds the stopped flagged amplitudes back into the all-zero
      // clock pattern.
      for (int j = m; j >= 1; --j) {
        const Stage& st = stages[size_t(j - 1)];
        const double w =
            j == m ? 1.0
                   : std::clamp((1.0 - eval_in_unit(*st.window, lambda)) / 2.0, 0.0, 1.0);
        const double cw = std::sqrt(1.0 - w);
        const double sw = std::sqrt(w);
        const double a0 = amp(1, 0);
        const double aj = amp(1, j);
        amp(1, 0) = cw * a0 + sw * aj;
        amp(1, j) = -sw * a0 + cw * aj;
      }
      for (int f = 0; f < 2; ++f)
        for (int slot = 0; slot <= m; ++slot) {
          if (f == 1) pSucc += weight * amp(f, slot) * amp(f, slot);
          if (std::abs(amp(f, slot)) < 1e-15) continue;
          const Index clockCode = slot == 0 ? 0 : Index(1) << (m - slot);
          const Index base = (((Index(f) << m) | clockCode) << be.ancillaCount) * dilDim;
          const Complex coeff = comps(k) / std::sqrt(2.0) * amp(f, slot);
          const double signFactor = sign == 0 ? 1.0 : -1.0;
          full.segment(base, p) += coeff / std::sqrt(2.0) * dec.leftVectors.col(k);
          full.segment(base + p, p) +=
              signFactor * coeff / std::sqrt(2.0) * dec.rightVectors.col(k);
        }
    }
  }

  // Stopping profile in query units: a branch halting at stage j has paid for
  // the windows up to j plus its own inversion.
  RealVector stopTimes = RealVector::Zero(m);
  double windowSum = 0.0;
  double totalDegree = 0.0;
  for (int j = 1; j <= m; ++j) {
    const Stage& st = stages[size_t(j - 1)];
    windowSum += st.windowDeg;
    stopTimes(j - 1) = windowSum + double(st.inverse->degree);
    totalDegree += st.windowDeg + double(st.inverse->degree);
  }

  VtStats stats;
  stats.m = m;
  stats.stopTimes = stopTimes;
  stats.stopProbs = stopProbs;
  stats.l2AvgTime = std::sqrt(stopProbs.dot(stopTimes.cwiseProduct(stopTimes)));
  stats.maxTime = stopTimes(m - 1);
  stats.successProb = pSucc;
  stats.amplitudeConst = aMax;

  if (pSucc <= 0.0)
    throw PreconditionError("variable_time_invert: flagged branch has no amplitude");
  const double theta = std::asin(std::min(1.0, std::sqrt(pSucc)));
  const long rounds =
      std::max<long>(0, long(std::ceil(M_PI / (4.0 * std::max(theta, 1e-12)) - 0.5)));

  for (Index i = 0; i < full.size(); ++i)
    if ((i / (ancDim * dilDim)) >> m == 0) full(i) = 0.0;
  const double flagNorm = full.norm();
  full /= flagNorm;

  VtResult out;
  out.state = make_state(std::move(full), {{"F", 1},
                                           {"C", m},
                                           {"Q", be.ancillaCount},
                                           {"I", sDil}});
  out.stats = stats;
  out.rounds = rounds;
  out.chargedQueries = scaled_weights(be.queryWeights, totalDegree * double(2 * rounds + 1));
  out.chargedQueries["prepare_b"] += double(2 * rounds + 1);

  // The proof-side success floor: pSucc should track the component formula.
  const double predicted = formulaSum / (aMax * aMax);
  if (pSucc < 0.5 * predicted) {
    std::ostringstream os;
    os << "variable_time_invert: success probability " << pSucc
       << " fell below half the component prediction " << predicted;
    throw std::runtime_error(os.str());
  }
  return out;
}

BlockEncoding neg_power_be(const BlockEncoding& be, double exponent, double delta,
                           double kappa) {
  if (!(exponent > 0.0 && exponent < 1.0)) {
    std::ostringstream os;
    os << "neg_power_be: exponent must lie in (0, 1), got " << exponent;
    throw PreconditionError(os.str());
  }
  check_delta(delta, "neg_power_be");
  check_alpha_floor(be, "neg_power_be");
  const double asym = (be.block - be.block.adjoint()).norm();
  if (asym > 2.0 * be.epsilon / be.alpha + 1e-8)
    throw PreconditionError("neg_power_be: target must be Hermitian positive definite");

  Eigen::SelfAdjointEigenSolver<Matrix> eig((be.block + be.block.adjoint()) / 2.0);
  const RealVector& lam = eig.eigenvalues();
  const double top = lam.size() ? lam(lam.size() - 1) : 0.0;
  if (top <= 0.0) throw PreconditionError("neg_power_be: singular target");
  const double zeroCut = kDefaultRankTol * top;
  const double bottom = lam(0);
  if (bottom <= zeroCut) throw PreconditionError("neg_power_be: singular target");

  if (kappa <= 0.0) kappa = 1.0 / (be.alpha * bottom);
  if (kappa < 1.0) kappa = 1.0;
  {
    const double slack = be.epsilon + 1e-9;
    if (be.alpha * bottom < 1.0 / kappa - slack || be.alpha * top > 1.0 + slack) {
      std::ostringstream os;
      os << "neg_power_be: spectrum outside declared range, eigenvalues span ["
         << be.alpha * bottom << ", " << be.alpha * top << "] against [" << 1.0 / kappa
         << ", 1]";
      throw PreconditionError(os.str());
    }
  }
  check_epsilon(be,
                0.125 * delta / (std::pow(kappa, exponent + 1.0) * safe_log(kappa / delta)),
                "neg_power_be");

  const double alphaOut = 2.0 * std::pow(kappa, exponent);
  ApproxPolynomial power =
      neg_power_poly(exponent, delta / (2.0 * alphaOut), 1.0 / (kappa * be.alpha));
  RealVector vals(lam.size());
  for (Index j = 0; j < lam.size(); ++j) vals(j) = eval_in_unit(power, lam(j));
  Matrix block = eig.eigenvectors() * vals.asDiagonal() * eig.eigenvectors().adjoint();

  BlockEncoding out;
  out.block = std::move(block);
  out.alpha = alphaOut;
  out.ancillaCount = be.ancillaCount + 1;
  out.epsilon = delta;
  out.systemQubits = be.systemQubits;
  out.logicalRows = be.logicalRows;
  out.logicalCols = be.logicalCols;
  out.rowMap = be.rowMap;
  out.colMap = be.colMap;
  out.queryWeights = scaled_weights(be.queryWeights, double(power.degree));
  return out;
}

}  // namespace qlsq
