#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "common.hpp"
#include "qlsq/be_arith.hpp"
#include "qlsq/solvers.hpp"

using namespace qlsq;

namespace {

// Test-side Moore-Penrose pseudoinverse through the SVD.
Matrix pinv_ref(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> dec(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  RealVector s = dec.singularValues();
  Matrix inv = Matrix::Zero(m.cols(), m.rows());
  for (Index k = 0; k < s.size(); ++k)
    if (s(k) > 1e-10 * s(0)) inv += (1.0 / s(k)) * dec.matrixV().col(k) * dec.matrixU().col(k).adjoint();
  return inv;
}

// Test-side fractional power of a Hermitian positive definite matrix.
Matrix frac_power_ref(const Matrix& m, double power) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
  RealVector lam = eig.eigenvalues();
  RealVector vals(lam.size());
  for (Index j = 0; j < lam.size(); ++j) vals(j) = std::pow(lam(j), power);
  return eig.eigenvectors() * vals.asDiagonal() * eig.eigenvectors().adjoint();
}

// Test-side step oracle: 0 keeps the flag, 1 flips it, -1 marks the gap where
// no behavior is promised.
int flag_ref(double sigma, double phi) {
  if (sigma <= phi) return 0;
  if (sigma >= 2.0 * phi) return 1;
  return -1;
}

Matrix diag2(double a, double b) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

Vector unit2(Complex a, Complex b) {
  Vector v(2);
  v << a, b;
  return v / v.norm();
}

// Ideal cascade output: flag set, clocks and ancillas cleared, the bottom half
// of the doubled input register holding the normalized pseudoinverse image.
Vector vt_ideal(const BlockEncoding& be, const Vector& bBlock, int m) {
  Vector x = pinv_ref(be.block) * bBlock;
  x /= x.norm();
  const Index p = be.blockDim();
  const Index dil = 2 * p;
  Vector full = Vector::Zero((Index(1) << (1 + m + be.ancillaCount)) * dil);
  const Index base = ((Index(1) << m) << be.ancillaCount) * dil;
  full.segment(base + p, p) = x;
  return full;
}

// Singular value off every stage edge: log2 at least 0.1 away from an integer
// and strictly inside (1/kappa, 1).
double off_edge_sigma(std::mt19937_64& g, double kappa) {
  std::uniform_real_distribution<double> u(-std::log2(kappa) + 0.1, -0.1);
  for (;;) {
    const double e = u(g);
    if (std::abs(e - std::round(e)) >= 0.1) return std::exp2(e);
  }
}

}  // namespace

TEST_CASE("state vectors enforce their layout and norm") {
  Vector amps = Vector::Zero(4);
  amps(2) = 1.0;
  StateVector sv = make_state(amps, {{"F", 1}, {"I", 1}});
  CHECK(sv.totalQubits() == 2);

  CHECK_THROWS_AS(make_state(amps, {{"I", 3}}), PreconditionError);
  Vector loose = amps * 1.5;
  CHECK_THROWS_AS(make_state(loose, {{"F", 1}, {"I", 1}}), PreconditionError);

  // A rectangular encoding pads the system register; the column map routes the
  // logical entries into it.
  Matrix a = Matrix::Zero(2, 3);
  a(0, 0) = 1.0;
  a(1, 2) = 0.5;
  BlockEncoding be = encode_exact(a, 2.0);
  Vector b(3);
  b << 2.0, 0.0, 1.0;
  StateVector in = input_state(be, b);
  REQUIRE(in.dim() == be.blockDim());
  CHECK(std::abs(in.amplitudes(0) - Complex(2.0 / std::sqrt(5.0))) < 1e-12);
  CHECK(std::abs(in.amplitudes(2) - Complex(1.0 / std::sqrt(5.0))) < 1e-12);
  Vector back = logical_slice(in.amplitudes, be.colMap);
  CHECK(std::abs(back(1)) == 0.0);

  CHECK_THROWS_AS(input_state(be, Vector(Vector::Zero(3))), PreconditionError);

  auto g = testutil::rng(701);
  Vector x = testutil::random_state(g, 4);
  CHECK(phase_free_distance(x, Complex(0.0, 1.0) * x) < 1e-12);
  Vector y = Vector::Zero(4);
  y(0) = 1.0;
  Vector z = Vector::Zero(4);
  z(1) = 1.0;
  CHECK(phase_free_distance(y, z) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("discriminator flags singular values on either side of the threshold") {
  const double phi = 0.2;
  const double delta = 1e-3;
  BlockEncoding be = encode_exact(diag2(0.1, 0.9), 2.0, "U_A");
  BlockEncoding d = svd_discriminator(be, phi, delta);
  CHECK(d.alpha == 1.0);
  CHECK(d.ancillaCount == be.ancillaCount + 1);
  CHECK(d.epsilon == delta);
  CHECK(d.systemQubits == be.systemQubits + 1);
  CHECK(d.queryWeights.at("U_A") > 10.0);

  const Matrix& dd = d.block;
  CHECK((dd.adjoint() * dd - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-10);
  // sigma = 0.1 <= phi keeps the flag; sigma = 0.9 >= 2 phi flips it.
  CHECK(std::abs(dd(0, 0)) > 1.0 - delta);
  CHECK(std::abs(dd(3, 1)) > 1.0 - delta);
  CHECK(std::abs(dd(1, 1)) < std::sqrt(delta));

  // A singular value inside the gap promises nothing beyond unitarity.
  BlockEncoding gap = svd_discriminator(encode_exact(diag2(0.3, 0.9), 2.0), phi, delta);
  CHECK((gap.block.adjoint() * gap.block - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-10);

  // Random spectra resampled off the gap: flag fidelity per right singular
  // vector against the step oracle.
  auto g = testutil::rng(702);
  std::uniform_real_distribution<double> u(0.02, 0.98);
  for (int trial = 0; trial < 40; ++trial) {
    const Index n = 2 + trial % 3;
    RealVector sig(n);
    for (Index j = 0; j < n; ++j) {
      double s = u(g);
      while (s > phi - 0.02 && s < 2.0 * phi + 0.04) s = u(g);
      sig(j) = s;
    }
    std::sort(sig.data(), sig.data() + n, std::greater<double>());
    bool spaced = true;
    for (Index j = 1; j < n; ++j) spaced = spaced && sig(j - 1) - sig(j) > 0.02;
    if (!spaced) continue;
    Matrix a = testutil::random_with_spectrum(g, sig, n, n);
    BlockEncoding enc = encode_exact(a, 2.0);
    BlockEncoding disc = svd_discriminator(enc, phi, delta);
    Eigen::JacobiSVD<Matrix> dec(enc.block, Eigen::ComputeFullV);
    const Index p = enc.blockDim();
    for (Index j = 0; j < n; ++j) {
      const int want = flag_ref(2.0 * dec.singularValues()(j), phi);
      REQUIRE(want >= 0);
      Vector in = Vector::Zero(2 * p);
      in.head(p) = dec.matrixV().col(j);
      Vector out = disc.block * in;
      Vector expect = Vector::Zero(2 * p);
      expect.segment(want == 1 ? p : 0, p) = dec.matrixV().col(j);
      CHECK(phase_free_distance(out, expect) < delta);
    }
  }

  CHECK_THROWS_AS(svd_discriminator(be, 0.6, delta), PreconditionError);
  CHECK_THROWS_AS(svd_discriminator(be, 0.0, delta), PreconditionError);
  BlockEncoding noisy = be;
  noisy.epsilon = 1e-4;
  CHECK_THROWS_WITH_AS(svd_discriminator(noisy, phi, delta),
                       doctest::Contains("admissible bound"), PreconditionError);
  BlockEncoding tight = encode_exact(diag2(0.1, 0.9), 1.0);
  CHECK_THROWS_WITH_AS(svd_discriminator(tight, phi, delta), doctest::Contains("alpha"),
                       PreconditionError);
}

TEST_CASE("pseudoinverse encoding matches the dense oracle") {
  const double delta = 1e-3;
  Matrix a = diag2(1.0, 0.5);
  BlockEncoding be = encode_exact(a, 2.0, "U_A");
  BlockEncoding pinv = pseudo_inverse_be(be, 2.0, delta);
  CHECK(pinv.alpha == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(pinv.ancillaCount == be.ancillaCount + 1);
  CHECK(pinv.epsilon == delta);
  CHECK(pinv.queryWeights.at("U_A") > 10.0);
  CHECK((encoded_block(pinv) - pinv_ref(a)).norm() < delta);
  CHECK(std::abs(pinv.block(0, 0) - Complex(0.25)) < delta);
  CHECK(std::abs(pinv.block(1, 1) - Complex(0.5)) < delta);

  // A unitary target is its own inverse up to the adjoint.
  auto g = testutil::rng(703);
  Matrix q = testutil::random_unitary(g, 4);
  BlockEncoding unit = pseudo_inverse_be(encode_exact(q, 2.0), 1.0, delta);
  CHECK(verify_encoding(unit, Matrix(q.adjoint())) < delta);

  // Rank deficiency: the null direction stays null.
  Matrix r = Matrix::Zero(3, 3);
  r(0, 0) = 1.0;
  r(1, 1) = 0.5;
  BlockEncoding rankDef = pseudo_inverse_be(encode_exact(r, 2.0), 2.0, delta);
  Matrix encR = encoded_block(rankDef);
  CHECK(encR.col(2).norm() < 1e-9);
  CHECK((encR - pinv_ref(r)).norm() < delta);
  Matrix proj = encR * r;
  Matrix wantProj = pinv_ref(r) * r;
  CHECK((proj - wantProj).norm() < 2.0 * delta * 2.0);

  CHECK_THROWS_WITH_AS(pseudo_inverse_be(encode_exact(a, 1.0), 2.0, delta),
                       doctest::Contains("alpha"), PreconditionError);
  CHECK_THROWS_WITH_AS(pseudo_inverse_be(be, 1.5, delta), doctest::Contains("spectrum"),
                       PreconditionError);
  BlockEncoding noisy = be;
  noisy.epsilon = 1e-3;
  CHECK_THROWS_WITH_AS(pseudo_inverse_be(noisy, 2.0, delta),
                       doctest::Contains("admissible bound"), PreconditionError);
}

TEST_CASE("window inverter isolates the inverse on the flagged branch") {
  const double delta = 1e-3;
  BlockEncoding be = encode_exact(diag2(1.0, 0.5), 2.0);
  REQUIRE(be.ancillaCount == 1);
  WindowUnitary w = window_inverter(be, 0.5, delta);
  CHECK(w.aMax == doctest::Approx(4.0).epsilon(1e-14));
  REQUIRE(w.unitary.rows() == 8);
  CHECK((w.unitary.adjoint() * w.unitary - Matrix::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-10);

  Vector in = Vector::Zero(8);
  in(0) = in(1) = 1.0 / std::sqrt(2.0);
  Vector out = w.unitary * in;
  // Flagged branch carries A+ b / a_max = (1, 2) / (4 sqrt 2); the flagged
  // ancilla-1 slice stays empty.
  CHECK(std::abs(out(4) - Complex(1.0 / (4.0 * std::sqrt(2.0)))) < delta);
  CHECK(std::abs(out(5) - Complex(2.0 / (4.0 * std::sqrt(2.0)))) < delta);
  CHECK(out.segment(6, 2).norm() < 1e-12);
  const double flagNorm = out.segment(4, 4).norm();
  CHECK(std::abs(flagNorm - std::sqrt(2.5) / 4.0) < delta);
  Vector dir = out.segment(4, 2);
  CHECK(phase_free_distance(dir / dir.norm(), unit2(1.0, 2.0)) < delta);

  // gamma = 1 with the top singular vector: amplitude 1/(a_max sigma) = 1/2.
  WindowUnitary top = window_inverter(be, 1.0, delta);
  CHECK(top.aMax == doctest::Approx(2.0).epsilon(1e-14));
  Vector e1 = Vector::Zero(8);
  e1(0) = 1.0;
  Vector outTop = top.unitary * e1;
  CHECK(std::abs(outTop(4) - Complex(0.5)) < delta);
  CHECK(std::abs(outTop(5)) < delta);

  // a_max follows the supplied condition bound, not gamma.
  CHECK(window_inverter(be, 0.5, delta, 4.0).aMax == doctest::Approx(8.0));
  CHECK(window_inverter(be, 0.25, delta, 4.0).aMax == doctest::Approx(8.0));

  CHECK_THROWS_AS(window_inverter(be, 0.0, delta), PreconditionError);
  CHECK_THROWS_AS(window_inverter(be, 1.2, delta), PreconditionError);
  CHECK_THROWS_WITH_AS(window_inverter(be, 0.5, delta, 1.5), doctest::Contains("1/gamma"),
                       PreconditionError);
  BlockEncoding noisy = be;
  noisy.epsilon = 1e-3;
  CHECK_THROWS_WITH_AS(window_inverter(noisy, 0.5, delta),
                       doctest::Contains("admissible bound"), PreconditionError);
}

TEST_CASE("apply reaches the normalized image state") {
  const double delta = 1e-3;
  BlockEncoding be = encode_exact(diag2(1.0, 0.5), 2.0, "U_A");

  StateVector e1 = input_state(be, Vector(unit2(1.0, 0.0)));
  AppliedState fixed = apply_be_to_state(be, e1, 2.0, delta);
  CHECK(phase_free_distance(fixed.state.amplitudes, unit2(1.0, 0.0)) < 1e-12);

  StateVector b = input_state(be, Vector(unit2(1.0, 1.0)));
  AppliedState res = apply_be_to_state(be, b, 2.0, delta);
  CHECK(phase_free_distance(res.state.amplitudes, unit2(2.0, 1.0)) < 1e-10);
  CHECK(res.rounds == 4);
  CHECK(res.successProb > 0.4);
  CHECK(res.chargedQueries.at("U_A") == doctest::Approx(9.0));
  CHECK(res.chargedQueries.at("prepare_b") == doctest::Approx(9.0));

  // Pre-amplified inputs charge the cheaper round count.
  BlockEncoding amped = amplify(be, 1e-4);
  AppliedState pre = apply_be_to_state(amped, b, 2.0, delta, true);
  CHECK(pre.rounds == 3);
  CHECK(phase_free_distance(pre.state.amplitudes, unit2(2.0, 1.0)) < delta);

  // A perturbed input vector moves the output by no more than the combined
  // budget.
  auto g = testutil::rng(704);
  const double eta = 5e-4;
  Vector bp = b.amplitudes + eta * testutil::random_state(g, 2);
  bp /= bp.norm();
  AppliedState shifted = apply_be_to_state(be, make_state(bp, {{"I", 1}}), 2.0, delta);
  CHECK(phase_free_distance(shifted.state.amplitudes, unit2(2.0, 1.0)) < 2e-3);

  BlockEncoding droppy = encode_exact(diag2(1.0, 0.0), 2.0);
  Vector lost(2);
  lost << 0.0, 1.0;
  StateVector kernelState = make_state(lost, {{"I", 1}});
  CHECK_THROWS_WITH_AS(apply_be_to_state(droppy, kernelState, 1.0, delta),
                       doctest::Contains("amplification floor"), PreconditionError);
  BlockEncoding noisy = be;
  noisy.epsilon = 1e-3;
  CHECK_THROWS_WITH_AS(apply_be_to_state(noisy, b, 2.0, delta),
                       doctest::Contains("admissible bound"), PreconditionError);
}

TEST_CASE("variable time inversion returns the solution with its stopping profile") {
  const double delta = 1e-3;
  const double kappa = 2.0;
  BlockEncoding be = encode_exact(diag2(1.0, 0.5), 2.0, "U_A");

  // A singular vector input stops at the stage covering its singular value.
  StateVector b2 = input_state(be, Vector(unit2(0.0, 1.0)));
  VtResult lone = variable_time_invert(be, b2, kappa, delta);
  REQUIRE(lone.stats.m == 2);
  CHECK(lone.stats.amplitudeConst == doctest::Approx(4.0));
  CHECK(lone.stats.stopProbs(0) > 0.9);
  CHECK(phase_free_distance(lone.state.amplitudes, vt_ideal(be, b2.amplitudes, 2).eval()) <
        delta);

  StateVector b = input_state(be, Vector(unit2(1.0, 1.0)));
  VtResult res = variable_time_invert(be, b, kappa, delta);
  CHECK(phase_free_distance(res.state.amplitudes, vt_ideal(be, b.amplitudes, 2).eval()) < delta);

  const VtStats& st = res.stats;
  CHECK(st.stopProbs.sum() <= 1.0 + 1e-9);
  CHECK(st.stopProbs.sum() > 1.0 - 2.0 * delta);
  CHECK(st.l2AvgTime ==
        doctest::Approx(std::sqrt(st.stopProbs.dot(st.stopTimes.cwiseProduct(st.stopTimes))))
            .epsilon(1e-12));
  CHECK(st.maxTime == st.stopTimes(st.m - 1));
  for (int j = 1; j < st.m; ++j) CHECK(st.stopTimes(j) >= st.stopTimes(j - 1));

  // Success probability against the component formula (1/a_max^2) sum |c|^2/s^2.
  const double predicted = (0.5 / 1.0 + 0.5 / 0.25) / 16.0;
  const double epsStage = delta / (4.0 * 2.0);
  CHECK(std::abs(st.successProb - predicted) < 0.1 * predicted + 10.0 * 2.0 * epsStage);

  // Stopping times follow the stage shape 2^j log(2^j / eps') up to a bounded
  // constant.
  double lo = 1e300, hi = 0.0;
  for (int j = 1; j <= st.m; ++j) {
    const double model = std::exp2(j) * std::log(std::exp2(j) / epsStage);
    const double ratio = st.stopTimes(j - 1) / model;
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  CHECK(hi / lo < 16.0);

  CHECK(res.chargedQueries.at("prepare_b") == doctest::Approx(double(2 * res.rounds + 1)));
  CHECK(res.chargedQueries.at("U_A") > 100.0);

  std::vector<std::pair<std::string, int>> layout = {{"F", 1}, {"C", 2}, {"Q", 1}, {"I", 2}};
  CHECK(res.state.registerLayout == layout);

  CHECK_THROWS_WITH_AS(variable_time_invert(be, b, kappa, delta, 5),
                       doctest::Contains("above the cap"), PreconditionError);
  BlockEncoding droppy = encode_exact(diag2(1.0, 0.0), 2.0);
  Vector lost(2);
  lost << 0.0, 1.0;
  CHECK_THROWS_WITH_AS(variable_time_invert(droppy, make_state(lost, {{"I", 1}}), 1.0, delta),
                       doctest::Contains("span"), PreconditionError);
  BlockEncoding noisy = be;
  noisy.epsilon = 1e-4;
  CHECK_THROWS_WITH_AS(variable_time_invert(noisy, b, kappa, delta),
                       doctest::Contains("admissible bound"), PreconditionError);
}

TEST_CASE("negative powers recover the dense fractional inverse") {
  const double delta = 1e-3;
  // Omega = diag(4, 1) normalized to diag(1, 0.25); its inverse square root is
  // proportional to diag(0.5, 1).
  BlockEncoding be = encode_exact(diag2(1.0, 0.25), 2.0, "U_O");
  BlockEncoding half = neg_power_be(be, 0.5, delta, 4.0);
  CHECK(half.alpha == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(half.ancillaCount == be.ancillaCount + 1);
  CHECK(half.epsilon == delta);
  CHECK(half.queryWeights.at("U_O") > 10.0);
  CHECK(std::abs(half.block(0, 0) - Complex(0.25)) < delta);
  CHECK(std::abs(half.block(1, 1) - Complex(0.5)) < delta);
  CHECK(verify_encoding(half, frac_power_ref(diag2(1.0, 0.25), -0.5)) < delta);

  // The measured condition number reproduces the explicit one.
  BlockEncoding measured = neg_power_be(be, 0.5, delta);
  CHECK(measured.alpha == doctest::Approx(4.0).epsilon(1e-9));

  BlockEncoding ident = neg_power_be(encode_exact(Matrix(Matrix::Identity(2, 2)), 2.0), 0.5, delta);
  CHECK(verify_encoding(ident, Matrix(Matrix::Identity(2, 2))) < delta);

  auto g = testutil::rng(705);
  Matrix omega = testutil::random_spd(g, 4, 8.0);
  BlockEncoding encOmega = encode_exact(omega, 2.0);
  for (double c : {0.5, 0.3}) {
    BlockEncoding out = neg_power_be(encOmega, c, delta, 8.0);
    CHECK(out.alpha == doctest::Approx(2.0 * std::pow(8.0, c)));
    CHECK(verify_encoding(out, frac_power_ref(omega, -c)) < delta);
  }

  CHECK_THROWS_WITH_AS(neg_power_be(be, 0.0, delta), doctest::Contains("exponent"),
                       PreconditionError);
  CHECK_THROWS_WITH_AS(neg_power_be(be, 1.0, delta), doctest::Contains("exponent"),
                       PreconditionError);
  Matrix skew = testutil::random_matrix(g, 2, 2);
  CHECK_THROWS_WITH_AS(neg_power_be(encode_exact(skew, spectral_norm(skew) * 2.0), 0.5, delta),
                       doctest::Contains("Hermitian"), PreconditionError);
  CHECK_THROWS_WITH_AS(neg_power_be(encode_exact(diag2(1.0, 0.0), 2.0), 0.5, delta),
                       doctest::Contains("singular"), PreconditionError);
  BlockEncoding noisy = be;
  noisy.epsilon = 1e-3;
  CHECK_THROWS_WITH_AS(neg_power_be(noisy, 0.5, delta, 4.0),
                       doctest::Contains("admissible bound"), PreconditionError);
}

TEST_CASE("solver invariants hold across randomized instances") {
  auto g = testutil::rng(706);
  const double delta = 1e-3;
  const double kappas[] = {2.0, 4.0, 8.0};

  for (int trial = 0; trial < 40; ++trial) {
    const double kappa = kappas[trial % 3];
    const Index n = 2 + trial % 3;
    RealVector sig(n);
    for (Index j = 0; j < n; ++j) sig(j) = off_edge_sigma(g, kappa);
    std::sort(sig.data(), sig.data() + n, std::greater<double>());
    Matrix a = testutil::random_with_spectrum(g, sig, n, n);
    BlockEncoding be = encode_exact(a, 2.0);

    // Right-hand side drawn inside the image so the cascade always applies.
    Vector bLog = a * testutil::random_state(g, n);
    if (bLog.norm() < 0.2) continue;
    StateVector b = input_state(be, Vector(bLog / bLog.norm()));

    VtResult res = variable_time_invert(be, b, kappa, delta);
    const VtStats& st = res.stats;
    CHECK(phase_free_distance(res.state.amplitudes, vt_ideal(be, b.amplitudes, st.m).eval()) <
          delta);
    CHECK(st.stopProbs.sum() <= 1.0 + 1e-9);
    CHECK(st.l2AvgTime ==
          doctest::Approx(std::sqrt(st.stopProbs.dot(st.stopTimes.cwiseProduct(st.stopTimes))))
              .epsilon(1e-12));
    for (int j = 1; j < st.m; ++j) CHECK(st.stopTimes(j) >= st.stopTimes(j - 1));

    // Clock marginals only rest on stages whose scale sits within a factor of
    // two of an actual singular value.
    for (int j = 1; j <= st.m; ++j) {
      if (st.stopProbs(j - 1) <= 2.0 * delta) continue;
      const double scale = std::exp2(-j);
      bool near = false;
      for (Index k = 0; k < n; ++k)
        near = near || (scale >= 0.49 * sig(k) && scale <= 2.04 * sig(k));
      CHECK(near);
    }

    double formula = 0.0;
    Eigen::JacobiSVD<Matrix> dec(a, Eigen::ComputeFullU);
    Vector comps = dec.matrixU().adjoint() * Vector(bLog / bLog.norm());
    for (Index k = 0; k < n; ++k)
      formula += std::norm(comps(k)) / std::pow(dec.singularValues()(k), 2);
    const double predicted = formula / (st.amplitudeConst * st.amplitudeConst);
    const double epsStage = delta / (st.amplitudeConst * st.m);
    CHECK(std::abs(st.successProb - predicted) < 0.1 * predicted + 10.0 * st.m * epsStage);

    // Qubit accounting: flag plus clocks on top of the input ancillas, and no
    // other registers.
    std::vector<std::pair<std::string, int>> layout = {
        {"F", 1}, {"C", st.m}, {"Q", be.ancillaCount}, {"I", be.systemQubits + 1}};
    CHECK(res.state.registerLayout == layout);

    // Pseudoinverse times the target projects onto the row space.
    BlockEncoding pinv = pseudo_inverse_be(be, kappa, delta);
    Matrix proj = encoded_block(pinv) * a;
    CHECK((proj - pinv_ref(a) * a).norm() < 2.0 * delta * kappa);

    // Window inverter at gamma = 1/kappa: the flagged branch is the
    // pseudoinverse image scaled by 1/a_max.
    WindowUnitary w = window_inverter(be, 1.0 / kappa, delta, kappa);
    const Index p = be.blockDim();
    const Index half = w.unitary.rows() / 2;
    Vector in = Vector::Zero(w.unitary.rows());
    in.head(p) = b.amplitudes;
    Vector out = w.unitary * in;
    Vector flagged = out.segment(half, half);
    Vector want = Vector::Zero(half);
    want.head(p) = pinv_ref(Matrix(be.alpha * be.block)) * b.amplitudes / w.aMax;
    CHECK((flagged - want).norm() < delta);
  }
}
