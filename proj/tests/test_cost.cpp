#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "common.hpp"
#include "qlsq/cost.hpp"
#include "qlsq/poly.hpp"
#include "qlsq/qsvt.hpp"
#include "qlsq/solvers.hpp"
#include "qlsq/state.hpp"

using namespace qlsq;

namespace {

Matrix diag2(double a, double b) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

// Log factor used when dividing corrections out of measured counts.
double logc(double x) { return std::max(1.0, std::log(x)); }

// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= double(x.size());
  my /= double(y.size());
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    num += (x[i] - mx) * (y[i] - my);
    den += (x[i] - mx) * (x[i] - mx);
  }
  return num / den;
}

// Runs the inversion cascade on diag(1, 1/kappa) with a balanced input.
VtResult cascade_run(double kappa, double delta) {
  BlockEncoding be = encode_exact(diag2(1.0, 1.0 / kappa), 2.0, "U_A");
  Vector b(2);
  b << Complex(1.0 / std::sqrt(2.0), 0.0), Complex(1.0 / std::sqrt(2.0), 0.0);
  return variable_time_invert(be, make_state(b, {{"I", 1}}), kappa, delta);
}

}  // namespace

TEST_CASE("cost ledgers accumulate, refuse negatives, and merge by parts") {
  CostLedger ledger;
  ledger.add("U_A", 3.0);
  ledger.add("U_A", 2.0);
  ledger.add("U_b", 4.0);
  CHECK(ledger.counts.at("U_A") == doctest::Approx(5.0));
  CHECK(ledger.total() == doctest::Approx(9.0));
  CHECK_THROWS_AS(ledger.add("U_A", -1.0), PreconditionError);

  ledger.recordDegree("stage_0", 5);
  ledger.recordDegree("stage_0", 3);
  CHECK(ledger.degreeLog.at("stage_0") == 5);
  ledger.recordDegree("stage_0", 7);
  CHECK(ledger.degreeLog.at("stage_0") == 7);
  CHECK_THROWS_AS(ledger.recordDegree("stage_0", -1), PreconditionError);

  CostLedger other;
  other.add("U_A", 1.5);
  other.add("U_L", 2.5);
  other.recordDegree("stage_0", 4);
  other.recordDegree("stage_1", 9);
  other.aaRounds = 3;
  ledger.aaRounds = 2;
  CostLedger merged = ledger;
  merged.merge(other);
  CHECK(merged.counts.at("U_A") == doctest::Approx(6.5));
  CHECK(merged.counts.at("U_L") == doctest::Approx(2.5));
  CHECK(merged.degreeLog.at("stage_0") == 7);
  CHECK(merged.degreeLog.at("stage_1") == 9);
  CHECK(merged.aaRounds == 5);
  CHECK(merged.total() == doctest::Approx(ledger.total() + other.total()));

  // A composed run's total equals the sum over its sub-stages, in any order.
  auto g = testutil::rng(17);
  std::uniform_real_distribution<double> amount(0.0, 10.0);
  std::uniform_int_distribution<int> pick(0, 3);
  const char* tags[] = {"U_A", "U_L", "U_b", "U_Omega"};
  std::vector<CostLedger> parts(20);
  double expected = 0.0;
  for (CostLedger& part : parts) {
    int entries = 1 + pick(g);
    for (int e = 0; e < entries; ++e) {
      double q = amount(g);
      part.add(tags[pick(g)], q);
      expected += q;
    }
  }
  CostLedger forward, backward;
  for (size_t i = 0; i < parts.size(); ++i) forward.merge(parts[i]);
  for (size_t i = parts.size(); i-- > 0;) backward.merge(parts[i]);
  CHECK(forward.total() == doctest::Approx(expected).epsilon(1e-12));
  CHECK(backward.total() == doctest::Approx(forward.total()).epsilon(1e-12));
}

TEST_CASE("prediction formulas reproduce their frozen reference values") {
  std::map<std::string, double> ols = {{"kappa", 8.0},  {"delta", 1e-3}, {"lambda", 4.0},
                                       {"alphaA", 2.0}, {"alphaL", 1.0}, {"normA", 1.0},
                                       {"normL", 1.0}};
  CHECK(predict("OLS-Thm", ols).value == doctest::Approx(199.3424043961328).epsilon(1e-9));

  std::map<std::string, double> ridge = {{"kappa", 3.0},
                                         {"delta", 1e-3},
                                         {"lambda", 0.25},
                                         {"alphaA", std::sqrt(2.0)},
                                         {"normA", 1.0}};
  CHECK(predict("Ridge-Cor", ridge).value == doctest::Approx(33.67443840040792).epsilon(1e-9));

  std::map<std::string, double> wls = {{"kappa", 8.0},  {"delta", 1e-2}, {"lambda", 1.0},
                                       {"alphaB", 3.0}, {"alphaL", 1.0}, {"normA", 1.0},
                                       {"normL", 1.0},  {"wMax", 4.0}};
  CHECK(predict("WLS-Thm", wls).value == doctest::Approx(148.26943270947098).epsilon(1e-9));

  std::map<std::string, double> gls = {{"kappa", 4.0},       {"delta", 1e-2}, {"kappaOmega", 4.0},
                                       {"alphaA", 2.0},      {"alphaL", 1.0}, {"alphaOmega", 4.0},
                                       {"normA", 1.0},       {"normL", 1.0},  {"normOmega", 2.0}};
  CHECK(predict("GLS-Thm", gls).value == doctest::Approx(27901.437052748155).epsilon(1e-9));

  std::map<std::string, double> mi = {{"kappa", 4.0}, {"alpha", 2.0}, {"delta", 1e-3}};
  CHECK(predict("MI-QSVT", mi).value == doctest::Approx(66.35239712081622).epsilon(1e-9));

  std::map<std::string, double> neg = {
      {"kappa", 4.0}, {"alpha", 2.0}, {"c", 0.5}, {"delta", 1e-3}};
  CHECK(predict("NegPower", neg).value == doctest::Approx(66.35239712081622).epsilon(1e-9));

  CostPrediction once = predict("GLS-Thm", gls);
  CostPrediction again = predict("GLS-Thm", gls);
  CHECK(once.value == again.value);
  CHECK(once.inputs.at("kappaOmega") == 4.0);

  // Every formula produces a finite positive count from one shared input pool.
  std::map<std::string, double> pool = {
      {"kappa", 4.0},  {"delta", 1e-3}, {"lambda", 1.0},  {"alphaA", 2.0}, {"alphaL", 1.0},
      {"normA", 1.0},  {"normL", 1.0},  {"alphaB", 2.0},  {"wMax", 4.0},   {"alphaOmega", 2.0},
      {"normOmega", 1.0}, {"kappaOmega", 2.0}, {"tMax", 10.0}, {"t2norm", 5.0}, {"t1", 1.0},
      {"pSucc", 0.5},  {"alpha", 2.0},  {"c", 0.5}};
  const char* ids[] = {"OLS-Thm", "Ridge-Cor", "WLS-Thm", "GLS-Thm",
                       "VTAA-Q",  "MI-QSVT",   "NegPower"};
  for (const char* id : ids) {
    CostPrediction p = predict(id, pool);
    CAPTURE(id);
    CHECK(p.value > 0.0);
    CHECK(std::isfinite(p.value));
    CHECK(p.formulaId == id);
  }
}

TEST_CASE("variable-time query formula collapses to its trivial closed form") {
  // T'_max = 2 T_max / t_1 = 2, both log factors clamp to one, no preparation
  // overhead: the count is just t_max + t_2 / sqrt(p_succ).
  std::map<std::string, double> p = {
      {"tMax", 10.0}, {"t2norm", 10.0}, {"t1", 10.0}, {"pSucc", 1.0}};
  CostPrediction flat = predict("VTAA-Q", p);
  CHECK(flat.value == doctest::Approx(20.0).epsilon(1e-12));
  CHECK(flat.annotations.size() >= 1);

  p["pSucc"] = 0.25;
  CHECK(predict("VTAA-Q", p).value == doctest::Approx(30.0).epsilon(1e-12));

  // Preparation terms (T_U + k) / sqrt(p_prep) = 6 shift both addends.
  std::map<std::string, double> prep = {{"tMax", 10.0}, {"t2norm", 10.0}, {"t1", 10.0},
                                        {"pSucc", 1.0}, {"TU", 2.0},      {"k", 1.0},
                                        {"pPrep", 0.25}};
  CHECK(predict("VTAA-Q", prep).value == doctest::Approx(32.0).epsilon(1e-12));
}

TEST_CASE("ridge prediction trace is emitted for inspection") {
  std::map<std::string, double> p = {
      {"kappa", 2.0}, {"delta", 1e-3}, {"lambda", 1.0}, {"alphaA", 2.0}, {"normA", 1.0}};
  CostPrediction pred = predict("Ridge-Cor", p);
  MESSAGE("ridge query estimate at condition number 2: " << pred.value);
  for (const std::string& note : pred.annotations) MESSAGE(note);
  CHECK(pred.value > 0.0);
  CHECK(std::isfinite(pred.value));
}

TEST_CASE("prediction rejects missing parameters and unknown formulas") {
  std::map<std::string, double> thin = {{"kappa", 4.0}, {"delta", 1e-3}};
  CHECK_THROWS_WITH_AS(predict("OLS-Thm", thin), doctest::Contains("needs parameter"),
                       PreconditionError);
  CHECK_THROWS_WITH_AS(predict("MI-QSVT", thin), doctest::Contains("'alpha'"),
                       PreconditionError);
  CHECK_THROWS_WITH_AS(predict("Grover", thin), doctest::Contains("unknown formula id"),
                       PreconditionError);
  std::map<std::string, double> halted = {
      {"tMax", 10.0}, {"t2norm", 10.0}, {"t1", 0.0}, {"pSucc", 1.0}};
  CHECK_THROWS_AS(predict("VTAA-Q", halted), PreconditionError);
}

TEST_CASE("inversion prediction tracks the measured polynomial degree within a factor of four") {
  const double delta = 1e-3;
  for (double kappa : {2.0, 4.0, 8.0}) {
    std::map<std::string, double> p = {{"kappa", kappa}, {"alpha", 1.0}, {"delta", delta}};
    double predicted = predict("MI-QSVT", p).value;
    double measured = double(inversion_poly(kappa, delta).degree);
    CAPTURE(kappa);
    CAPTURE(predicted);
    CAPTURE(measured);
    CHECK(measured / predicted >= 0.25);
    CHECK(measured / predicted <= 4.0);
  }
}

TEST_CASE("cascade query counts scale near-linearly in kappa with log corrections") {
  const double delta = 1e-3;
  const std::vector<double> kappas = {4.0, 8.0, 16.0};
  std::vector<double> counts;
  for (double k : kappas) counts.push_back(cascade_run(k, delta).chargedQueries.at("U_A"));

  // Doubling kappa at fixed delta moves the data-oracle count by a
  // near-linear factor.
  for (size_t i = 1; i < counts.size(); ++i) {
    double factor = counts[i] / counts[i - 1];
    CAPTURE(factor);
    CHECK(factor >= 1.6);
    CHECK(factor <= 3.0);
  }

  // Dividing out both log corrections leaves a residual power near one.
  std::vector<double> x, y;
  for (size_t i = 0; i < kappas.size(); ++i) {
    x.push_back(std::log(kappas[i]));
    y.push_back(std::log(counts[i] / (logc(kappas[i]) * logc(kappas[i] / delta))));
  }
  double slope = fit_slope(x, y);
  CAPTURE(slope);
  CHECK(slope >= 0.9);
  CHECK(slope <= 1.3);

  // Tightening delta at fixed kappa adds queries in even log(1/delta) steps.
  double loose = cascade_run(8.0, 1e-2).chargedQueries.at("U_A");
  double mid = cascade_run(8.0, 1e-3).chargedQueries.at("U_A");
  double tight = cascade_run(8.0, 1e-4).chargedQueries.at("U_A");
  double firstStep = mid - loose;
  double secondStep = tight - mid;
  CAPTURE(firstStep);
  CAPTURE(secondStep);
  CHECK(firstStep > 0.0);
  CHECK(std::abs(secondStep / firstStep - 1.0) <= 0.25);

  // The comparison report carries the measured counts alongside the estimate.
  VtResult res = cascade_run(8.0, delta);
  CostLedger ledger;
  for (const auto& [tag, q] : res.chargedQueries) ledger.add(tag, q);
  std::map<std::string, double> p = {{"kappa", 8.0}, {"alpha", 2.0}, {"delta", delta}};
  CostComparison cmp = compare(predict("MI-QSVT", p), ledger);
  CHECK_FALSE(cmp.empty);
  CHECK(cmp.measuredByOracle.at("U_A") == doctest::Approx(res.chargedQueries.at("U_A")));
  CHECK(cmp.ratio == doctest::Approx(cmp.measured / cmp.predicted));
  MESSAGE("inversion estimate vs cascade measurement ratio: " << cmp.ratio);
}

TEST_CASE("singular-value transforms charge exactly their polynomial degree") {
  BlockEncoding be = encode_exact(diag2(1.0, 0.5), 2.0, "U_A");
  ApproxPolynomial inv = inversion_poly(4.0, 1e-3);
  QsvtApplication app = qsvt_apply(be, inv);
  CHECK(app.chargedQueries == inv.degree);

  ApproxPolynomial sg = sign_poly(1e-3, 0.3, 0.5);
  QsvtApplication viaCircuit = qsvt_apply(be, sg, QsvtMode::circuit);
  CHECK(viaCircuit.chargedQueries == sg.degree);
}

TEST_CASE("comparisons divide measured totals by predictions and flag empty ledgers") {
  CostPrediction pred;
  pred.formulaId = "MI-QSVT";
  pred.value = 10.0;
  CostLedger ledger;
  ledger.add("U_A", 25.0);
  CostComparison cmp = compare(pred, ledger);
  CHECK_FALSE(cmp.empty);
  CHECK(cmp.formulaId == "MI-QSVT");
  CHECK(cmp.measured == doctest::Approx(25.0));
  CHECK(cmp.ratio == doctest::Approx(2.5));
  CHECK(cmp.measuredByOracle.at("U_A") == doctest::Approx(25.0));

  CostLedger blank;
  CostComparison nothing = compare(pred, blank);
  CHECK(nothing.empty);
  CHECK(nothing.measured == 0.0);
  CHECK(nothing.ratio == 0.0);
  CHECK(nothing.measuredByOracle.empty());
}
