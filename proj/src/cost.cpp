#include "qlsq/cost.hpp"

#include <cmath>
#include <sstream>

namespace qlsq {

namespace {

// Natural log clamped at 1 so small arguments cannot zero out or flip a
// prediction; every formula here sits inside an O(.) anyway.
double lnc(double x) { return std::log(std::max(x, std::exp(1.0))); }

double get(const std::map<std::string, double>& params, const std::string& name,
           const std::string& formulaId) {
  auto it = params.find(name);
  if (it == params.end()) {
    std::ostringstream os;
    os << "predict: formula " << formulaId << " needs parameter '" << name << "'";
    throw PreconditionError(os.str());
  }
  return it->second;
}

double get_or(const std::map<std::string, double>& params, const std::string& name,
              double fallback) {
  auto it = params.find(name);
  return it == params.end() ? fallback : it->second;
}

}  // namespace

void CostLedger::add(const std::string& name, double n) {
  if (n < 0.0) throw PreconditionError("CostLedger: query counts cannot decrease");
  counts[name] += n;
}

void CostLedger::recordDegree(const std::string& label, long degree) {
  if (degree < 0) throw PreconditionError("CostLedger: negative degree");
  long& slot = degreeLog[label];
  slot = std::max(slot, degree);
}

void CostLedger::merge(const CostLedger& other) {
  for (const auto& [name, n] : other.counts) add(name, n);
  for (const auto& [label, degree] : other.degreeLog) recordDegree(label, degree);
  aaRounds += other.aaRounds;
}

double CostLedger::total() const {
  double t = 0.0;
  for (const auto& [name, n] : counts) t += n;
  return t;
}

CostPrediction predict(const std::string& formulaId,
                       const std::map<std::string, double>& params) {
  CostPrediction out;
  out.formulaId = formulaId;
  out.inputs = params;

  if (formulaId == "OLS-Thm" || formulaId == "Ridge-Cor" || formulaId == "WLS-Thm") {
    const double kappa = get(params, "kappa", formulaId);
    const double delta = get(params, "delta", formulaId);
    const double lambda = get(params, "lambda", formulaId);
    const double rootLambda = std::sqrt(lambda);
    double alphaData, alphaL, normData, normL;
    if (formulaId == "Ridge-Cor") {
      alphaData = get(params, "alphaA", formulaId);
      normData = get(params, "normA", formulaId);
      alphaL = 1.0;
      normL = 1.0;
    } else if (formulaId == "WLS-Thm") {
      alphaData = get(params, "alphaB", formulaId);
      normData = std::sqrt(get(params, "wMax", formulaId)) * get(params, "normA", formulaId);
      alphaL = get(params, "alphaL", formulaId);
      normL = get(params, "normL", formulaId);
    } else {
      alphaData = get(params, "alphaA", formulaId);
      normData = get(params, "normA", formulaId);
      alphaL = get(params, "alphaL", formulaId);
      normL = get(params, "normL", formulaId);
    }
    const double ratio =
        (alphaData + rootLambda * alphaL) / (normData + rootLambda * normL);
    out.value = kappa * lnc(kappa) * ratio * lnc(kappa / delta);
    out.annotations.push_back("input-model gate factors polylog(Nd/delta) carried symbolically");
    out.annotations.push_back("headline form reconstructed from the stated corollaries");
    return out;
  }

  if (formulaId == "GLS-Thm") {
    const double kappa = get(params, "kappa", formulaId);
    const double kappaOmega = get(params, "kappaOmega", formulaId);
    const double delta = get(params, "delta", formulaId);
    const double alphaA = get(params, "alphaA", formulaId);
    const double alphaL = get(params, "alphaL", formulaId);
    const double alphaOmega = get(params, "alphaOmega", formulaId);
    const double normA = get(params, "normA", formulaId);
    const double normL = get(params, "normL", formulaId);
    const double normOmega = get(params, "normOmega", formulaId);
    const double theta = kappa * kappaOmega * normA / (delta * normOmega);
    const double cA = (alphaA / normA) * lnc(theta) * lnc(theta);
    const double cL = (alphaL / normL) * lnc(kappa * normL / delta) * lnc(kappa * normL / delta);
    const double cOmega =
        (alphaOmega * kappaOmega / normOmega) * lnc(theta) * lnc(theta) * lnc(theta);
    const double cB = 1.0;
    out.value = kappa * std::sqrt(kappaOmega) * lnc(kappa) * (cA + cL + cOmega + cB);
    out.annotations.push_back("coefficients C_A, C_L, C_Omega, C_b evaluated separately");
    out.annotations.push_back("headline form reconstructed from the stated corollaries");
    return out;
  }

  if (formulaId == "VTAA-Q") {
    const double tMax = get(params, "tMax", formulaId);
    const double t2 = get(params, "t2norm", formulaId);
    const double t1 = get(params, "t1", formulaId);
    const double pSucc = get(params, "pSucc", formulaId);
    const double pPrep = get_or(params, "pPrep", 1.0);
    const double tU = get_or(params, "TU", 0.0);
    const double k = get_or(params, "k", 0.0);
    if (!(t1 > 0.0) || !(pSucc > 0.0) || !(pPrep > 0.0))
      throw PreconditionError("predict: VTAA-Q needs positive t1, pSucc, pPrep");
    const double tPrimeMax = 2.0 * tMax / t1;
    const double prep = (tU + k) / std::sqrt(pPrep);
    out.value = (tMax + prep) * std::sqrt(lnc(tPrimeMax)) +
                (t2 + prep) * lnc(tPrimeMax) / std::sqrt(pSucc);
    out.annotations.push_back("T'_max = 2 T_max / t_1 in oracle-query units");
    return out;
  }

  if (formulaId == "MI-QSVT") {
    const double kappa = get(params, "kappa", formulaId);
    const double alpha = get(params, "alpha", formulaId);
    const double delta = get(params, "delta", formulaId);
    out.value = kappa * alpha * lnc(kappa / delta);
    return out;
  }

  if (formulaId == "NegPower") {
    const double kappa = get(params, "kappa", formulaId);
    const double alpha = get(params, "alpha", formulaId);
    const double c = get(params, "c", formulaId);
    const double delta = get(params, "delta", formulaId);
    out.value = alpha * kappa * std::max(1.0, c) * lnc(kappa / delta);
    return out;
  }

  throw PreconditionError("predict: unknown formula id '" + formulaId + "'");
}

CostComparison compare(const CostPrediction& prediction, const CostLedger& ledger) {
  CostComparison out;
  out.formulaId = prediction.formulaId;
  out.predicted = prediction.value;
  if (ledger.counts.empty()) return out;
  out.empty = false;
  out.measuredByOracle = ledger.counts;
  out.measured = ledger.total();
  out.ratio = prediction.value > 0.0 ? out.measured / prediction.value : 0.0;
  return out;
}

}  // namespace qlsq
