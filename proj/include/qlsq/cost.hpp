#pragma once

#include <map>
#include <string>
#include <vector>

#include "qlsq/types.hpp"

namespace qlsq {

// Query-count accumulator for one run. Costs are oracle-query units, never
// wall-clock; counts only ever grow within a run.
struct CostLedger {
  std::map<std::string, double> counts;   // oracle tag -> invocations
  std::map<std::string, long> degreeLog;  // label -> polynomial degree used
  long aaRounds = 0;

  void add(const std::string& name, double n);
  void recordDegree(const std::string& label, long degree);
  // Associative, order-independent combination: counts and rounds add,
  // degrees keep the maximum per label.
  void merge(const CostLedger& other);
  double total() const;
};

// One evaluated cost formula with implied constants set to 1. Gate-level
// polylog factors of the input models are carried as annotations, not values.
struct CostPrediction {
  std::string formulaId;
  std::map<std::string, double> inputs;
  double value = 0.0;
  std::vector<std::string> annotations;
};

// formulaId is one of OLS-Thm, Ridge-Cor, WLS-Thm, GLS-Thm, VTAA-Q, MI-QSVT,
// NegPower; params must supply every name the formula reads.
CostPrediction predict(const std::string& formulaId,
                       const std::map<std::string, double>& params);

struct CostComparison {
  std::string formulaId;
  double predicted = 0.0;
  double measured = 0.0;
  double ratio = 0.0;  // measured / predicted
  std::map<std::string, double> measuredByOracle;
  bool empty = true;   // true when the ledger recorded nothing
};

CostComparison compare(const CostPrediction& prediction, const CostLedger& ledger);

}  // namespace qlsq
