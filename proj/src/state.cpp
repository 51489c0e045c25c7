#include "qlsq/state.hpp"

#include <cmath>
#include <sstream>

namespace qlsq {

int StateVector::totalQubits() const {
  int total = 0;
  for (const auto& reg : registerLayout) total += reg.second;
  return total;
}

StateVector make_state(Vector amplitudes, std::vector<std::pair<std::string, int>> layout) {
  int total = 0;
  for (const auto& reg : layout) {
    if (reg.first.empty()) throw PreconditionError("make_state: register name must not be empty");
    if (reg.second < 0) throw PreconditionError("make_state: register width must be non-negative");
    total += reg.second;
  }
  if ((Index(1) << total) != amplitudes.size()) {
    std::ostringstream os;
    os << "make_state: layout declares " << total << " qubits but the amplitude vector has length "
       << amplitudes.size();
    throw PreconditionError(os.str());
  }
  const double norm = amplitudes.norm();
  if (std::abs(norm - 1.0) > 1e-10) {
    std::ostringstream os;
    os << "make_state: state norm " << norm << " is not 1 to within 1e-10";
    throw PreconditionError(os.str());
  }
  StateVector sv;
  sv.amplitudes = std::move(amplitudes);
  sv.registerLayout = std::move(layout);
  return sv;
}

StateVector input_state(const BlockEncoding& be, const Vector& b) {
  if (Index(b.size()) != be.logicalCols) {
    std::ostringstream os;
    os << "input_state: vector length " << b.size() << " does not match the logical column count "
       << be.logicalCols;
    throw PreconditionError(os.str());
  }
  Vector padded = Vector::Zero(be.blockDim());
  for (Index j = 0; j < be.logicalCols; ++j) padded(be.colMap[size_t(j)]) = b(j);
  const double norm = padded.norm();
  if (norm < 1e-14) throw PreconditionError("input_state: vector has no weight");
  padded /= norm;
  return make_state(std::move(padded), {{"I", be.systemQubits}});
}

Vector logical_slice(const Vector& amplitudes, const std::vector<Index>& map) {
  Vector out(Index(map.size()));
  for (size_t i = 0; i < map.size(); ++i) {
    if (map[i] < 0 || map[i] >= amplitudes.size())
      throw PreconditionError("logical_slice: map entry outside the amplitude vector");
    out(Index(i)) = amplitudes(map[i]);
  }
  return out;
}

double phase_free_distance(const Vector& x, const Vector& y) {
  if (x.size() != y.size()) throw PreconditionError("phase_free_distance: dimension mismatch");
  const double overlap = std::abs(x.dot(y));
  const double gap = std::max(0.0, x.squaredNorm() + y.squaredNorm() - 2.0 * overlap);
  return std::sqrt(gap);
}

}  // namespace qlsq
