#pragma once

#include <string>
#include <utility>
#include <vector>

#include "qlsq/block_encoding.hpp"
#include "qlsq/types.hpp"

namespace qlsq {

// Simulated register state. The layout names the registers most significant
// first; widths are qubit counts and must sum to log2 of the amplitude length.
struct StateVector {
  Vector amplitudes;
  std::vector<std::pair<std::string, int>> registerLayout;

  int totalQubits() const;
  Index dim() const { return amplitudes.size(); }
};

// Validates the layout against the amplitude length and enforces unit norm to
// 1e-10.
StateVector make_state(Vector amplitudes, std::vector<std::pair<std::string, int>> layout);

// Routes the entries of b through the encoding's column map into the system
// register, zero-pads the rest, and normalizes. Rejects b with no weight.
StateVector input_state(const BlockEncoding& be, const Vector& b);

// Picks the mapped entries back out of a system-register amplitude vector.
Vector logical_slice(const Vector& amplitudes, const std::vector<Index>& map);

// Distance minimized over a global phase, sqrt(2 - 2|<x|y>|) for unit inputs.
double phase_free_distance(const Vector& x, const Vector& y);

}  // namespace qlsq
