#pragma once

// Serial, unoptimized implementations of the simulation kernels. They store
// every path in full and never terminate early; tests require the parallel
// kernels to reproduce them bit for bit.

#include <vector>

#include "mbexit/simulate.hpp"

namespace mbexit::reference {

ExitEstimate estimate_exit_direct(const Boundary& b, const SimConfig& cfg);
ExitEstimate estimate_exit_girsanov(const Boundary& b, const SimConfig& cfg);
std::vector<TauSample> sample_tau(const Boundary& b, const SimConfig& cfg);
WindowSurvival window_survival(const Boundary& b, double t0, const SimConfig& cfg);
MeanEstimate bessel_mean(double s, const SimConfig& cfg);

}  // namespace mbexit::reference
