#ifndef PSIM_METRICS_HPP
#define PSIM_METRICS_HPP

#include "psim/branches.hpp"

namespace psim {

/// 2x2 reduced density matrix of the system, environment traced out.
DensityMatrix reduced_density(const StateVector& state, const Scenario& s);

/// r(t) = exp(i (Lambda_up - Lambda_down) / hbar); unit magnitude.
cxd decoherence_factor(const BranchFamily& family, double t);

/// Running trapezoid average A(T) = (1/(T - t0)) int_{t0}^{T} v dt at
/// each node; A(t0) = v(t0).
std::vector<cxd> time_average(const std::vector<cxd>& values,
                              const std::vector<double>& times);

struct DecoherenceTimes {
    double tau_estimate = 0.0; // hbar / |lambda_up - lambda_down| (rate difference)
    double tau_single_rate = 0.0;    // hbar / max(|lambda_up|, |lambda_down|) (single-rate form)
    double tau_measured = 0.0; // first |running average of r| <= threshold crossing
};

/// Measures the decoherence time from the family's action records.
/// Requires constant coupling and distinct action rates; the crossing is
/// interpolated linearly between grid nodes.
DecoherenceTimes decoherence_time(const BranchFamily& family, double threshold = 0.5);

/// |<a|b>|; with normalize set, inputs are normalized first.
double fidelity(const StateVector& a, const StateVector& b, bool normalize = false);

/// Time series of the decoherence observables along the family grid.
struct DecoherenceReport {
    std::vector<double> times;
    std::vector<double> coherence_magnitude;  // |rho_up,down(t)| of the superposed state
    std::vector<cxd> factor;                  // r(t)
    std::vector<cxd> averaged_factor;         // running average of r from t0
    DecoherenceTimes taus;
};

DecoherenceReport decoherence_report(const BranchFamily& family, const Scenario& s);

} // namespace psim

#endif
