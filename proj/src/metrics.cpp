#include "psim/metrics.hpp"

#include <cmath>

namespace psim {

DensityMatrix reduced_density(const StateVector& state, const Scenario& s) {
    if (state.total_dim() != s.total_dim())
        raise_validation("state dimension does not match the scenario");
    StateVector shaped = StateVector::create({2, s.environment_dim()}, state.amplitudes);
    return partial_trace(pure_density(shaped), shaped.dims, 0);
}

cxd decoherence_factor(const BranchFamily& family, double t) {
    return std::exp(cxd(0.0, family.delta_lambda(t) / family.hbar));
}

std::vector<cxd> time_average(const std::vector<cxd>& values,
                              const std::vector<double>& times) {
    if (values.size() != times.size())
        raise_validation("values/times length mismatch");
    if (values.size() < 2)
        raise_validation("running average needs at least two nodes");
    for (size_t k = 1; k < times.size(); ++k)
        if (times[k] <= times[k - 1]) raise_validation("times must be strictly ascending");

    std::vector<cxd> avg(values.size());
    avg[0] = values[0];
    cxd acc = 0.0;
    for (size_t k = 1; k < values.size(); ++k) {
        acc += 0.5 * (times[k] - times[k - 1]) * (values[k - 1] + values[k]);
        avg[k] = acc / (times[k] - times[0]);
    }
    return avg;
}

DecoherenceTimes decoherence_time(const BranchFamily& family, double threshold) {
    // the linear-rate estimate only makes sense for constant coupling
    // (non-demolition action grows linearly there)
    if (!family.constant_coupling)
        raise(ErrorCode::unsupported,
              "decoherence time requires a constant coupling profile");
    DecoherenceTimes out;
    double rate_up = family.up.action.mean_rate();
    double rate_down = family.down.action.mean_rate();
    double diff = std::abs(rate_up - rate_down);
    if (diff < 1e-12)
        raise(ErrorCode::degeneracy, "action rates are degenerate; no decoherence time");
    out.tau_estimate = family.hbar / diff;
    double single = std::max(std::abs(rate_up), std::abs(rate_down));
    out.tau_single_rate = single > 0.0 ? family.hbar / single : 0.0;

    std::vector<cxd> r(family.times.size());
    for (size_t k = 0; k < family.times.size(); ++k)
        r[k] = std::exp(cxd(0.0, (family.up.action.lambda[k] - family.down.action.lambda[k]) /
                                     family.hbar));
    std::vector<cxd> avg = time_average(r, family.times);

    out.tau_measured = -1.0;
    double prev = std::abs(avg[0]);
    for (size_t k = 1; k < avg.size(); ++k) {
        double cur = std::abs(avg[k]);
        if (cur <= threshold) {
            double f = prev > cur ? (prev - threshold) / (prev - cur) : 1.0;
            double t_lo = family.times[k - 1] - family.times[0];
            double t_hi = family.times[k] - family.times[0];
            out.tau_measured = t_lo + f * (t_hi - t_lo);
            break;
        }
        prev = cur;
    }
    if (out.tau_measured < 0.0)
        raise(ErrorCode::unsupported,
              "running average never crossed the threshold; extend the time grid");
    return out;
}

double fidelity(const StateVector& a, const StateVector& b, bool normalize) {
    if (a.dims != b.dims) raise_validation("fidelity requires matching dims");
    double f = std::abs(inner_product(a, b));
    if (normalize) {
        double na = a.norm(), nb = b.norm();
        if (na == 0.0 || nb == 0.0) raise_validation("cannot normalize the zero vector");
        f /= na * nb;
    }
    return std::min(f, 1.0 + 1e-12);
}

DecoherenceReport decoherence_report(const BranchFamily& family, const Scenario& s) {
    DecoherenceReport report;
    report.times = family.times;
    size_t n = family.times.size();
    report.factor.resize(n);
    report.coherence_magnitude.resize(n);
    const SystemBasis& basis = s.nondegenerate_basis();
    for (size_t k = 0; k < n; ++k) {
        double dl = family.up.action.lambda[k] - family.down.action.lambda[k];
        report.factor[k] = std::exp(cxd(0.0, dl / family.hbar));
        SuperposeResult sup = superpose_branches(family, family.times[k]);
        DensityMatrix rho = reduced_density(sup.state.normalized(), s);
        report.coherence_magnitude[k] = std::abs(cxd(basis.up.dot(rho.entries * basis.down)));
    }
    report.averaged_factor = time_average(report.factor, report.times);
    try {
        report.taus = decoherence_time(family);
    } catch (const Error&) {
        // degenerate rates or no crossing inside the grid: the series are
        // still reported, the taus stay unset
        report.taus = DecoherenceTimes{std::nan(""), std::nan(""), std::nan("")};
    }
    return report;
}

} // namespace psim
