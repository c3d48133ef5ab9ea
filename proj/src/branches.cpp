#include "psim/branches.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <thread>

namespace psim {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kHalfPi = std::numbers::pi / 2.0;
} // namespace

int BranchFamily::node_index(double t) const {
    if (times.size() < 2) raise_validation("branch family has no time grid");
    double dt = times[1] - times[0];
    double x = (t - times.front()) / dt;
    int k = static_cast<int>(std::lround(x));
    if (k < 0 || k >= static_cast<int>(times.size()) || std::abs(times[k] - t) > 1e-9)
        raise_validation("time " + std::to_string(t) + " is not a family grid node");
    return k;
}

double BranchFamily::delta_lambda(double t) const {
    int k = node_index(t);
    return up.action.lambda[k] - down.action.lambda[k];
}

BranchFamily build_branch_family(const Scenario& s, int workers) {
    BranchFamily family;
    family.hbar = s.hbar;
    family.constant_coupling = s.interaction.coupling.is_constant();
    family.up = evolve_mean_field(0.0, s);
    family.down = evolve_mean_field(kHalfPi, s);
    family.times = family.up.action.times;

    double dl_max = 0.0;
    for (size_t k = 0; k < family.times.size(); ++k)
        dl_max = std::max(dl_max,
                          std::abs(family.up.action.lambda[k] - family.down.action.lambda[k]));
    family.profile = resolve_theta_profile(s.theta_profile, dl_max, s.hbar);

    size_t n = family.profile.nodes.size();
    family.branches.resize(n);
    int nw = std::max(1, workers);
    if (nw == 1 || n < 2) {
        for (size_t k = 0; k < n; ++k)
            family.branches[k] = evolve_mean_field(family.profile.nodes[k], s);
    } else {
        std::vector<std::thread> pool;
        std::atomic<size_t> next{0};
        std::exception_ptr first_error;
        std::mutex error_mutex;
        for (int w = 0; w < nw; ++w)
            pool.emplace_back([&] {
                for (size_t k = next.fetch_add(1); k < n; k = next.fetch_add(1)) {
                    try {
                        family.branches[k] = evolve_mean_field(family.profile.nodes[k], s);
                    } catch (...) {
                        std::lock_guard<std::mutex> lock(error_mutex);
                        if (!first_error) first_error = std::current_exception();
                        return;
                    }
                }
            });
        for (auto& th : pool) th.join();
        if (first_error) std::rethrow_exception(first_error);
    }
    return family;
}

double action_mixing_residual(const BranchFamily& family, double t) {
    int k = family.node_index(t);
    double l_up = family.up.action.lambda[k];
    double l_down = family.down.action.lambda[k];
    double residual = 0.0;
    for (size_t i = 0; i < family.branches.size(); ++i) {
        double th = family.branches[i].theta;
        double c = std::cos(th), sn = std::sin(th);
        double mixed = c * c * l_up + sn * sn * l_down;
        residual = std::max(residual,
                            std::abs(family.branches[i].action.lambda[k] - mixed));
    }
    return residual;
}

SuperposeResult superpose_branches(const BranchFamily& family, double t) {
    int k = family.node_index(t);
    const ThetaProfile& p = family.profile;

    // phase resolution between adjacent theta nodes
    double max_jump = 0.0;
    for (size_t i = 1; i < family.branches.size(); ++i)
        max_jump = std::max(max_jump,
                            std::abs(family.branches[i].action.lambda[k] -
                                     family.branches[i - 1].action.lambda[k]));
    if (max_jump / family.hbar > kPi / 4.0) {
        int n = static_cast<int>(p.nodes.size());
        int suggest = static_cast<int>(
            std::ceil(n * max_jump / (family.hbar * kPi / 4.0)));
        raise(ErrorCode::resolution,
              "theta quadrature under-resolved at t = " + std::to_string(t) +
                  " (max phase jump " + std::to_string(max_jump / family.hbar) +
                  " rad between adjacent nodes); increase node_count to about " +
                  std::to_string(suggest));
    }

    Vector acc = Vector::Zero(family.branches.front().states[k].total_dim());
    for (size_t i = 0; i < family.branches.size(); ++i)
        acc += (2.0 / kPi) * p.quad_weights[i] * p.weights[i] *
               family.branches[i].states[k].amplitudes;
    StateVector state{family.branches.front().states[k].dims, std::move(acc)};
    double norm = state.norm();
    return SuperposeResult{std::move(state), norm};
}

namespace {

cxd stationary_prefactor(cxd c_theta, double lambda_second, double hbar) {
    // principal branch of sqrt(2 pi hbar / (i L'')); for real L'' this is
    // sqrt(2 pi hbar / |L''|) exp(-i sgn(L'') pi/4)
    double mag = std::sqrt(2.0 * kPi * hbar / std::abs(lambda_second));
    double phase = (lambda_second > 0.0 ? -1.0 : 1.0) * kPi / 4.0;
    return c_theta * std::polar(mag, phase);
}

} // namespace

StationaryPointReport stationary_points(const BranchFamily& family, double t) {
    int k = family.node_index(t);
    double l_up = family.up.action.lambda[k];
    double l_down = family.down.action.lambda[k];
    double dl = l_up - l_down;
    if (std::abs(dl) < 10.0 * family.hbar * std::numeric_limits<double>::epsilon())
        raise(ErrorCode::degeneracy,
              "branch actions are degenerate at t = " + std::to_string(t) +
                  "; no stationary-phase selection is possible");

    StationaryPointReport report;
    // mixing law Lambda_theta = Lbar + (dl/2) cos 2theta gives
    // Lambda'' = -2 dl cos 2theta: -2 dl at theta = 0, +2 dl at pi/2
    StationaryPoint at_up{0.0, 2.0 * (l_down - l_up), cxd(0.0, 0.0)};
    StationaryPoint at_down{kHalfPi, 2.0 * (l_up - l_down), cxd(0.0, 0.0)};
    at_up.prefactor =
        stationary_prefactor(family.profile.weight_at(0.0), at_up.lambda_second, family.hbar);
    at_down.prefactor = stationary_prefactor(family.profile.weight_at(kHalfPi),
                                             at_down.lambda_second, family.hbar);
    report.points = {at_up, at_down};
    return report;
}

StateVector saddle_point_state(const BranchFamily& family, double t) {
    StationaryPointReport report = stationary_points(family, t);
    int k = family.node_index(t);
    Vector acc;
    bool first = true;
    for (const StationaryPoint& pt : report.points) {
        const BranchTrajectory& branch = pt.theta < kHalfPi / 2.0 ? family.up : family.down;
        cxd phase = std::exp(cxd(0.0, -branch.action.lambda[k] / family.hbar));
        StateVector total =
            tensor_product(branch.system_states[k], branch.environment_states[k]);
        Vector term = (2.0 / kPi) * report.boundary_weight * pt.prefactor * phase *
                      total.amplitudes;
        if (first) {
            acc = std::move(term);
            first = false;
        } else {
            acc += term;
        }
    }
    return StateVector{family.up.states[k].dims, std::move(acc)};
}

StationaryPointReport stationary_points_numeric(const Scenario& s, double t,
                                                double theta_tol) {
    auto lambda_at = [&](double theta) {
        return evolve_mean_field(theta, s).action.at(t);
    };

    // golden-section extremum search over [0, pi/2]
    auto golden = [&](bool maximize) {
        const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
        double a = 0.0, b = kHalfPi;
        double c = b - gr * (b - a), d = a + gr * (b - a);
        double fc = lambda_at(c), fd = lambda_at(d);
        while (b - a > theta_tol) {
            bool pick_left = maximize ? (fc > fd) : (fc < fd);
            if (pick_left) {
                b = d;
                d = c;
                fd = fc;
                c = b - gr * (b - a);
                fc = lambda_at(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + gr * (b - a);
                fd = lambda_at(d);
            }
        }
        return 0.5 * (a + b);
    };

    double th_max = golden(true);
    double th_min = golden(false);

    auto second_derivative = [&](double theta) {
        double h = 1e-4;
        double lo = std::clamp(theta - h, 0.0, kHalfPi);
        double hi = std::clamp(theta + h, 0.0, kHalfPi);
        double mid = 0.5 * (lo + hi);
        double step = 0.5 * (hi - lo);
        return (lambda_at(mid + step) - 2.0 * lambda_at(mid) + lambda_at(mid - step)) /
               (step * step);
    };

    // snap near-boundary extrema onto the boundary
    auto snap = [&](double th) {
        if (th < 10.0 * theta_tol) return 0.0;
        if (th > kHalfPi - 10.0 * theta_tol) return kHalfPi;
        return th;
    };
    th_max = snap(th_max);
    th_min = snap(th_min);
    if (std::abs(lambda_at(th_max) - lambda_at(th_min)) <
        10.0 * s.hbar * std::numeric_limits<double>::epsilon())
        raise(ErrorCode::degeneracy, "numeric action extrema are degenerate");

    BranchFamily stub; // profile weights for the prefactors
    stub.profile = resolve_theta_profile(s.theta_profile, std::abs(lambda_at(0.0)) + 1.0, s.hbar);
    StationaryPointReport report;
    for (double th : {std::min(th_max, th_min), std::max(th_max, th_min)}) {
        StationaryPoint pt{th, second_derivative(th), cxd(0.0, 0.0)};
        pt.prefactor = stationary_prefactor(stub.profile.weight_at(th), pt.lambda_second, s.hbar);
        report.points.push_back(pt);
    }
    return report;
}

cxd time_orthogonality(const BranchTrajectory& a, const BranchTrajectory& b,
                       const TimeGrid& window) {
    const auto& ta = a.action.times;
    if (ta != b.action.times)
        raise_validation("trajectories do not share a time grid");
    if (window.t0 < ta.front() - 1e-9 || window.t_end > ta.back() + 1e-9)
        raise_validation("window lies outside the trajectory range");
    if (!(window.t_end > window.t0))
        raise_validation("window must have positive length");

    std::vector<int> sel;
    for (size_t k = 0; k < ta.size(); ++k)
        if (ta[k] >= window.t0 - 1e-9 && ta[k] <= window.t_end + 1e-9)
            sel.push_back(static_cast<int>(k));
    if (sel.size() < 2)
        raise_validation("window covers fewer than two grid nodes");

    cxd acc = 0.0;
    for (size_t i = 1; i < sel.size(); ++i) {
        double dt = ta[sel[i]] - ta[sel[i - 1]];
        cxd lo = inner_product(a.states[sel[i - 1]], b.states[sel[i - 1]]);
        cxd hi = inner_product(a.states[sel[i]], b.states[sel[i]]);
        acc += 0.5 * dt * (lo + hi);
    }
    double span = ta[sel.back()] - ta[sel.front()];
    return acc / span;
}

} // namespace psim
