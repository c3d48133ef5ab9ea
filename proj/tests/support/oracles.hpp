// Independent oracles used by the test suites. Everything here stays on
// its own code path: no psim propagators, no psim partial trace.
#ifndef PSIM_TEST_ORACLES_HPP
#define PSIM_TEST_ORACLES_HPP

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace psim::test {

using cxd = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Classic RK4 on i hbar dpsi/dt = h psi with fixed step count.
inline Vector rk4_schrodinger(const Matrix& h, const Vector& psi0, double t, int steps,
                              double hbar = 1.0) {
    const cxd minus_i_over_hbar(0.0, -1.0 / hbar);
    double dt = t / steps;
    Vector psi = psi0;
    for (int k = 0; k < steps; ++k) {
        Vector k1 = minus_i_over_hbar * (h * psi);
        Vector k2 = minus_i_over_hbar * (h * (psi + 0.5 * dt * k1));
        Vector k3 = minus_i_over_hbar * (h * (psi + 0.5 * dt * k2));
        Vector k4 = minus_i_over_hbar * (h * (psi + dt * k3));
        psi += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return psi;
}

/// Richardson-extrapolated RK4 (order 4): runs at dt and dt/2 and removes
/// the leading error term.
inline Vector rk4_richardson(const Matrix& h, const Vector& psi0, double t, int steps,
                             double hbar = 1.0) {
    Vector coarse = rk4_schrodinger(h, psi0, t, steps, hbar);
    Vector fine = rk4_schrodinger(h, psi0, t, 2 * steps, hbar);
    return fine + (fine - coarse) / 15.0;
}

/// Brute-force partial trace of a pure state by explicit double-index
/// summation: rho_sys(i,j) = sum_k Psi(i,k) conj(Psi(j,k)).
inline Matrix index_sum_reduced_system(const Vector& psi, int d_sys, int d_env) {
    Matrix rho = Matrix::Zero(d_sys, d_sys);
    for (int i = 0; i < d_sys; ++i)
        for (int j = 0; j < d_sys; ++j)
            for (int k = 0; k < d_env; ++k)
                rho(i, j) += psi(i * d_env + k) * std::conj(psi(j * d_env + k));
    return rho;
}

/// Same summation keeping the environment factor.
inline Matrix index_sum_reduced_environment(const Vector& psi, int d_sys, int d_env) {
    Matrix rho = Matrix::Zero(d_env, d_env);
    for (int k = 0; k < d_env; ++k)
        for (int l = 0; l < d_env; ++l)
            for (int i = 0; i < d_sys; ++i)
                rho(k, l) += psi(i * d_env + k) * std::conj(psi(i * d_env + l));
    return rho;
}

/// Kronecker product evaluated through direct vector action (no psim).
inline Vector kron_apply(const Matrix& a, const Matrix& b, const Vector& x,
                         const Vector& y) {
    Vector ax = a * x;
    Vector by = b * y;
    Vector out(ax.size() * by.size());
    for (int i = 0; i < ax.size(); ++i)
        for (int j = 0; j < by.size(); ++j) out(i * by.size() + j) = ax(i) * by(j);
    return out;
}

} // namespace psim::test

#endif
