#ifndef PSIM_LINALG_HPP
#define PSIM_LINALG_HPP

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "psim/errors.hpp"

namespace psim {

using cxd = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Subsystem ordering convention, fixed project-wide: dims = {system, environment, ...},
// composite index i = i_sys * d_env + i_env (system is the slowest-varying factor).
// All tensor products and partial traces below follow this layout.

/// Hard cap on the total Hilbert-space dimension (product of dims).
/// Defaults to 4096; a process may override it once at startup
/// (the CLI honors the POINTER_SIM_MAX_DIM environment variable).
int max_total_dim();
void set_max_total_dim(int dim);

int product_dim(const std::vector<int>& dims);

/// Normalized (or about-to-be-normalized) complex amplitude vector over a
/// tensor-product space. Construction rejects NaN/Inf amplitudes and
/// length/dims mismatches; norm is the caller's contract.
struct StateVector {
    std::vector<int> dims;
    Vector amplitudes;

    static StateVector create(std::vector<int> dims, Vector amplitudes);

    int total_dim() const { return static_cast<int>(amplitudes.size()); }
    double norm() const { return amplitudes.norm(); }
    StateVector normalized() const;
};

/// Dense square operator on a tensor-product space. `hermitian` caches
/// max|A - A^dagger| <= 1e-12, checked once at construction.
struct Operator {
    std::vector<int> dims;
    Matrix entries;
    bool hermitian = false;

    static Operator create(std::vector<int> dims, Matrix entries);
    static Operator identity(std::vector<int> dims);

    int total_dim() const { return static_cast<int>(entries.rows()); }
};

/// Hermitian unit-trace operator; construction enforces Hermiticity and
/// trace within 1e-10. Positivity is checked by callers that need it
/// (see min_eigenvalue).
struct DensityMatrix {
    int dim = 0;
    Matrix entries;

    static DensityMatrix create(Matrix entries);
};

/// Kronecker product with dims concatenated: (A (x) B)(x (x) y) = Ax (x) By.
/// Raises a capacity error when the combined dimension exceeds the cap.
Operator tensor_product(const Operator& a, const Operator& b);
StateVector tensor_product(const StateVector& a, const StateVector& b);

/// U = exp(-i h dt / hbar) through the eigendecomposition of Hermitian h,
/// so the result is unitary to round-off. Non-Hermitian input is rejected.
Operator hermitian_propagator(const Operator& h, double dt, double hbar = 1.0);

StateVector apply(const Operator& op, const StateVector& psi);

/// Trace out every factor except `keep` (0-based index into dims).
DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& dims, int keep);

DensityMatrix pure_density(const StateVector& psi);

/// <a|b>, conjugate-linear in the first argument.
cxd inner_product(const StateVector& a, const StateVector& b);

double max_abs(const Matrix& m);

/// Smallest eigenvalue of a Hermitian matrix (positivity checks).
double min_eigenvalue(const Matrix& m);

bool is_hermitian(const Matrix& m, double tol = 1e-12);

} // namespace psim

#endif
