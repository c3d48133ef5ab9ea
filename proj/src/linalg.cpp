#include "psim/linalg.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>

namespace psim {

namespace {

int initial_max_dim() {
    // POINTER_SIM_MAX_DIM raises or lowers the cap per process
    if (const char* env = std::getenv("POINTER_SIM_MAX_DIM")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end && *end == '\0' && v >= 1 && v <= (1 << 22)) return static_cast<int>(v);
    }
    return 4096;
}

std::atomic<int> g_max_total_dim{initial_max_dim()};

} // namespace

int max_total_dim() { return g_max_total_dim.load(); }

void set_max_total_dim(int dim) {
    if (dim < 1) raise_validation("max total dimension must be positive");
    g_max_total_dim.store(dim);
}

int product_dim(const std::vector<int>& dims) {
    if (dims.empty()) raise_validation("dims list must not be empty");
    long long p = 1;
    for (int d : dims) {
        if (d < 1) raise_validation("subsystem dimensions must be positive");
        p *= d;
        if (p > g_max_total_dim.load())
            raise(ErrorCode::capacity,
                  "total Hilbert-space dimension exceeds the cap of " +
                      std::to_string(g_max_total_dim.load()));
    }
    return static_cast<int>(p);
}

bool is_hermitian(const Matrix& m, double tol) {
    if (m.rows() != m.cols()) return false;
    return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

double min_eigenvalue(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

StateVector StateVector::create(std::vector<int> dims, Vector amplitudes) {
    int n = product_dim(dims);
    if (n != amplitudes.size())
        raise_validation("state length " + std::to_string(amplitudes.size()) +
                         " does not match product of dims " + std::to_string(n));
    if (!amplitudes.allFinite()) raise_validation("state contains NaN or Inf amplitudes");
    return StateVector{std::move(dims), std::move(amplitudes)};
}

StateVector StateVector::normalized() const {
    double n = norm();
    if (n == 0.0) raise_validation("cannot normalize the zero vector");
    return StateVector{dims, amplitudes / n};
}

Operator Operator::create(std::vector<int> dims, Matrix entries) {
    int n = product_dim(dims);
    if (entries.rows() != entries.cols())
        raise_validation("operator matrix must be square");
    if (entries.rows() != n)
        raise_validation("operator side " + std::to_string(entries.rows()) +
                         " does not match product of dims " + std::to_string(n));
    if (!entries.allFinite()) raise_validation("operator contains NaN or Inf entries");
    bool herm = is_hermitian(entries);
    return Operator{std::move(dims), std::move(entries), herm};
}

Operator Operator::identity(std::vector<int> dims) {
    int n = product_dim(dims);
    return Operator{std::move(dims), Matrix::Identity(n, n), true};
}

Operator tensor_product(const Operator& a, const Operator& b) {
    std::vector<int> dims = a.dims;
    dims.insert(dims.end(), b.dims.begin(), b.dims.end());
    int n = product_dim(dims); // capacity check
    int na = a.total_dim(), nb = b.total_dim();
    Matrix out(n, n);
    for (int i = 0; i < na; ++i)
        for (int j = 0; j < na; ++j)
            out.block(i * nb, j * nb, nb, nb) = a.entries(i, j) * b.entries;
    return Operator{std::move(dims), std::move(out), a.hermitian && b.hermitian};
}

StateVector tensor_product(const StateVector& a, const StateVector& b) {
    std::vector<int> dims = a.dims;
    dims.insert(dims.end(), b.dims.begin(), b.dims.end());
    int n = product_dim(dims);
    int nb = b.total_dim();
    Vector out(n);
    for (int i = 0; i < a.total_dim(); ++i)
        out.segment(i * nb, nb) = a.amplitudes(i) * b.amplitudes;
    return StateVector{std::move(dims), std::move(out)};
}

Operator hermitian_propagator(const Operator& h, double dt, double hbar) {
    if (!h.hermitian)
        raise_validation("propagator generator must be Hermitian");
    if (!std::isfinite(dt)) raise_validation("time step must be finite");
    if (hbar <= 0.0) raise_validation("hbar must be positive");
    Eigen::SelfAdjointEigenSolver<Matrix> es(h.entries);
    if (es.info() != Eigen::Success)
        raise(ErrorCode::internal, "eigendecomposition failed");
    const auto& vals = es.eigenvalues();
    const Matrix& vecs = es.eigenvectors();
    Vector phases(vals.size());
    for (int k = 0; k < vals.size(); ++k)
        phases(k) = std::exp(cxd(0.0, -vals(k) * dt / hbar));
    Matrix u = vecs * phases.asDiagonal() * vecs.adjoint();
    return Operator{h.dims, std::move(u), false};
}

StateVector apply(const Operator& op, const StateVector& psi) {
    if (op.total_dim() != psi.total_dim())
        raise_validation("operator/state dimension mismatch");
    return StateVector{psi.dims, op.entries * psi.amplitudes};
}

DensityMatrix DensityMatrix::create(Matrix entries) {
    if (entries.rows() != entries.cols())
        raise_validation("density matrix must be square");
    if (!entries.allFinite()) raise_validation("density matrix contains NaN or Inf");
    if (!is_hermitian(entries, 1e-10))
        raise_validation("density matrix is not Hermitian within 1e-10");
    double tr = entries.trace().real();
    if (std::abs(tr - 1.0) > 1e-10)
        raise_validation("density matrix trace deviates from 1 by more than 1e-10");
    int dim = static_cast<int>(entries.rows());
    return DensityMatrix{dim, std::move(entries)};
}

DensityMatrix pure_density(const StateVector& psi) {
    StateVector n = psi.normalized();
    return DensityMatrix::create(n.amplitudes * n.amplitudes.adjoint());
}

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& dims, int keep) {
    int n = product_dim(dims);
    if (n != rho.dim)
        raise_validation("dims inconsistent with density matrix dimension");
    if (keep < 0 || keep >= static_cast<int>(dims.size()))
        raise_validation("keep index out of range");

    int dk = dims[keep];
    // strides for the kept index and the combined residual index
    int stride_keep = 1;
    for (size_t f = keep + 1; f < dims.size(); ++f) stride_keep *= dims[f];
    int n_rest = n / dk;

    // enumerate residual configurations by walking all composite indices
    // whose kept digit is zero
    std::vector<int> rest_indices;
    rest_indices.reserve(n_rest);
    for (int i = 0; i < n; ++i) {
        if ((i / stride_keep) % dk == 0) rest_indices.push_back(i);
    }

    Matrix out = Matrix::Zero(dk, dk);
    for (int a = 0; a < dk; ++a)
        for (int b = 0; b < dk; ++b)
            for (int r : rest_indices)
                out(a, b) += rho.entries(r + a * stride_keep, r + b * stride_keep);
    return DensityMatrix::create(std::move(out));
}

cxd inner_product(const StateVector& a, const StateVector& b) {
    if (a.dims != b.dims)
        raise_validation("inner product requires matching dims");
    return a.amplitudes.dot(b.amplitudes); // Eigen dot conjugates the left factor
}

} // namespace psim
