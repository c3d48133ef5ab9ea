#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>

#include "psim/linalg.hpp"
#include "psim/quadrature.hpp"
#include "support/oracles.hpp"
#include "support/random_gen.hpp"

using namespace psim;
using test::Rng;

namespace {

StateVector basis_state(int dim, int k) {
    Vector v = Vector::Zero(dim);
    v(k) = 1.0;
    return StateVector::create({dim}, std::move(v));
}

} // namespace

TEST_CASE("tensor product: identity case") {
    Operator i2 = Operator::identity({2});
    Operator out = tensor_product(i2, i2);
    CHECK(out.total_dim() == 4);
    CHECK(max_abs(out.entries - Matrix::Identity(4, 4)) == 0.0);
    CHECK(out.dims == std::vector<int>{2, 2});
}

TEST_CASE("tensor product: diagonal Kronecker") {
    Matrix d(2, 2);
    d << 1, 0, 0, -1;
    Operator a = Operator::create({2}, d);
    Operator out = tensor_product(a, Operator::identity({2}));
    Vector expect(4);
    expect << 1, 1, -1, -1;
    CHECK(max_abs(out.entries - Matrix(expect.asDiagonal())) == 0.0);
}

TEST_CASE("tensor product acts factor-wise on product vectors") {
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        Matrix a = rng.random_hermitian(2);
        Matrix b = rng.random_hermitian(3);
        Vector x = rng.random_state(2);
        Vector y = rng.random_state(3);
        Operator ab = tensor_product(Operator::create({2}, a), Operator::create({3}, b));
        StateVector xy = tensor_product(StateVector::create({2}, x), StateVector::create({3}, y));
        Vector got = ab.entries * xy.amplitudes;
        Vector expect = test::kron_apply(a, b, x, y);
        CHECK((got - expect).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("tensor product is associative") {
    Rng rng(12);
    for (int trial = 0; trial < 20; ++trial) {
        Operator a = Operator::create({2}, rng.random_hermitian(2));
        Operator b = Operator::create({2}, rng.random_hermitian(2));
        Operator c = Operator::create({3}, rng.random_hermitian(3));
        Matrix left = tensor_product(tensor_product(a, b), c).entries;
        Matrix right = tensor_product(a, tensor_product(b, c)).entries;
        CHECK(max_abs(left - right) < 1e-12);
    }
}

TEST_CASE("tensor product: capacity error") {
    set_max_total_dim(4096);
    Operator big = Operator::identity({64});
    CHECK_THROWS_AS(tensor_product(tensor_product(big, big), big), Error);
    try {
        tensor_product(tensor_product(big, big), big);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::capacity);
    }
}

TEST_CASE("propagator: zero Hamiltonian is the identity") {
    Operator h = Operator::create({2}, Matrix::Zero(2, 2));
    Operator u = hermitian_propagator(h, 1.7);
    CHECK(max_abs(u.entries - Matrix::Identity(2, 2)) < 1e-15);
}

TEST_CASE("propagator: diagonal phase evolution") {
    Matrix d(2, 2);
    d << 1, 0, 0, -1;
    Operator h = Operator::create({2}, d);
    Operator u = hermitian_propagator(h, std::numbers::pi);
    // exp(-i pi diag(1,-1)) = -I
    CHECK(max_abs(u.entries + Matrix::Identity(2, 2)) < 1e-14);
}

TEST_CASE("propagator: unitarity and inverse on random Hermitian input") {
    Rng rng(13);
    for (int trial = 0; trial < 20; ++trial) {
        Operator h = Operator::create({4}, rng.random_hermitian(4));
        double dt = rng.uniform(0.1, 2.0);
        Operator u = hermitian_propagator(h, dt);
        CHECK(max_abs(u.entries.adjoint() * u.entries - Matrix::Identity(4, 4)) <= 1e-10);
        Operator uinv = hermitian_propagator(h, -dt);
        CHECK(max_abs(u.entries * uinv.entries - Matrix::Identity(4, 4)) <= 1e-10);
    }
}

TEST_CASE("propagator: rejects non-Hermitian generators") {
    Matrix m(2, 2);
    m << 0, 1, 0, 0;
    Operator h{std::vector<int>{2}, m, false};
    CHECK_THROWS_AS(hermitian_propagator(h, 0.1), Error);
}

TEST_CASE("propagator preserves the norm of random states") {
    Rng rng(14);
    Operator h = Operator::create({8}, rng.random_hermitian(8));
    Operator u = hermitian_propagator(h, 0.73);
    StateVector psi = StateVector::create({8}, rng.random_state(8));
    for (int k = 0; k < 200; ++k) psi = apply(u, psi);
    CHECK(std::abs(psi.norm() - 1.0) < 1e-9);
}

TEST_CASE("partial trace: product state factorizes") {
    Rng rng(15);
    StateVector sys = StateVector::create({2}, rng.random_state(2));
    StateVector env = StateVector::create({3}, rng.random_state(3));
    DensityMatrix rho = pure_density(tensor_product(sys, env));
    DensityMatrix reduced = partial_trace(rho, {2, 3}, 0);
    Matrix expect = sys.amplitudes * sys.amplitudes.adjoint();
    CHECK(max_abs(reduced.entries - expect) < 1e-12);
}

TEST_CASE("partial trace: Bell state reduces to I/2") {
    Vector bell(4);
    bell << 1.0 / std::numbers::sqrt2, 0, 0, 1.0 / std::numbers::sqrt2;
    DensityMatrix rho = pure_density(StateVector::create({2, 2}, bell));
    DensityMatrix reduced = partial_trace(rho, {2, 2}, 0);
    CHECK(max_abs(reduced.entries - 0.5 * Matrix::Identity(2, 2)) < 1e-12);
}

TEST_CASE("partial trace matches the index-sum oracle on random pure states") {
    Rng rng(16);
    for (int trial = 0; trial < 50; ++trial) {
        Vector psi = rng.random_state(6);
        StateVector state = StateVector::create({2, 3}, psi);
        DensityMatrix rho = pure_density(state);
        Matrix sys = partial_trace(rho, {2, 3}, 0).entries;
        Matrix env = partial_trace(rho, {2, 3}, 1).entries;
        CHECK(max_abs(sys - test::index_sum_reduced_system(psi, 2, 3)) <= 1e-10);
        CHECK(max_abs(env - test::index_sum_reduced_environment(psi, 2, 3)) <= 1e-10);
        // trace-preserving and positive
        CHECK(std::abs(sys.trace().real() - 1.0) < 1e-10);
        CHECK(min_eigenvalue(sys) >= -1e-10);
        CHECK(min_eigenvalue(env) >= -1e-10);
    }
}

TEST_CASE("partial trace: inconsistent dims are rejected") {
    DensityMatrix rho = pure_density(basis_state(4, 0));
    CHECK_THROWS_AS(partial_trace(rho, {2, 3}, 0), Error);
}

TEST_CASE("inner product basics") {
    Rng rng(17);
    StateVector a = StateVector::create({4}, rng.random_state(4));
    CHECK(std::abs(inner_product(a, a) - cxd(1.0, 0.0)) < 1e-12);
    CHECK(std::abs(inner_product(basis_state(2, 0), basis_state(2, 1))) == 0.0);

    cxd phase = std::polar(1.0, 0.9);
    StateVector b{a.dims, phase * a.amplitudes};
    // conjugate-linear in the first argument: <a|e^{ig}a> = e^{ig}
    CHECK(std::abs(inner_product(a, b) - phase) < 1e-12);
    CHECK_THROWS_AS(inner_product(a, basis_state(2, 0)), Error);
}

TEST_CASE("state creation rejects non-finite amplitudes and bad lengths") {
    Vector bad(2);
    bad << cxd(std::nan(""), 0.0), cxd(0.0, 0.0);
    CHECK_THROWS_AS(StateVector::create({2}, bad), Error);
    CHECK_THROWS_AS(StateVector::create({3}, Vector::Zero(2)), Error);
}

TEST_CASE("density matrix invariants are enforced") {
    Matrix ok(2, 2);
    ok << 0.5, 0, 0, 0.5;
    CHECK_NOTHROW(DensityMatrix::create(ok));
    Matrix bad_trace(2, 2);
    bad_trace << 0.9, 0, 0, 0.5;
    CHECK_THROWS_AS(DensityMatrix::create(bad_trace), Error);
    Matrix not_herm(2, 2);
    not_herm << 0.5, 0.1, -0.1, 0.5;
    CHECK_THROWS_AS(DensityMatrix::create(not_herm), Error);
}

TEST_CASE("gauss-legendre integrates polynomials exactly") {
    QuadratureRule rule = gauss_legendre(8, 0.0, 2.0);
    double acc = 0.0;
    for (size_t k = 0; k < rule.nodes.size(); ++k) {
        double x = rule.nodes[k];
        acc += rule.weights[k] * (x * x * x * x * x - 2.0 * x * x + 0.5);
    }
    // int_0^2 x^5 - 2x^2 + 0.5 dx = 64/6 - 16/3 + 1
    double expect = 64.0 / 6.0 - 16.0 / 3.0 + 1.0;
    CHECK(std::abs(acc - expect) < 1e-12);
}

TEST_CASE("trapezoid weights cover the interval") {
    QuadratureRule rule = trapezoid_uniform(9, 0.0, 1.0);
    double total = 0.0;
    for (double w : rule.weights) total += w;
    CHECK(std::abs(total - 1.0) < 1e-14);

    QuadratureRule rule2 = trapezoid_on_nodes({0.0, 0.3, 1.0}, 0.0, 1.0);
    CHECK(rule2.weights[0] == doctest::Approx(0.15));
    CHECK(rule2.weights[1] == doctest::Approx(0.5));
    CHECK(rule2.weights[2] == doctest::Approx(0.35));
}
