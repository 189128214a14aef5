#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "phasemeter/fock.hpp"

using namespace phasemeter;

TEST_CASE("number states are orthonormal basis vectors") {
    for (int n = 0; n < 4; ++n) {
        StateVector s = make_number_state(n, 6, 1.0);
        CHECK(s.dim() == 6);
        CHECK(s.norm() == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(s.top_level() == n);
        for (int m = 0; m < 6; ++m)
            CHECK(std::abs(s.amplitudes[m]) == (m == n ? 1.0 : 0.0));
    }
    CHECK_THROWS_AS(make_number_state(6, 6, 1.0), ValidationError);
    CHECK_THROWS_AS(make_number_state(-1, 6, 1.0), ValidationError);
    CHECK_THROWS_AS(make_number_state(0, 6, -2.0), ValidationError);
}

TEST_CASE("ladder operators have sqrt(n) matrix elements and near-canonical commutator") {
    const int dim = 8;
    auto [a, ad] = ladder_operators(dim, 1.0);
    for (int n = 1; n < dim; ++n) {
        CHECK(a.entries(n - 1, n).real() == doctest::Approx(std::sqrt(double(n))));
        CHECK(ad.entries(n, n - 1).real() == doctest::Approx(std::sqrt(double(n))));
    }
    // [a, a+] = I away from the truncation corner.
    Mat comm = a.entries * ad.entries - ad.entries * a.entries;
    for (int m = 0; m < dim - 1; ++m)
        for (int n = 0; n < dim - 1; ++n)
            CHECK(std::abs(comm(m, n) - (m == n ? 1.0 : 0.0)) < 1e-14);
    // corner element carries the truncation artifact -(dim-1)
    CHECK(comm(dim - 1, dim - 1).real() == doctest::Approx(1.0 - dim));
}

TEST_CASE("quadratures are hermitian with the oscillator variances") {
    for (double lambda : {1.0, 0.5, 2.0}) {
        auto [x, p] = quadrature_operators(10, lambda);
        CHECK(x.is_hermitian());
        CHECK(p.is_hermitian());
        // vacuum variances lambda^2/2 and 1/(2 lambda^2)
        CHECK((x.entries * x.entries)(0, 0).real() ==
              doctest::Approx(lambda * lambda / 2).epsilon(1e-12));
        CHECK((p.entries * p.entries)(0, 0).real() ==
              doctest::Approx(0.5 / (lambda * lambda)).epsilon(1e-12));
        // [x, p] = i on the interior block
        Mat comm = x.entries * p.entries - p.entries * x.entries;
        for (int m = 0; m < 8; ++m)
            for (int n = 0; n < 8; ++n)
                CHECK(std::abs(comm(m, n) - Complex(0, m == n ? 1.0 : 0.0)) < 1e-13);
    }
}

TEST_CASE("hermite basis functions are orthonormal under quadrature") {
    const int N = 2801, dim = 8;
    const double L = 14.0;
    Eigen::VectorXd xs(N);
    for (int i = 0; i < N; ++i) xs[i] = -L + 2 * L * i / (N - 1.0);
    double dx = 2 * L / (N - 1.0);
    for (double lambda : {1.0, 1.7}) {
        Eigen::MatrixXd h = hermite_basis(xs, dim, lambda);
        Eigen::MatrixXd gram = h.transpose() * h * dx;
        for (int m = 0; m < dim; ++m)
            for (int n = 0; n < dim; ++n)
                CHECK(std::abs(gram(m, n) - (m == n ? 1.0 : 0.0)) < 1e-10);
    }
    // frozen: ground state at the origin is pi^(-1/4) for lambda = 1
    Eigen::VectorXd origin(1);
    origin[0] = 0.0;
    CHECK(hermite_basis(origin, 1, 1.0)(0, 0) ==
          doctest::Approx(0.7511255444649425).epsilon(1e-14));
    // scale covariance: lambda = 2 divides the peak by sqrt(2)
    CHECK(hermite_basis(origin, 1, 2.0)(0, 0) ==
          doctest::Approx(0.7511255444649425 / std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("random finite states are deterministic, normalized, and band-limited") {
    StateVector a = random_finite_state(42, 3, 10, 1.0);
    StateVector b = random_finite_state(42, 3, 10, 1.0);
    StateVector c = random_finite_state(43, 3, 10, 1.0);
    CHECK((a.amplitudes - b.amplitudes).norm() == 0.0);
    CHECK((a.amplitudes - c.amplitudes).norm() > 1e-3);
    CHECK(a.norm() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(a.top_level() <= 3);
    for (int n = 4; n < 10; ++n) CHECK(std::abs(a.amplitudes[n]) == 0.0);
    CHECK_THROWS_AS(random_finite_state(1, 12, 10, 1.0), ValidationError);
}

TEST_CASE("normalized() rejects the zero vector and scales properly") {
    StateVector s{Vec::Zero(4), 1.0};
    CHECK_THROWS_AS(s.normalized(), ValidationError);
    s.amplitudes[0] = 3.0;
    s.amplitudes[2] = 4.0;
    StateVector u = s.normalized();
    CHECK(u.norm() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(u.amplitudes[0]) == doctest::Approx(0.6));
    CHECK(std::abs(u.amplitudes[2]) == doctest::Approx(0.8));
}

TEST_CASE("scale mismatch is rejected") {
    CHECK_THROWS_AS(require_same_scale(1.0, 1.5, "test"), ValidationError);
    CHECK_NOTHROW(require_same_scale(1.0, 1.0 + 1e-15, "test"));
}
