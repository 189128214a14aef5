#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "phasemeter/phase_space.hpp"

using namespace phasemeter;

namespace {

PhaseSpaceGrid vacuum_q(double lambda = 1.0) {
    StateVector s = make_number_state(0, 4, lambda);
    auto [xa, pa] = axes_for_state(s);
    return husimi_q(s, xa, pa, lambda);
}

}  // namespace

TEST_CASE("coherent wavefunction is a normalized displaced Gaussian") {
    CoherentLabel label{1.0, 0.5, 1.0};
    const int N = 4001;
    const double L = 12.0;
    double dx = 2 * L / (N - 1.0);
    double mass = 0.0;
    for (int i = 0; i < N; ++i) {
        double x = -L + i * dx;
        mass += std::norm(coherent_wavefunction(label, x)) * dx;
    }
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));
    // |psi(x0)| = (pi lambda^2)^(-1/4), frozen pi^(-1/4)
    CHECK(std::abs(coherent_wavefunction(label, 1.0)) ==
          doctest::Approx(0.7511255444649425).epsilon(1e-12));
}

TEST_CASE("coherent Fock coefficients match the closed form exp(-|z|^2/2) z^n / sqrt(n!)") {
    CoherentLabel label{1.0, 0.5, 1.0};
    StateVector s = coherent_fock_coefficients(label, 24);
    Complex z = z_coordinate(label.x, label.p, label.lambda);
    CHECK(z == Complex(1.0 / std::sqrt(2.0), 0.5 / std::sqrt(2.0)));
    double fact = 1.0;
    for (int n = 0; n < 8; ++n) {
        if (n > 0) fact *= n;
        Complex expect = std::exp(-0.5 * std::norm(z)) * std::pow(z, n) / std::sqrt(fact);
        CHECK(std::abs(s.amplitudes[n] - expect) < 1e-10);
    }
    // scipy-checked sample: n = 3 coefficient
    CHECK(s.amplitudes[3].real() == doctest::Approx(0.026399905019730056).epsilon(1e-9));
    CHECK(s.amplitudes[3].imag() == doctest::Approx(0.14519947760851534).epsilon(1e-9));
    CHECK(s.norm() == doctest::Approx(1.0).epsilon(1e-9));
    // truncating far too early must be detected
    CHECK_THROWS_AS(coherent_fock_coefficients({6.0, 0.0, 1.0}, 4), AccuracyError);
}

TEST_CASE("vacuum Husimi function has the frozen peak and Gaussian profile") {
    PhaseSpaceGrid q = vacuum_q();
    CHECK(q.mass() == doctest::Approx(1.0).epsilon(1e-6));
    // locate the origin cell
    int i0 = int(std::round(-q.xAxis.min / q.xAxis.step));
    int j0 = int(std::round(-q.pAxis.min / q.pAxis.step));
    CHECK(q.xAxis.at(i0) == doctest::Approx(0.0).epsilon(1e-12));
    // frozen: Q(0,0) = 1/2pi, Q(1,0) = exp(-1/2)/2pi
    CHECK(q.values(i0, j0) == doctest::Approx(0.15915494309189535).epsilon(1e-12));
    int i1 = int(std::round((1.0 - q.xAxis.min) / q.xAxis.step));
    REQUIRE(q.xAxis.at(i1) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(q.values(i1, j0) == doctest::Approx(0.09653235263005391).epsilon(1e-9));
    // insufficient coverage must throw
    StateVector s = make_number_state(0, 4, 1.0);
    CHECK_THROWS_AS(husimi_q(s, Axis::centered(1.0, 11), Axis::centered(1.0, 11), 1.0),
                    AccuracyError);
}

TEST_CASE("operator moments: frozen values and grid agreement") {
    StateVector one = make_number_state(1, 12, 1.0);
    // <1| a a+ |1> = 2, <1| a^2 a+^2 |1> = 6
    CHECK(q_moment_operator(one, 1, 1).real() == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(q_moment_operator(one, 2, 2).real() == doctest::Approx(6.0).epsilon(1e-13));
    CHECK(q_moment_operator(one, 1, 0) == Complex(0.0, 0.0));
    // grid moments of the Husimi function agree (anti-normal ordering)
    auto [xa, pa] = axes_for_state(one);
    PhaseSpaceGrid q = husimi_q(one, xa, pa, 1.0);
    for (int m = 0; m <= 2; ++m)
        for (int n = 0; n <= 2; ++n)
            CHECK(std::abs(grid_moment(q, m, n) - q_moment_operator(one, m, n)) < 1e-6);
    // a state at the truncation edge contaminates high moments
    StateVector edge = make_number_state(11, 12, 1.0);
    CHECK_THROWS_AS(q_moment_operator(edge, 3, 3), AccuracyError);
    // a grid that clips the distribution fails the tail gate
    PhaseSpaceGrid clipped = husimi_q(one, Axis::centered(2.5, 41), Axis::centered(2.5, 41),
                                      1.0, 1.0);
    CHECK_THROWS_AS(grid_moment(clipped, 2, 2, 1e-8), AccuracyError);
}

TEST_CASE("characteristic function of the vacuum Husimi is the frozen Gaussian") {
    PhaseSpaceGrid q = vacuum_q();
    // CF(kx, kp) = exp(-kx^2 lambda^2/2 - kp^2/(2 lambda^2)); frozen exp(-1/2)
    Complex c = characteristic_function(q, 1.0, 0.0);
    CHECK(c.real() == doctest::Approx(0.6065306597126334).epsilon(1e-7));
    CHECK(std::abs(c.imag()) < 1e-9);
    CHECK(characteristic_function(q, 0.0, 0.0).real() == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("L1 distance between vacuum and one-photon Husimi is 2/e") {
    StateVector zero = make_number_state(0, 4, 1.0);
    StateVector one = make_number_state(1, 4, 1.0);
    auto [xa, pa] = axes_for_state(one);
    PhaseSpaceGrid q0 = husimi_q(zero, xa, pa, 1.0);
    PhaseSpaceGrid q1 = husimi_q(one, xa, pa, 1.0);
    // midpoint quadrature across the |Q0 - Q1| kink circle limits accuracy
    CHECK(q0.l1_distance(q1) == doctest::Approx(0.7357588823428847).epsilon(5e-4));
}

TEST_CASE("equality oracle distinguishes equal, moments-only, and unequal pairs") {
    StateVector zero = make_number_state(0, 4, 1.0);
    StateVector one = make_number_state(1, 4, 1.0);
    auto [xa, pa] = axes_for_state(one);
    PhaseSpaceGrid q0 = husimi_q(zero, xa, pa, 1.0);
    PhaseSpaceGrid q1 = husimi_q(one, xa, pa, 1.0);
    std::vector<std::pair<double, double>> ks = {{0.5, 0.0}, {0.0, 0.5}, {1.0, 1.0},
                                                 {8.0, 0.0}};
    CHECK(measure_equality_oracle(q0, q0, 6, ks).verdict == "equal");
    CHECK(measure_equality_oracle(q0, q1, 6, ks).verdict == "unequal");
    // high-frequency ripple: invisible to low moments, caught by the CF probe
    PhaseSpaceGrid ripple = q0;
    for (int i = 0; i < ripple.xAxis.n; ++i)
        for (int j = 0; j < ripple.pAxis.n; ++j)
            ripple.values(i, j) *= 1.0 + 0.02 * std::cos(8.0 * ripple.xAxis.at(i));
    EqualityReport r = measure_equality_oracle(q0, ripple, 6, ks);
    CHECK(r.verdict == "moments-only");
    CHECK(r.maxMomentDiff < 1e-4);
    CHECK(r.maxCharDiff > 1e-5);
    // mismatched axes are a contract violation
    PhaseSpaceGrid other = vacuum_q();
    other.xAxis.min += 0.1;
    CHECK_THROWS_AS(measure_equality_oracle(q0, other, 4, ks), ValidationError);
}

TEST_CASE("moment growth bound (n+l)!/l! with overflow guard") {
    CHECK(moment_growth_bound(0, 1) == 1.0);
    CHECK(moment_growth_bound(1, 3) == 24.0);
    CHECK(moment_growth_bound(2, 3) == 60.0);
    CHECK(moment_growth_bound(0, 8) == 40320.0);
    CHECK(std::exp(log_moment_growth_bound(2, 3)) == doctest::Approx(60.0).epsilon(1e-12));
    CHECK_THROWS_AS(moment_growth_bound(500, 200), ValidationError);
    CHECK(log_moment_growth_bound(500, 200) > 709.0);  // beyond double range, log still fine
}

TEST_CASE("coherent mixture with vacuum-Husimi weights is the unit-temperature thermal state") {
    PhaseSpaceGrid q = vacuum_q();
    // dim must outrun the geometric thermal ladder: truncation deficit 2^-dim
    Mat rho = p_mixture_density(q, 1.0, 16);
    CHECK(rho.trace().real() == doctest::Approx(1.0).epsilon(1e-4));
    // frozen: <0|rho|0> = 1/2; geometric ladder <n|rho|n> = 2^-(n+1)
    CHECK(rho(0, 0).real() == doctest::Approx(0.5).epsilon(1e-4));
    CHECK(rho(1, 1).real() == doctest::Approx(0.25).epsilon(1e-4));
    CHECK(rho(2, 2).real() == doctest::Approx(0.125).epsilon(1e-3));
    for (int m = 0; m < 6; ++m)
        for (int n = 0; n < 6; ++n)
            if (m != n) CHECK(std::abs(rho(m, n)) < 1e-6);
}

TEST_CASE("trace distance on frozen diagonal examples") {
    Mat a = Mat::Zero(2, 2), b = Mat::Zero(2, 2);
    a(0, 0) = 1.0;
    b(1, 1) = 1.0;
    CHECK(trace_distance(a, b) == doctest::Approx(1.0).epsilon(1e-14));
    a(0, 0) = 0.6;
    a(1, 1) = 0.4;
    b(0, 0) = 0.5;
    b(1, 1) = 0.5;
    CHECK(trace_distance(a, b) == doctest::Approx(0.1).epsilon(1e-13));
    CHECK(trace_distance(a, a) == doctest::Approx(0.0));
}

TEST_CASE("negative-value clipping tolerates rounding noise only") {
    PhaseSpaceGrid q = vacuum_q();
    q.values(0, 0) = -1e-13;
    CHECK_NOTHROW(q.clip_negative());
    CHECK(q.values(0, 0) == 0.0);
    q.values(0, 0) = -1e-3;
    CHECK_THROWS_AS(q.clip_negative(), AccuracyError);
}
