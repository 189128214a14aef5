#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "phasemeter/joint.hpp"

using namespace phasemeter;

namespace {

GridSpec3 cube(double r, int n) {
    return {Axis::centered(r, n), Axis::centered(r, n), Axis::centered(r, n)};
}

MeasurementProcess quick_process(double lambda = 1.0, double kappa = 1.0) {
    MeasurementConfig cfg = MeasurementConfig::optimal(lambda, Profile::Default, kappa);
    cfg.grid = {Axis::centered(8.0 * lambda, 96), Axis::centered(8.0 * kappa * lambda, 96),
                Axis::centered(8.0 * kappa / lambda, 96)};
    return MeasurementProcess(cfg);
}

double l1_against_husimi(const PhaseSpaceGrid& rho, const StateVector& psi) {
    PhaseSpaceGrid q = husimi_q(psi, rho.xAxis, rho.pAxis, psi.lengthScale);
    return rho.l1_distance(q);
}

}  // namespace

TEST_CASE("optimal widths follow sigma1 = kappa lambda/sqrt2, sigma2 = kappa/(sqrt2 lambda)") {
    for (double lambda : {0.5, 1.0, 2.0})
        for (double kappa : {1.0, 2.0}) {
            MeasurementConfig cfg = MeasurementConfig::optimal(lambda, Profile::Default, kappa);
            CHECK(cfg.pointerWidth1 == doctest::Approx(kappa * lambda / std::sqrt(2.0)));
            CHECK(cfg.pointerWidth2 == doctest::Approx(kappa / (std::sqrt(2.0) * lambda)));
            CHECK_NOTHROW(cfg.validate());
        }
    MeasurementConfig det = MeasurementConfig::detuned(1.0, 1.5);
    CHECK(det.pointerWidth1 ==
          doctest::Approx(1.5 * MeasurementConfig::optimal(1.0).pointerWidth1));
    CHECK(det.pointerWidth2 == doctest::Approx(MeasurementConfig::optimal(1.0).pointerWidth2));
    CHECK_THROWS_AS(MeasurementConfig::optimal(-1.0), ValidationError);
    CHECK_THROWS_AS(MeasurementConfig::detuned(1.0, 0.0), ValidationError);
}

TEST_CASE("config validation rejects unresolvable or undersized grids") {
    MeasurementConfig cfg = MeasurementConfig::optimal(1.0);
    cfg.pointerWidth1 = -0.1;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg = MeasurementConfig::optimal(1.0);
    cfg.grid = cube(8.0, 32);  // 4 points per width needed
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg = MeasurementConfig::optimal(1.0);
    cfg.grid = cube(3.0, 64);  // fewer than 6 combined widths
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
}

TEST_CASE("prepared product state is normalized; leaking states are rejected") {
    MeasurementProcess proc = quick_process();
    StateVector psi = random_finite_state(7, 3, 8, 1.0);
    JointWavefunction J = proc.prepare(psi);
    CHECK(J.squaredNorm() == doctest::Approx(1.0).epsilon(1e-10));
    // a state with weight at level 40 cannot fit on an 8-lambda grid
    StateVector wide = make_number_state(40, 41, 1.0);
    CHECK_THROWS_AS(proc.prepare(wide), AccuracyError);
    StateVector wrongScale = make_number_state(0, 4, 2.0);
    CHECK_THROWS_AS(proc.prepare(wrongScale), ValidationError);
}

TEST_CASE("interaction unitary preserves norm and inverts exactly") {
    MeasurementProcess proc = quick_process();
    StateVector psi = random_finite_state(11, 4, 8, 1.0);
    JointWavefunction J = proc.prepare(psi);
    JointWavefunction orig = J;
    proc.apply_unitary(J);
    CHECK(J.squaredNorm() == doctest::Approx(1.0).epsilon(1e-10));
    proc.apply_unitary_dagger(J);
    double worst = 0.0;
    for (std::size_t k = 0; k < J.amp.size(); ++k)
        worst = std::max(worst, std::abs(J.amp[k] - orig.amp[k]));
    CHECK(worst < 1e-12);
}

TEST_CASE("universality: readout distribution equals the Husimi function") {
    MeasurementConfig cfg = MeasurementConfig::optimal(1.0);
    MeasurementProcess proc(cfg);
    Vec sup = Vec::Zero(8);
    sup[0] = 0.6;
    sup[2] = Complex(0.0, 0.8);
    std::vector<StateVector> states = {make_number_state(0, 8, 1.0),
                                       make_number_state(3, 8, 1.0),
                                       StateVector{sup, 1.0}.normalized()};
    for (const StateVector& psi : states) {
        JointWavefunction J = proc.evolve(psi);
        PhaseSpaceGrid rho = proc.pointer_distribution(J);
        CHECK(l1_against_husimi(rho, psi) < 1e-3);
    }
}

TEST_CASE("universality survives rescaled resolution and coupling (readout calibration)") {
    for (auto [lambda, kappa] : std::vector<std::pair<double, double>>{{0.5, 1.0}, {1.0, 2.0}}) {
        MeasurementProcess proc = quick_process(lambda, kappa);
        StateVector psi = random_finite_state(3, 2, 6, lambda);
        JointWavefunction J = proc.evolve(psi);
        PhaseSpaceGrid rho = proc.pointer_distribution(J);
        CHECK(rho.xAxis.max() == doctest::Approx(8.0 * lambda).epsilon(1e-6));
        CHECK(l1_against_husimi(rho, psi) < 1e-3);
    }
}

TEST_CASE("readout means track a displaced state") {
    MeasurementProcess proc = quick_process();
    StateVector psi = coherent_fock_coefficients({1.2, -0.7, 1.0}, 20);
    JointWavefunction J = proc.evolve(psi);
    PhaseSpaceGrid rho = proc.pointer_distribution(J);
    Complex zbar = grid_moment(rho, 1, 0);
    Complex zref = z_coordinate(1.2, -0.7, 1.0);
    CHECK(std::abs(zbar - zref) < 1e-6);
}

TEST_CASE("optimal error second moments saturate lambda^2/2 and 1/(2 lambda^2)") {
    const double lambda = 1.0;
    MeasurementProcess proc = quick_process(lambda);
    for (int lvl : {0, 2, 4}) {
        StateVector s = make_number_state(lvl, 8, lambda);
        CHECK(error_second_moment(proc, s, Which::Xi) ==
              doctest::Approx(lambda * lambda / 2).epsilon(1e-6));
        CHECK(error_second_moment(proc, s, Which::Pi) ==
              doctest::Approx(0.5 / (lambda * lambda)).epsilon(1e-6));
        // the evolved field spreads in x, so Xf carries the largest grid tail
        CHECK(error_second_moment(proc, s, Which::Xf) ==
              doctest::Approx(lambda * lambda / 2).epsilon(1e-3));
        CHECK(error_second_moment(proc, s, Which::Pf) ==
              doctest::Approx(0.5 / (lambda * lambda)).epsilon(1e-6));
    }
}

TEST_CASE("detuned widths inflate the error product by the closed-form factor") {
    // product^2 = (2 + r^2 + r^-2)/16 for width1 scaled by r
    for (double r : {1.5, 2.0}) {
        MeasurementConfig cfg = MeasurementConfig::detuned(1.0, r);
        cfg.grid = cube(11.0, 136);  // detuned pointer 1 doubles its width
        MeasurementProcess proc(cfg);
        ErrorReport rep = worst_case_errors(proc, Regime::Retrodictive, 6);
        double expect = std::sqrt((2.0 + r * r + 1.0 / (r * r)) / 16.0);
        CHECK(rep.product == doctest::Approx(expect).epsilon(1e-4));
        CHECK(rep.product > 0.5);
    }
}

TEST_CASE("partial-expectation operators are lambda^2/2 identity for the optimal process") {
    MeasurementProcess proc = quick_process();
    OperatorMatrix m2 = error_moment_operator(proc, Which::Xi, 2, 6);
    CHECK(m2.is_hermitian(1e-10));
    for (int m = 0; m < 6; ++m)
        for (int n = 0; n < 6; ++n)
            CHECK(std::abs(m2.entries(m, n) - (m == n ? 0.5 : 0.0)) < 1e-6);
    OperatorMatrix m1 = error_moment_operator(proc, Which::Xi, 1, 6);
    CHECK(m1.entries.cwiseAbs().maxCoeff() < 1e-6);  // unbiased
    CHECK_THROWS_AS(error_moment_operator(proc, Which::Xi, 3, 6), ValidationError);
}

TEST_CASE("worst-case report: optimal process saturates the product bound in both regimes") {
    MeasurementProcess proc = quick_process();
    for (Regime regime : {Regime::Retrodictive, Regime::Predictive}) {
        ErrorReport rep = worst_case_errors(proc, regime, 6);
        CHECK(rep.product == doctest::Approx(0.5).epsilon(2e-4));
        CHECK(rep.biasX < 1e-4);
        CHECK(rep.biasP < 1e-4);
        CHECK(rep.resolutionLambda == doctest::Approx(1.0).epsilon(1e-3));
        CHECK(rep.truncationDim == 6);
    }
}

TEST_CASE("commutator expectations are -i (retrodictive) and +i (predictive)") {
    MeasurementProcess proc = quick_process();
    for (unsigned seed : {1u, 2u}) {
        StateVector psi = random_finite_state(seed, 3, 8, 1.0);
        Complex retro = commutator_expectation(proc, psi, Regime::Retrodictive);
        CHECK(std::abs(retro - Complex(0.0, -1.0)) < 1e-5);
        Complex pred = commutator_expectation(proc, psi, Regime::Predictive);
        CHECK(std::abs(pred - Complex(0.0, 1.0)) < 1e-5);
    }
}

TEST_CASE("annihilator residuals vanish only at the optimal widths") {
    MeasurementConfig cfg = MeasurementConfig::optimal(1.0);
    cfg.grid = cube(9.0, 112);  // predictive residual needs the wider extent
    MeasurementProcess opt(cfg);
    StateVector psi = random_finite_state(5, 3, 8, 1.0);
    CHECK(c_residual(opt, psi, 1.0) < 1e-5);
    CHECK(d_residual(opt, psi, 1.0) < 1e-4);
    MeasurementConfig det = MeasurementConfig::detuned(1.0, 1.5);
    det.grid = cube(9.0, 112);
    MeasurementProcess detuned(det);
    CHECK(c_residual(detuned, psi, 1.0) > 0.05);
}

TEST_CASE("pointer bias: a shifted pointer preparation displaces readouts and M1") {
    MeasurementConfig cfg = MeasurementConfig::optimal(1.0);
    cfg.grid = cube(8.0, 96);
    cfg.readoutShift1 = 0.3;
    MeasurementProcess proc(cfg);
    OperatorMatrix m1 = error_moment_operator(proc, Which::Xi, 1, 4);
    for (int n = 0; n < 4; ++n)
        CHECK(m1.entries(n, n).real() == doctest::Approx(0.3).epsilon(1e-6));
    ErrorReport rep = worst_case_errors(proc, Regime::Retrodictive, 4);
    CHECK(rep.biasX == doctest::Approx(0.3).epsilon(1e-6));
    CHECK(rep.biasP < 1e-6);
}

TEST_CASE("conditioning on a tiny central region collapses onto the vacuum coherent state") {
    MeasurementConfig cfg = MeasurementConfig::optimal(1.0);
    MeasurementProcess proc(cfg);
    StateVector psi = make_number_state(0, 8, 1.0);
    JointWavefunction J = proc.evolve(psi);
    // target an exact readout cell center near the origin
    const double kappa = cfg.coupling;
    double cx = cfg.grid.y1.at(cfg.grid.y1.n / 2) / kappa;
    double cp = cfg.grid.y2.at(cfg.grid.y2.n / 2) / kappa;
    auto [rho, pR] = proc.condition_on_region(J, {cx - 0.02, cx + 0.02, cp - 0.02, cp + 0.02}, 8);
    CHECK(pR > 0.0);
    CHECK(rho.trace().real() == doctest::Approx(1.0).epsilon(1e-10));
    StateVector coh = coherent_fock_coefficients({cx, cp, 1.0}, 8);
    double fid = (coh.amplitudes.adjoint() * rho * coh.amplitudes)(0, 0).real();
    CHECK(fid > 1.0 - 1e-6);
    // sub-cell region falls back to the nearest single cell: same answer
    auto [rho2, pR2] = proc.condition_on_region(
        J, {cx + 0.001, cx + 0.002, cp + 0.001, cp + 0.002}, 8);
    CHECK((rho2 - rho).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(pR2 == doctest::Approx(pR).epsilon(1e-14));
}

TEST_CASE("conditioning on the full plane reproduces the thermal coherent mixture") {
    MeasurementProcess proc = quick_process();
    StateVector psi = make_number_state(0, 8, 1.0);
    JointWavefunction J = proc.evolve(psi);
    // dim must outrun the geometric thermal ladder (truncation deficit 2^-dim)
    auto [rho, pR] = proc.condition_on_region(J, {-100, 100, -100, 100}, 16);
    CHECK(pR == doctest::Approx(1.0).epsilon(1e-4));
    // frozen: <0|rho|0> = 1/2, <1|rho|1> = 1/4 (unit-temperature thermal state)
    CHECK(rho(0, 0).real() == doctest::Approx(0.5).epsilon(1e-3));
    CHECK(rho(1, 1).real() == doctest::Approx(0.25).epsilon(1e-3));
}
