#include "phasemeter/phase_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace phasemeter {

Axis Axis::centered(double halfExtent, int n) {
    if (n < 2 || !(halfExtent > 0.0))
        throw ValidationError("Axis::centered: need n >= 2 and positive extent");
    double step = 2.0 * halfExtent / (n - 1);
    return {-halfExtent, step, n};
}

bool Axis::same_as(const Axis& o, double tol) const {
    return n == o.n && std::abs(min - o.min) <= tol && std::abs(step - o.step) <= tol;
}

double PhaseSpaceGrid::l1_distance(const PhaseSpaceGrid& other) const {
    if (!xAxis.same_as(other.xAxis) || !pAxis.same_as(other.pAxis))
        throw ValidationError("PhaseSpaceGrid::l1_distance: axis mismatch");
    return (values - other.values).cwiseAbs().sum() * cellArea();
}

void PhaseSpaceGrid::clip_negative(double tol) {
    double lowest = values.minCoeff();
    if (lowest < -tol)
        throw AccuracyError("PhaseSpaceGrid: negative value " + std::to_string(lowest) +
                            " below noise tolerance");
    values = values.cwiseMax(0.0);
}

static void check_label(const CoherentLabel& label) {
    if (!(label.lambda > 0.0) || !std::isfinite(label.x) || !std::isfinite(label.p))
        throw ValidationError("CoherentLabel: lambda must be positive and x, p finite");
}

Complex coherent_wavefunction(const CoherentLabel& label, double xPrime) {
    check_label(label);
    const double l2 = label.lambda * label.lambda;
    const double dx = xPrime - label.x;
    const double amp = std::pow(M_PI * l2, -0.25) * std::exp(-0.5 * dx * dx / l2);
    const double phase = label.p * xPrime - 0.5 * label.p * label.x;
    return amp * Complex(std::cos(phase), std::sin(phase));
}

StateVector coherent_fock_coefficients(const CoherentLabel& label, int dim, double leakTol) {
    check_label(label);
    if (dim < 1) throw ValidationError("coherent_fock_coefficients: dim must be >= 1");
    const double lam = label.lambda;
    // Cover both the oscillator eigenfunctions (radius ~ lambda*sqrt(2 dim))
    // and the displaced Gaussian.
    const double basisRadius = lam * (std::sqrt(2.0 * dim + 1.0) + 6.0);
    const double lo = std::min(-basisRadius, label.x - 10.0 * lam);
    const double hi = std::max(basisRadius, label.x + 10.0 * lam);
    const double kMax = std::sqrt(2.0 * dim + 1.0) / lam + std::abs(label.p);
    const double step = std::min(lam / 8.0, M_PI / (4.0 * kMax));
    const int n = static_cast<int>(std::ceil((hi - lo) / step)) + 1;
    Eigen::VectorXd x(n);
    for (int j = 0; j < n; ++j) x[j] = lo + step * j;
    Eigen::MatrixXd h = hermite_basis(x, dim, lam);
    Vec wave(n);
    for (int j = 0; j < n; ++j) wave[j] = coherent_wavefunction(label, x[j]);
    Vec coeffs = (h.transpose().cast<Complex>() * wave) * step;
    double captured = coeffs.squaredNorm();
    if (1.0 - captured > leakTol)
        throw AccuracyError("coherent_fock_coefficients: truncation leak " +
                            std::to_string(1.0 - captured) + " exceeds tolerance");
    return {coeffs, lam};
}

// <x,p;lambda|psi> from Fock amplitudes: e^{-|z|^2/2} sum c_n conj(z)^n/sqrt(n!).
static Complex coherent_overlap(const StateVector& psi, Complex z) {
    Complex zc = std::conj(z);
    Complex term(1.0, 0.0);
    Complex sum = psi.amplitudes[0];
    for (int n = 1; n < psi.dim(); ++n) {
        term *= zc / std::sqrt(double(n));
        sum += psi.amplitudes[n] * term;
    }
    return std::exp(-0.5 * std::norm(z)) * sum;
}

PhaseSpaceGrid husimi_q(const StateVector& psi, const Axis& xAxis, const Axis& pAxis,
                        double lambda, double massTol) {
    require_same_scale(psi.lengthScale, lambda, "husimi_q");
    if (std::abs(psi.norm() - 1.0) > 1e-12)
        throw ValidationError("husimi_q: state must be normalized");
    PhaseSpaceGrid g{xAxis, pAxis, lambda, Eigen::MatrixXd(xAxis.n, pAxis.n)};
    const double invH = 1.0 / (2.0 * M_PI);
    for (int i = 0; i < xAxis.n; ++i)
        for (int j = 0; j < pAxis.n; ++j) {
            Complex z = z_coordinate(xAxis.at(i), pAxis.at(j), lambda);
            g.values(i, j) = invH * std::norm(coherent_overlap(psi, z));
        }
    double m = g.mass();
    if (m < 1.0 - massTol)
        throw AccuracyError("husimi_q: grid captures mass " + std::to_string(m) +
                            ", insufficient coverage");
    return g;
}

std::pair<Axis, Axis> axes_for_state(const StateVector& psi, double margin, int pointsPerUnit) {
    const double lam = psi.lengthScale;
    int l = std::max(psi.top_level(), 0);
    double radius = std::sqrt(2.0 * l + 1.0) + margin;
    int n = 2 * static_cast<int>(std::ceil(radius * pointsPerUnit)) + 1;
    return {Axis::centered(radius * lam, n), Axis::centered(radius / lam, n)};
}

Complex q_moment_operator(const StateVector& psi, int m, int n) {
    if (m < 0 || n < 0) throw ValidationError("q_moment_operator: orders must be >= 0");
    int top = psi.top_level();
    if (top + std::max(m, n) >= psi.dim())
        throw AccuracyError("q_moment_operator: state reaches level " + std::to_string(top) +
                            ", order " + std::to_string(std::max(m, n)) +
                            " contaminated by truncation");
    auto raise = [](const Vec& v, int times) {
        Vec w = v;
        for (int t = 0; t < times; ++t) {
            Vec u = Vec::Zero(w.size());
            for (int k = 0; k + 1 < w.size(); ++k) u[k + 1] = std::sqrt(double(k + 1)) * w[k];
            w = u;
        }
        return w;
    };
    // <psi| a^m a+^n |psi> = <a+^m psi | a+^n psi>
    return raise(psi.amplitudes, m).dot(raise(psi.amplitudes, n));
}

static Complex raw_grid_moment(const PhaseSpaceGrid& g, int m, int n) {
    // Extended-precision accumulation: high-order moments sum many large
    // cancelling terms, and plain double accumulation floors the result
    // around 1e-10 absolute on fine grids.
    long double re = 0.0L, im = 0.0L;
    for (int i = 0; i < g.xAxis.n; ++i)
        for (int j = 0; j < g.pAxis.n; ++j) {
            Complex z = z_coordinate(g.xAxis.at(i), g.pAxis.at(j), g.lambda);
            Complex zm(1.0, 0.0), zn(1.0, 0.0);
            for (int k = 0; k < m; ++k) zm *= z;
            for (int k = 0; k < n; ++k) zn *= std::conj(z);
            Complex t = zm * zn * g.values(i, j);
            re += t.real();
            im += t.imag();
        }
    return Complex(double(re), double(im)) * g.cellArea();
}

// Boundary-ring tail estimate: weight of |z|^order against the outermost
// ring, extrapolated geometrically from the decay between the last two rings.
static double tail_estimate(const PhaseSpaceGrid& g, int order) {
    auto ringWeight = [&](int r) {
        double s = 0.0;
        int nx = g.xAxis.n, np = g.pAxis.n;
        for (int i = r; i < nx - r; ++i)
            for (int j = r; j < np - r; ++j) {
                if (i != r && i != nx - 1 - r && j != r && j != np - 1 - r) continue;
                double az = std::abs(z_coordinate(g.xAxis.at(i), g.pAxis.at(j), g.lambda));
                s += g.values(i, j) * std::pow(az, order);
            }
        return s * g.cellArea();
    };
    double s0 = ringWeight(0), s1 = ringWeight(1);
    if (s0 <= 0.0) return 0.0;
    if (s1 <= s0) return std::numeric_limits<double>::infinity();  // not decaying
    double q = s0 / s1;
    return s0 * q / (1.0 - q);
}

Complex grid_moment(const PhaseSpaceGrid& g, int m, int n, double tailTol) {
    if (tailTol > 0.0) {
        double mass = g.mass();
        if (mass < 1.0 - 1e-4)
            throw AccuracyError("grid_moment: grid mass " + std::to_string(mass) +
                                " below 1 - 1e-4");
        double tail = tail_estimate(g, m + n);
        if (!(tail < tailTol))
            throw AccuracyError("grid_moment: estimated tail contribution " +
                                std::to_string(tail) + " exceeds bound for order " +
                                std::to_string(m + n));
    }
    return raw_grid_moment(g, m, n);
}

MomentTable grid_moments(const PhaseSpaceGrid& g, int maxOrder, double tailTol) {
    MomentTable t{maxOrder, Mat(maxOrder + 1, maxOrder + 1)};
    for (int m = 0; m <= maxOrder; ++m)
        for (int n = m; n <= maxOrder; ++n) {
            t.moments(m, n) = grid_moment(g, m, n, tailTol);
            t.moments(n, m) = std::conj(t.moments(m, n));
        }
    return t;
}

Complex characteristic_function(const PhaseSpaceGrid& g, double kX, double kP) {
    Complex sum(0.0, 0.0);
    for (int i = 0; i < g.xAxis.n; ++i) {
        double phx = kX * g.xAxis.at(i);
        for (int j = 0; j < g.pAxis.n; ++j) {
            double ph = phx + kP * g.pAxis.at(j);
            sum += g.values(i, j) * Complex(std::cos(ph), std::sin(ph));
        }
    }
    return sum * g.cellArea();
}

EqualityReport measure_equality_oracle(const PhaseSpaceGrid& gA, const PhaseSpaceGrid& gB,
                                       int maxOrder,
                                       const std::vector<std::pair<double, double>>& kSamples,
                                       const OracleTolerances& tol) {
    if (!gA.xAxis.same_as(gB.xAxis) || !gA.pAxis.same_as(gB.pAxis))
        throw ValidationError("measure_equality_oracle: grids must share axes");
    EqualityReport r;
    r.maxOrder = maxOrder;
    for (int m = 0; m <= maxOrder; ++m)
        for (int n = 0; n + m <= maxOrder; ++n)
            r.maxMomentDiff = std::max(
                r.maxMomentDiff,
                std::abs(raw_grid_moment(gA, m, n) - raw_grid_moment(gB, m, n)));
    for (auto [kX, kP] : kSamples)
        r.maxCharDiff = std::max(r.maxCharDiff,
                                 std::abs(characteristic_function(gA, kX, kP) -
                                          characteristic_function(gB, kX, kP)));
    r.l1Distance = gA.l1_distance(gB);
    bool momentsOk = r.maxMomentDiff <= tol.moment;
    bool rest = r.maxCharDiff <= tol.charfn && r.l1Distance <= tol.l1;
    r.verdict = (momentsOk && rest) ? "equal" : momentsOk ? "moments-only" : "unequal";
    return r;
}

double log_moment_growth_bound(int l, int n) {
    if (l < 0 || n < 0) throw ValidationError("moment_growth_bound: l, n must be >= 0");
    return std::lgamma(double(n + l + 1)) - std::lgamma(double(l + 1));
}

double moment_growth_bound(int l, int n) {
    double lg = log_moment_growth_bound(l, n);
    if (lg > 0.99 * std::log(std::numeric_limits<double>::max()))
        throw ValidationError("moment_growth_bound: (n+l)!/l! exceeds double range; "
                              "use log_moment_growth_bound");
    double prod = 1.0;
    for (int k = l + 1; k <= l + n; ++k) prod *= double(k);
    return prod;
}

Mat p_mixture_density(const PhaseSpaceGrid& weights, double lambdaF, int dim, double massTol) {
    double mass = weights.mass();
    if (std::abs(mass - 1.0) > massTol)
        throw ValidationError("p_mixture_density: weight mass " + std::to_string(mass) +
                              " violates normalization");
    if (weights.values.minCoeff() < -1e-12)
        throw ValidationError("p_mixture_density: weights must be nonnegative");
    const double area = weights.cellArea();
    Mat coeffs(dim, weights.xAxis.n * weights.pAxis.n);
    int col = 0;
    for (int i = 0; i < weights.xAxis.n; ++i)
        for (int j = 0; j < weights.pAxis.n; ++j, ++col) {
            Complex z = z_coordinate(weights.xAxis.at(i), weights.pAxis.at(j), lambdaF);
            double w = std::max(weights.values(i, j), 0.0) * area;
            double scale = std::sqrt(w) * std::exp(-0.5 * std::norm(z));
            Complex term(scale, 0.0);
            for (int n = 0; n < dim; ++n) {
                coeffs(n, col) = term;
                term *= z / std::sqrt(double(n + 1));
            }
        }
    return coeffs * coeffs.adjoint();
}

double trace_distance(const Mat& a, const Mat& b) {
    Mat d = a - b;
    d = 0.5 * (d + d.adjoint().eval());
    Eigen::SelfAdjointEigenSolver<Mat> es(d);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

}  // namespace phasemeter
