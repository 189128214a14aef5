#include "phasemeter/joint.hpp"

#include <cmath>
#include <cstring>
#include <limits>

#include <fftw3.h>

namespace phasemeter {

namespace {

double fft_freq(int i, int n, double step) {
    int m = (i < (n + 1) / 2) ? i : i - n;
    return 2.0 * M_PI * m / (n * step);
}

Eigen::VectorXd gaussian_pointer(const Axis& axis, double sigma, double center) {
    Eigen::VectorXd phi(axis.n);
    const double norm = std::pow(M_PI * sigma * sigma, -0.25);
    for (int i = 0; i < axis.n; ++i) {
        double u = (axis.at(i) - center) / sigma;
        phi[i] = norm * std::exp(-0.5 * u * u);
    }
    return phi;
}

}  // namespace

MeasurementConfig MeasurementConfig::optimal(double lambda, Profile profile, double kappa) {
    if (!(lambda > 0.0) || !(kappa > 0.0))
        throw ValidationError("MeasurementConfig::optimal: lambda and kappa must be positive");
    MeasurementConfig cfg;
    cfg.lambdaTarget = lambda;
    cfg.coupling = kappa;
    cfg.pointerWidth1 = kappa * lambda / std::sqrt(2.0);
    cfg.pointerWidth2 = kappa / (std::sqrt(2.0) * lambda);
    const bool fine = profile == Profile::Fine;
    const double r = fine ? 11.0 : 8.0;
    const int n = fine ? 256 : 128;
    cfg.grid.x = Axis::centered(r * lambda, n);
    cfg.grid.y1 = Axis::centered(r * kappa * lambda, n);
    cfg.grid.y2 = Axis::centered(r * kappa / lambda, n);
    return cfg;
}

GridSpec3 operator_grid(double lambda, double kappa, Profile profile) {
    if (!(lambda > 0.0) || !(kappa > 0.0))
        throw ValidationError("operator_grid: lambda and kappa must be positive");
    const bool fine = profile == Profile::Fine;
    const double r = fine ? 12.0 : 10.0;
    const int n = fine ? 160 : 120;
    return {Axis::centered(r * lambda, n), Axis::centered(r * kappa * lambda, n),
            Axis::centered(r * kappa / lambda, n)};
}

MeasurementConfig MeasurementConfig::detuned(double lambda, double ratio, Profile profile,
                                             double kappa) {
    MeasurementConfig cfg = optimal(lambda, profile, kappa);
    if (!(ratio > 0.0)) throw ValidationError("MeasurementConfig::detuned: ratio must be positive");
    cfg.pointerWidth1 *= ratio;
    return cfg;
}

void MeasurementConfig::validate() const {
    if (!(pointerWidth1 > 0.0)) throw ValidationError("MeasurementConfig: pointerWidth1 must be positive");
    if (!(pointerWidth2 > 0.0)) throw ValidationError("MeasurementConfig: pointerWidth2 must be positive");
    if (!(coupling > 0.0)) throw ValidationError("MeasurementConfig: coupling must be positive");
    if (!(lambdaTarget > 0.0)) throw ValidationError("MeasurementConfig: lambdaTarget must be positive");
    if (grid.x.n < 8 || grid.y1.n < 8 || grid.y2.n < 8)
        throw ValidationError("MeasurementConfig: grid axes need at least 8 points");
    // Initial pointer Gaussians must be resolved.
    if (pointerWidth1 / grid.y1.step < 4.0 || pointerWidth2 / grid.y2.step < 4.0)
        throw ValidationError("MeasurementConfig: grid too coarse to represent pointer "
                              "Gaussians (need >= 4 points per width)");
    const double w1 = std::hypot(pointerWidth1, coupling * lambdaTarget);
    const double w2 = std::hypot(pointerWidth2, coupling / lambdaTarget);
    if (-grid.x.min < 6.0 * lambdaTarget || -grid.y1.min < 6.0 * w1 || -grid.y2.min < 6.0 * w2)
        throw ValidationError("MeasurementConfig: grid extents must cover >= 6 combined widths");
}

double JointWavefunction::squaredNorm() const {
    double s = 0.0;
    for (const Complex& c : amp) s += std::norm(c);
    return s * cellVolume();
}

// Cached FFTW plans for one-axis transforms of the row-major [x][y1][y2] array.
struct MeasurementProcess::Fft {
    int nx, n1, n2;
    fftw_plan fwd[3], bwd[3];

    Fft(int nx_, int n1_, int n2_, Complex* buf) : nx(nx_), n1(n1_), n2(n2_) {
        auto* p = reinterpret_cast<fftw_complex*>(buf);
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        // axis 0 (x): stride n1*n2
        fwd[0] = fftw_plan_many_dft(1, &nx, n1 * n2, p, nullptr, n1 * n2, 1, p, nullptr,
                                    n1 * n2, 1, FFTW_FORWARD, flags);
        bwd[0] = fftw_plan_many_dft(1, &nx, n1 * n2, p, nullptr, n1 * n2, 1, p, nullptr,
                                    n1 * n2, 1, FFTW_BACKWARD, flags);
        // axis 1 (y1): stride n2, executed once per x block
        fwd[1] = fftw_plan_many_dft(1, &n1, n2, p, nullptr, n2, 1, p, nullptr, n2, 1,
                                    FFTW_FORWARD, flags);
        bwd[1] = fftw_plan_many_dft(1, &n1, n2, p, nullptr, n2, 1, p, nullptr, n2, 1,
                                    FFTW_BACKWARD, flags);
        // axis 2 (y2): contiguous
        fwd[2] = fftw_plan_many_dft(1, &n2, nx * n1, p, nullptr, 1, n2, p, nullptr, 1, n2,
                                    FFTW_FORWARD, flags);
        bwd[2] = fftw_plan_many_dft(1, &n2, nx * n1, p, nullptr, 1, n2, p, nullptr, 1, n2,
                                    FFTW_BACKWARD, flags);
    }
    ~Fft() {
        for (int a = 0; a < 3; ++a) {
            fftw_destroy_plan(fwd[a]);
            fftw_destroy_plan(bwd[a]);
        }
    }

    void transform(JointWavefunction& J, int axis, bool forward) const {
        auto* p = reinterpret_cast<fftw_complex*>(J.amp.data());
        fftw_plan plan = forward ? fwd[axis] : bwd[axis];
        if (axis == 1) {
            for (int ix = 0; ix < nx; ++ix)
                fftw_execute_dft(plan, p + std::size_t(ix) * n1 * n2,
                                 p + std::size_t(ix) * n1 * n2);
        } else {
            fftw_execute_dft(plan, p, p);
        }
        if (!forward) {
            int n = axis == 0 ? nx : axis == 1 ? n1 : n2;
            double scale = 1.0 / n;
            for (Complex& c : J.amp) c *= scale;
        }
    }
};

MeasurementProcess::MeasurementProcess(MeasurementConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    // A throwaway buffer for plan creation; plans are UNALIGNED so they can
    // execute on any later array of the same shape.
    std::vector<Complex> scratch(cfg_.grid.size());
    fft_ = std::make_unique<Fft>(cfg_.grid.x.n, cfg_.grid.y1.n, cfg_.grid.y2.n,
                                 scratch.data());
}

MeasurementProcess::~MeasurementProcess() = default;

JointWavefunction MeasurementProcess::prepare(const StateVector& psi, double leakTol) const {
    require_same_scale(psi.lengthScale, cfg_.lambdaTarget, "MeasurementProcess::prepare");
    const GridSpec3& g = cfg_.grid;
    Eigen::VectorXd xs(g.x.n);
    for (int i = 0; i < g.x.n; ++i) xs[i] = g.x.at(i);
    Eigen::MatrixXd h = hermite_basis(xs, psi.dim(), cfg_.lambdaTarget);
    Vec wave = h.cast<Complex>() * psi.amplitudes;
    double captured = wave.squaredNorm() * g.x.step;
    double total = psi.amplitudes.squaredNorm();
    if (std::abs(captured - total) > leakTol * std::max(total, 1.0))
        throw AccuracyError("prepare: system state leaks " +
                            std::to_string(std::abs(captured - total)) +
                            " off the x grid");
    const double kappa = cfg_.coupling;
    Eigen::VectorXd phi1 =
        gaussian_pointer(g.y1, cfg_.pointerWidth1, kappa * cfg_.readoutShift1);
    Eigen::VectorXd phi2 =
        gaussian_pointer(g.y2, cfg_.pointerWidth2, kappa * cfg_.readoutShift2);
    JointWavefunction J{g, std::vector<Complex>(g.size())};
    for (int ix = 0; ix < g.x.n; ++ix)
        for (int i1 = 0; i1 < g.y1.n; ++i1) {
            Complex base = wave[ix] * phi1[i1];
            Complex* row = &J.at(ix, i1, 0);
            for (int i2 = 0; i2 < g.y2.n; ++i2) row[i2] = base * phi2[i2];
        }
    return J;
}

namespace {

Eigen::VectorXd axis_freqs(const Axis& a) {
    Eigen::VectorXd k(a.n);
    for (int i = 0; i < a.n; ++i) k[i] = fft_freq(i, a.n, a.step);
    return k;
}

Eigen::VectorXd axis_coords(const Axis& a) {
    Eigen::VectorXd x(a.n);
    for (int i = 0; i < a.n; ++i) x[i] = a.at(i);
    return x;
}

// T(i, j) = exp(i * coef * u[i] * v[j])
Mat outer_phase(const Eigen::VectorXd& u, const Eigen::VectorXd& v, double coef) {
    Mat T(u.size(), v.size());
    for (Eigen::Index i = 0; i < u.size(); ++i)
        for (Eigen::Index j = 0; j < v.size(); ++j) {
            double ph = coef * u[i] * v[j];
            T(i, j) = Complex(std::cos(ph), std::sin(ph));
        }
    return T;
}

// Diagonal phase factors of the interaction, each depending on two of the
// three coordinates, applied from precomputed tables.
void mult_12(JointWavefunction& J, const Mat& T) {  // T(i1, i2)
    const GridSpec3& g = J.grid;
    for (int ix = 0; ix < g.x.n; ++ix)
        for (int i1 = 0; i1 < g.y1.n; ++i1) {
            Complex* row = &J.at(ix, i1, 0);
            const Complex* t = &T(i1, 0);
            for (int i2 = 0; i2 < g.y2.n; ++i2) row[i2] *= t[i2 * T.rows()];
        }
}

void mult_x2(JointWavefunction& J, const Mat& T) {  // T(ix, i2)
    const GridSpec3& g = J.grid;
    for (int ix = 0; ix < g.x.n; ++ix)
        for (int i1 = 0; i1 < g.y1.n; ++i1) {
            Complex* row = &J.at(ix, i1, 0);
            for (int i2 = 0; i2 < g.y2.n; ++i2) row[i2] *= T(ix, i2);
        }
}

void mult_x1(JointWavefunction& J, const Mat& T) {  // T(ix, i1)
    const GridSpec3& g = J.grid;
    for (int ix = 0; ix < g.x.n; ++ix)
        for (int i1 = 0; i1 < g.y1.n; ++i1) {
            Complex f = T(ix, i1);
            Complex* row = &J.at(ix, i1, 0);
            for (int i2 = 0; i2 < g.y2.n; ++i2) row[i2] *= f;
        }
}

}  // namespace

// U = exp(-i kappa x P1) exp(-i kappa p P2) exp(+i kappa^2 P1 P2 / 2),
// rightmost factor applied first; each factor is diagonal in a mixed
// position/momentum representation.
void MeasurementProcess::apply_unitary(JointWavefunction& J, double driftTol) const {
    const GridSpec3& g = J.grid;
    const double kappa = cfg_.coupling;
    double before = J.squaredNorm();
    const Eigen::VectorXd kx = axis_freqs(g.x), k1 = axis_freqs(g.y1), k2 = axis_freqs(g.y2);
    const Eigen::VectorXd x = axis_coords(g.x);

    fft_->transform(J, 1, true);
    fft_->transform(J, 2, true);
    mult_12(J, outer_phase(k1, k2, 0.5 * kappa * kappa));
    fft_->transform(J, 0, true);
    mult_x2(J, outer_phase(kx, k2, -kappa));
    fft_->transform(J, 0, false);
    mult_x1(J, outer_phase(x, k1, -kappa));
    fft_->transform(J, 1, false);
    fft_->transform(J, 2, false);

    double after = J.squaredNorm();
    if (std::abs(after - before) > driftTol * std::max(before, 1.0))
        throw AccuracyError("apply_unitary: norm drift " + std::to_string(after - before) +
                            " (grid too small)");
}

// U+ applies the conjugated factors in reverse order: first undo the
// x-coupling (diagonal in x, k1), then the p-coupling (diagonal in kx, k2),
// then the pointer-pointer phase (diagonal in k1, k2).
void MeasurementProcess::apply_unitary_dagger(JointWavefunction& J) const {
    const GridSpec3& g = J.grid;
    const double kappa = cfg_.coupling;
    const Eigen::VectorXd kx = axis_freqs(g.x), k1 = axis_freqs(g.y1), k2 = axis_freqs(g.y2);
    const Eigen::VectorXd x = axis_coords(g.x);

    fft_->transform(J, 1, true);
    mult_x1(J, outer_phase(x, k1, kappa));
    fft_->transform(J, 0, true);
    fft_->transform(J, 2, true);
    mult_x2(J, outer_phase(kx, k2, kappa));
    fft_->transform(J, 0, false);
    mult_12(J, outer_phase(k1, k2, -0.5 * kappa * kappa));
    fft_->transform(J, 1, false);
    fft_->transform(J, 2, false);
}

void MeasurementProcess::apply_momentum_x(JointWavefunction& J) const {
    const GridSpec3& g = J.grid;
    fft_->transform(J, 0, true);
    for (int ix = 0; ix < g.x.n; ++ix) {
        double kx = fft_freq(ix, g.x.n, g.x.step);
        Complex* block = &J.at(ix, 0, 0);
        std::size_t count = std::size_t(g.y1.n) * g.y2.n;
        for (std::size_t k = 0; k < count; ++k) block[k] *= kx;
    }
    fft_->transform(J, 0, false);
}

void MeasurementProcess::apply_error(JointWavefunction& J, Which which) const {
    const GridSpec3& g = J.grid;
    const double kappa = cfg_.coupling;
    const bool predictive = which == Which::Xf || which == Which::Pf;
    const bool positionLike = which == Which::Xi || which == Which::Xf;

    JointWavefunction orig;
    if (!predictive) orig = J;  // retrodictive errors subtract the initial observable

    apply_unitary(J);
    if (positionLike) {
        for (int ix = 0; ix < g.x.n; ++ix) {
            double x = g.x.at(ix);
            for (int i1 = 0; i1 < g.y1.n; ++i1) {
                double readout = g.y1.at(i1) / kappa;
                double factor = predictive ? readout - x : readout;
                Complex* row = &J.at(ix, i1, 0);
                for (int i2 = 0; i2 < g.y2.n; ++i2) row[i2] *= factor;
            }
        }
    } else {
        JointWavefunction evolved;
        if (predictive) evolved = J;
        for (int ix = 0; ix < g.x.n; ++ix)
            for (int i1 = 0; i1 < g.y1.n; ++i1) {
                Complex* row = &J.at(ix, i1, 0);
                for (int i2 = 0; i2 < g.y2.n; ++i2)
                    row[i2] *= g.y2.at(i2) / kappa;
            }
        if (predictive) {
            apply_momentum_x(evolved);
            for (std::size_t k = 0; k < J.amp.size(); ++k) J.amp[k] -= evolved.amp[k];
        }
    }
    apply_unitary_dagger(J);

    if (!predictive) {
        if (positionLike) {
            for (int ix = 0; ix < g.x.n; ++ix) {
                double x = g.x.at(ix);
                Complex* jb = &J.at(ix, 0, 0);
                const Complex* ob = &orig.at(ix, 0, 0);
                std::size_t count = std::size_t(g.y1.n) * g.y2.n;
                for (std::size_t k = 0; k < count; ++k) jb[k] -= x * ob[k];
            }
        } else {
            apply_momentum_x(orig);
            for (std::size_t k = 0; k < J.amp.size(); ++k) J.amp[k] -= orig.amp[k];
        }
    }
}

JointWavefunction MeasurementProcess::evolve(const StateVector& psi) const {
    if (std::abs(psi.norm() - 1.0) > 1e-10)
        throw ValidationError("evolve: state must be normalized");
    JointWavefunction J = prepare(psi);
    apply_unitary(J);
    return J;
}

PhaseSpaceGrid MeasurementProcess::pointer_distribution(const JointWavefunction& J,
                                                        double massTol) const {
    const GridSpec3& g = J.grid;
    const double kappa = cfg_.coupling;
    PhaseSpaceGrid rho;
    rho.lambda = cfg_.lambdaTarget;
    rho.xAxis = {g.y1.min / kappa, g.y1.step / kappa, g.y1.n};
    rho.pAxis = {g.y2.min / kappa, g.y2.step / kappa, g.y2.n};
    rho.values = Eigen::MatrixXd::Zero(g.y1.n, g.y2.n);
    for (int ix = 0; ix < g.x.n; ++ix)
        for (int i1 = 0; i1 < g.y1.n; ++i1) {
            const Complex* row = &J.at(ix, i1, 0);
            for (int i2 = 0; i2 < g.y2.n; ++i2) rho.values(i1, i2) += std::norm(row[i2]);
        }
    rho.values *= g.x.step * kappa * kappa;
    double mass = rho.mass();
    if (std::abs(mass - 1.0) > massTol)
        throw AccuracyError("pointer_distribution: mass " + std::to_string(mass) +
                            " outside 1 +- tolerance (grid coverage)");
    return rho;
}

std::pair<Mat, double> MeasurementProcess::condition_on_region(const JointWavefunction& J,
                                                               const Rect& region,
                                                               int dim) const {
    const GridSpec3& g = J.grid;
    const double kappa = cfg_.coupling;
    Eigen::VectorXd xs(g.x.n);
    for (int i = 0; i < g.x.n; ++i) xs[i] = g.x.at(i);
    Eigen::MatrixXd h = hermite_basis(xs, dim, cfg_.lambdaTarget);

    // amp is [x][y1][y2] row-major, i.e. a (y1*y2) x nx column-major matrix
    // with x as the column index.  Project every pointer cell onto the Fock
    // basis: v(n, cell) = sum_x h_n(x) Psi(x, cell) dx.
    Eigen::Map<const Mat> psiMat(J.amp.data(), std::size_t(g.y1.n) * g.y2.n, g.x.n);
    Mat v = (psiMat * h.cast<Complex>()).transpose() * g.x.step;  // dim x cells

    std::vector<int> cells;
    for (int i1 = 0; i1 < g.y1.n; ++i1) {
        double muX = g.y1.at(i1) / kappa;
        if (muX < region.x0 || muX > region.x1) continue;
        for (int i2 = 0; i2 < g.y2.n; ++i2) {
            double muP = g.y2.at(i2) / kappa;
            if (muP < region.p0 || muP > region.p1) continue;
            cells.push_back(i1 * g.y2.n + i2);
        }
    }
    if (cells.empty()) {
        double cx = 0.5 * (region.x0 + region.x1), cp = 0.5 * (region.p0 + region.p1);
        int best1 = 0, best2 = 0;
        double bd = std::numeric_limits<double>::infinity();
        for (int i1 = 0; i1 < g.y1.n; ++i1)
            for (int i2 = 0; i2 < g.y2.n; ++i2) {
                double d = std::hypot(g.y1.at(i1) / kappa - cx, g.y2.at(i2) / kappa - cp);
                if (d < bd) { bd = d; best1 = i1; best2 = i2; }
            }
        cells.push_back(best1 * g.y2.n + best2);
    }

    Mat rho = Mat::Zero(dim, dim);
    for (int c : cells) rho += v.col(c) * v.col(c).adjoint();
    rho *= g.y1.step * g.y2.step;
    double pR = rho.real().trace();
    if (pR < 1e-10)
        throw AccuracyError("condition_on_region: region mass " + std::to_string(pR) +
                            " too small to condition on");
    rho /= pR;
    return {rho, pR};
}

}  // namespace phasemeter
