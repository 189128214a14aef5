#pragma once

#include <memory>
#include <vector>

#include "phasemeter/phase_space.hpp"

namespace phasemeter {

enum class Profile { Default, Fine };

struct GridSpec3 {
    Axis x;   // system position
    Axis y1;  // position-coupled pointer
    Axis y2;  // momentum-coupled pointer
    std::size_t size() const {
        return std::size_t(x.n) * std::size_t(y1.n) * std::size_t(y2.n);
    }
};

/// Two-pointer simultaneous measurement: pointer 1 couples to position,
/// pointer 2 to momentum, interaction strength kappa, apparatus prepared in
/// a Gaussian product state.
struct MeasurementConfig {
    double pointerWidth1 = 0.0;  // sigma1, position width of pointer 1
    double pointerWidth2 = 0.0;  // sigma2, position width of pointer 2
    double coupling = 1.0;       // kappa
    double lambdaTarget = 1.0;   // intended resolution scale
    double readoutShift1 = 0.0;  // pointer-1 preparation offset, readout units
    double readoutShift2 = 0.0;
    GridSpec3 grid;

    /// Widths saturating both error products at resolution lambda:
    /// sigma1 = kappa lambda / sqrt2, sigma2 = kappa / (sqrt2 lambda).
    static MeasurementConfig optimal(double lambda, Profile profile = Profile::Default,
                                     double kappa = 1.0);

    /// Optimal config with pointer-1 width scaled by `ratio` (detuning sweep).
    static MeasurementConfig detuned(double lambda, double ratio,
                                     Profile profile = Profile::Default,
                                     double kappa = 1.0);
    void validate() const;
};

/// Smaller grid sized for operator assembly (many fields held at once)
/// rather than single-field evolution.
GridSpec3 operator_grid(double lambda, double kappa, Profile profile);

struct JointWavefunction {
    GridSpec3 grid;
    std::vector<Complex> amp;  // row-major [ix][i1][i2]

    double cellVolume() const { return grid.x.step * grid.y1.step * grid.y2.step; }
    double squaredNorm() const;
    Complex& at(int ix, int i1, int i2) {
        return amp[(std::size_t(ix) * grid.y1.n + i1) * grid.y2.n + i2];
    }
    const Complex& at(int ix, int i1, int i2) const {
        return amp[(std::size_t(ix) * grid.y1.n + i1) * grid.y2.n + i2];
    }
};

enum class Which { Xi, Pi, Xf, Pf };
enum class Regime { Retrodictive, Predictive };

struct ErrorReport {
    double deltaX = 0.0;
    double deltaP = 0.0;
    double product = 0.0;
    double biasX = 0.0;
    double biasP = 0.0;
    double resolutionLambda = 0.0;  // sqrt2 * deltaX
    Regime regime = Regime::Retrodictive;
    bool edgeConcentrated = false;  // sup eigenvector within 2 levels of cutoff
    int supLevelX = 0;
    int supLevelP = 0;
    int truncationDim = 0;
};

struct Rect {
    double x0, x1, p0, p1;  // calibrated (muX, muP) coordinates
};

class MeasurementProcess {
public:
    explicit MeasurementProcess(MeasurementConfig cfg);
    ~MeasurementProcess();
    MeasurementProcess(const MeasurementProcess&) = delete;
    MeasurementProcess& operator=(const MeasurementProcess&) = delete;

    const MeasurementConfig& config() const { return cfg_; }

    /// Product state psi x phi_ap on the grid (pre-interaction).  Throws
    /// AccuracyError if psi leaks more than leakTol off the x grid.
    JointWavefunction prepare(const StateVector& psi, double leakTol = 1e-8) const;

    /// Exact factorized unitary, no time-stepping error.  Throws
    /// AccuracyError on norm drift beyond driftTol.
    void apply_unitary(JointWavefunction& J, double driftTol = 1e-6) const;
    void apply_unitary_dagger(JointWavefunction& J) const;

    JointWavefunction evolve(const StateVector& psi) const;

    /// Replace J (pre-interaction field) by eps_which applied to it, in
    /// calibrated readout units.
    void apply_error(JointWavefunction& J, Which which) const;

    /// Marginal over x in calibrated pointer coordinates muX = y1/kappa,
    /// muP = y2/kappa; mass within massTol of the field norm.
    PhaseSpaceGrid pointer_distribution(const JointWavefunction& J,
                                        double massTol = 1e-4) const;

    /// Reduced system density matrix on dim Fock levels after restricting
    /// the calibrated pointer outcome to `region`, plus the outcome
    /// probability p_R.  Cells participate by center inclusion; an empty
    /// selection falls back to the single cell nearest the region center.
    std::pair<Mat, double> condition_on_region(const JointWavefunction& J,
                                               const Rect& region, int dim) const;

private:
    MeasurementConfig cfg_;
    struct Fft;
    std::unique_ptr<Fft> fft_;

    void apply_momentum_x(JointWavefunction& J) const;  // J <- p_hat J
};

/// System-space operator M with <psi|M|psi> = <psi x phi| eps^power |psi x phi>,
/// assembled level-by-level on `dim` Fock levels.
OperatorMatrix error_moment_operator(const MeasurementProcess& proc, Which which,
                                     int power, int dim);

ErrorReport worst_case_errors(const MeasurementProcess& proc, Regime regime, int dim);

/// <psi x phi| [eps_X, eps_P] |psi x phi> for the regime's error pair.
Complex commutator_expectation(const MeasurementProcess& proc, const StateVector& psi,
                               Regime regime = Regime::Retrodictive);

/// || c_hat |psi x phi> || with c = (eps_Xi/lambda - i lambda eps_Pi)/sqrt2.
double c_residual(const MeasurementProcess& proc, const StateVector& psi, double lambdaI);

/// || d_hat |psi x phi> || with d = (eps_Xf/lambda + i lambda eps_Pf)/sqrt2.
double d_residual(const MeasurementProcess& proc, const StateVector& psi, double lambdaF);

/// Grid-side second moment <psi x phi| eps^2 |psi x phi> for one state.
double error_second_moment(const MeasurementProcess& proc, const StateVector& psi,
                           Which which);

}  // namespace phasemeter
