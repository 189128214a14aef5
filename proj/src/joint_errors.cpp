#include "phasemeter/joint.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace phasemeter {

namespace {

Complex field_inner(const JointWavefunction& a, const JointWavefunction& b) {
    Complex s = 0.0;
    for (std::size_t k = 0; k < a.amp.size(); ++k) s += std::conj(a.amp[k]) * b.amp[k];
    return s * a.cellVolume();
}

// Error fields for each Fock level: E[n] = eps |n> x phi.
std::vector<JointWavefunction> level_error_fields(const MeasurementProcess& proc,
                                                  Which which, int dim) {
    std::vector<JointWavefunction> fields;
    fields.reserve(dim);
    for (int n = 0; n < dim; ++n) {
        JointWavefunction J =
            proc.prepare(make_number_state(n, dim, proc.config().lambdaTarget));
        proc.apply_error(J, which);
        fields.push_back(std::move(J));
    }
    return fields;
}

}  // namespace

OperatorMatrix error_moment_operator(const MeasurementProcess& proc, Which which,
                                     int power, int dim) {
    if (power != 1 && power != 2)
        throw ValidationError("error_moment_operator: power must be 1 or 2");
    if (dim < 2) throw ValidationError("error_moment_operator: dim must be >= 2");
    const MeasurementConfig& cfg = proc.config();
    std::vector<JointWavefunction> E = level_error_fields(proc, which, dim);

    Mat M(dim, dim);
    if (power == 2) {
        for (int m = 0; m < dim; ++m)
            for (int n = m; n < dim; ++n) {
                Complex v = field_inner(E[m], E[n]);
                M(m, n) = v;
                M(n, m) = std::conj(v);
            }
    } else {
        for (int m = 0; m < dim; ++m) {
            JointWavefunction Bm =
                proc.prepare(make_number_state(m, dim, cfg.lambdaTarget));
            for (int n = 0; n < dim; ++n) M(m, n) = field_inner(Bm, E[n]);
        }
    }
    OperatorMatrix op{M, cfg.lambdaTarget};
    if (!op.is_hermitian(1e-10) && power == 2)
        throw AccuracyError("error_moment_operator: second-moment matrix not hermitian");
    // Symmetrize away rounding asymmetry for downstream eigensolves.
    op.entries = 0.5 * (op.entries + op.entries.adjoint().eval());
    return op;
}

namespace {

struct SpectralTop {
    double value;     // largest eigenvalue
    int supLevel;     // Fock level carrying the largest eigenvector weight
    bool nearCutoff;  // supLevel within 2 levels of the truncation edge
};

SpectralTop top_of(const OperatorMatrix& op) {
    Eigen::SelfAdjointEigenSolver<Mat> es(op.entries);
    if (es.info() != Eigen::Success)
        throw AccuracyError("worst_case_errors: eigensolve failed");
    const int dim = int(op.entries.rows());
    int top = dim - 1;  // eigenvalues ascend
    Eigen::VectorXd w = es.eigenvectors().col(top).cwiseAbs();
    int sup = 0;
    w.maxCoeff(&sup);
    return {es.eigenvalues()[top], sup, sup >= dim - 2};
}

double max_abs_eig(const OperatorMatrix& op) {
    Eigen::SelfAdjointEigenSolver<Mat> es(op.entries);
    if (es.info() != Eigen::Success)
        throw AccuracyError("worst_case_errors: eigensolve failed");
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

ErrorReport worst_case_errors(const MeasurementProcess& proc, Regime regime, int dim) {
    const bool retro = regime == Regime::Retrodictive;
    const Which wx = retro ? Which::Xi : Which::Xf;
    const Which wp = retro ? Which::Pi : Which::Pf;

    OperatorMatrix mx2 = error_moment_operator(proc, wx, 2, dim);
    OperatorMatrix mp2 = error_moment_operator(proc, wp, 2, dim);
    OperatorMatrix mx1 = error_moment_operator(proc, wx, 1, dim);
    OperatorMatrix mp1 = error_moment_operator(proc, wp, 1, dim);

    SpectralTop tx = top_of(mx2);
    SpectralTop tp = top_of(mp2);

    ErrorReport r;
    r.regime = regime;
    r.truncationDim = dim;
    r.deltaX = std::sqrt(std::max(tx.value, 0.0));
    r.deltaP = std::sqrt(std::max(tp.value, 0.0));
    r.product = r.deltaX * r.deltaP;
    r.biasX = max_abs_eig(mx1);
    r.biasP = max_abs_eig(mp1);
    r.resolutionLambda = std::sqrt(2.0) * r.deltaX;
    r.supLevelX = tx.supLevel;
    r.supLevelP = tp.supLevel;
    r.edgeConcentrated = tx.nearCutoff || tp.nearCutoff;
    return r;
}

Complex commutator_expectation(const MeasurementProcess& proc, const StateVector& psi,
                               Regime regime) {
    const bool retro = regime == Regime::Retrodictive;
    JointWavefunction Ex = proc.prepare(psi.normalized());
    JointWavefunction Ep = Ex;
    proc.apply_error(Ex, retro ? Which::Xi : Which::Xf);
    proc.apply_error(Ep, retro ? Which::Pi : Which::Pf);
    // <[eps_X, eps_P]> = <eps_X psi, eps_P psi> - <eps_P psi, eps_X psi>
    Complex v = field_inner(Ex, Ep);
    return v - std::conj(v);
}

namespace {

double annihilator_residual(const MeasurementProcess& proc, const StateVector& psi,
                            double lambda, Which wx, Which wp, double sign) {
    if (!(lambda > 0.0)) throw ValidationError("annihilator residual: lambda must be positive");
    JointWavefunction Ex = proc.prepare(psi.normalized());
    JointWavefunction Ep = Ex;
    proc.apply_error(Ex, wx);
    proc.apply_error(Ep, wp);
    const Complex i(0.0, 1.0);
    const double inv = 1.0 / (lambda * std::sqrt(2.0));
    const Complex coef = sign * i * lambda / std::sqrt(2.0);
    double s = 0.0;
    for (std::size_t k = 0; k < Ex.amp.size(); ++k)
        s += std::norm(inv * Ex.amp[k] + coef * Ep.amp[k]);
    return std::sqrt(s * Ex.cellVolume());
}

}  // namespace

double c_residual(const MeasurementProcess& proc, const StateVector& psi, double lambdaI) {
    return annihilator_residual(proc, psi, lambdaI, Which::Xi, Which::Pi, -1.0);
}

double d_residual(const MeasurementProcess& proc, const StateVector& psi, double lambdaF) {
    return annihilator_residual(proc, psi, lambdaF, Which::Xf, Which::Pf, +1.0);
}

double error_second_moment(const MeasurementProcess& proc, const StateVector& psi,
                           Which which) {
    JointWavefunction J = proc.prepare(psi.normalized());
    proc.apply_error(J, which);
    return J.squaredNorm();
}

}  // namespace phasemeter
