#pragma once

#include <string>
#include <utility>
#include <vector>

#include "phasemeter/fock.hpp"

namespace phasemeter {

/// Uniform grid axis: points min, min+step, ..., min+(n-1)*step.
struct Axis {
    double min = 0.0;
    double step = 1.0;
    int n = 0;

    double at(int i) const { return min + step * i; }
    double max() const { return at(n - 1); }
    static Axis centered(double halfExtent, int n);
    bool same_as(const Axis& o, double tol = 1e-12) const;
};

/// Center (x, p) and width scale of a coherent state |x,p;lambda>.
struct CoherentLabel {
    double x = 0.0;
    double p = 0.0;
    double lambda = 1.0;
};

/// Nonnegative samples of a planar distribution (rho, Q, conditioned
/// weights) on a rectangular (muX, muP) grid, interpreted at scale lambda.
struct PhaseSpaceGrid {
    Axis xAxis;
    Axis pAxis;
    double lambda = 1.0;
    Eigen::MatrixXd values;  // (xAxis.n rows) x (pAxis.n cols)

    double cellArea() const { return xAxis.step * pAxis.step; }
    double mass() const { return values.sum() * cellArea(); }
    double l1_distance(const PhaseSpaceGrid& other) const;
    void clip_negative(double tol = 1e-12);
};

struct MomentTable {
    int maxOrder = 0;
    Mat moments;  // moments(m, n) = integral z^m conj(z)^n dmu, 0 <= m,n <= maxOrder
};

struct OracleTolerances {
    double moment = 1e-4;
    double charfn = 1e-5;
    double l1 = 1e-3;
};

struct EqualityReport {
    double maxMomentDiff = 0.0;
    double maxCharDiff = 0.0;
    double l1Distance = 0.0;
    int maxOrder = 0;
    std::string verdict;  // "equal", "moments-only", "unequal"
};

Complex coherent_wavefunction(const CoherentLabel& label, double xPrime);

/// Fock coefficients of |x,p;lambda> by quadrature against oscillator
/// eigenfunctions.  Throws AccuracyError if the truncation leak exceeds tol.
StateVector coherent_fock_coefficients(const CoherentLabel& label, int dim,
                                       double leakTol = 1e-8);

/// Complex phase-space coordinate z = (muX/lambda + i lambda muP)/sqrt2.
inline Complex z_coordinate(double muX, double muP, double lambda) {
    return Complex(muX / lambda, lambda * muP) / std::sqrt(2.0);
}

/// Q(x,p) = (1/2pi) |<x,p;lambda|psi>|^2 sampled on the given axes.
/// Throws AccuracyError if the grid captures less than 1 - massTol of the
/// state (insufficient coverage).
PhaseSpaceGrid husimi_q(const StateVector& psi, const Axis& xAxis, const Axis& pAxis,
                        double lambda, double massTol = 1e-4);

/// Axes wide enough for husimi_q / moment quadrature of a state supported on
/// levels <= psi.top_level(): half extent lambda*(sqrt(2l+1) + margin) in x
/// and the conjugate extent in p.
std::pair<Axis, Axis> axes_for_state(const StateVector& psi, double margin = 7.0,
                                     int pointsPerUnit = 12);

/// <psi| a^m a+^n |psi> on the truncated space.  Throws AccuracyError when
/// the state reaches high enough that truncation contaminates the result.
Complex q_moment_operator(const StateVector& psi, int m, int n);

/// Quadrature of z^m conj(z)^n against the grid.  tailTol > 0 enables the
/// boundary-decay tail estimate; violation throws AccuracyError.
Complex grid_moment(const PhaseSpaceGrid& g, int m, int n, double tailTol = 1e-8);

MomentTable grid_moments(const PhaseSpaceGrid& g, int maxOrder, double tailTol = 0.0);

/// integral exp(i(kX muX + kP muP)) dmu by quadrature.
Complex characteristic_function(const PhaseSpaceGrid& g, double kX, double kP);

/// Certify two planar distributions equal: moments to maxOrder AND
/// characteristic samples must agree (moment agreement alone is only
/// "moments-only").
EqualityReport measure_equality_oracle(const PhaseSpaceGrid& gA, const PhaseSpaceGrid& gB,
                                       int maxOrder,
                                       const std::vector<std::pair<double, double>>& kSamples,
                                       const OracleTolerances& tol = {});

/// (n+l)!/l!, the growth bound on <a^n a+^n> for states up to level l.
double moment_growth_bound(int l, int n);
double log_moment_growth_bound(int l, int n);

/// Density matrix sum_cells w * |x,p;lambdaF><x,p;lambdaF| * cellArea on a
/// dim-level Fock basis at scale lambdaF.
Mat p_mixture_density(const PhaseSpaceGrid& weights, double lambdaF, int dim,
                      double massTol = 1e-6);

double trace_distance(const Mat& a, const Mat& b);

}  // namespace phasemeter
