#pragma once

#include <vector>

#include "phasemeter/phase_space.hpp"

namespace phasemeter {

/// Complex wavefunction sampled on a uniform coordinate grid.
struct Wavefunction1D {
    Axis x;
    Vec values;

    double squaredNorm() const { return values.squaredNorm() * x.step; }
};

/// 1D outcome density on a readout axis.
struct OutcomeDistribution {
    Axis mu;
    Eigen::VectorXd density;

    double mass() const { return density.sum() * mu.step; }
};

enum class KernelForm { Delta, Gaussian, Sampled };

/// Single-pointer measurement kernel K(x, mu; x').  Analytic forms are kept
/// declared (delta kernels have no stable sampled representation):
///   Delta:    K = f(x, mu) delta(mu - x' - shift)
///   Gaussian: K = delta(x - x') phi_w(mu - x')
///   Sampled:  explicit complex array over (x, mu, x')
struct MeasurementKernel {
    KernelForm form = KernelForm::Delta;

    // Delta form
    Mat multiplier;  // f(x_i, mu_j); empty means f independent of x with |f|=1
    Axis fXAxis;     // x axis of the multiplier samples
    Axis fMuAxis;    // mu axis of the multiplier samples
    double shift = 0.0;

    // Gaussian form
    double width = 0.0;

    // Sampled form, row-major [x][mu][x']
    std::vector<Complex> samples;
    Axis sXAxis, sMuAxis, sXpAxis;
};

/// Delta-family kernel; validates the per-outcome normalization
/// integral |f(x,mu)|^2 dx = 1 within normTol for every mu column.
/// An empty multiplier matrix declares the plain (f = 1 effective) kernel.
MeasurementKernel delta_kernel(const Mat& f, const Axis& xAxis, const Axis& muAxis,
                               double shift = 0.0, double normTol = 1e-8);

MeasurementKernel gaussian_kernel(double width);

/// Sampled kernel; unitarity is checked against a Gaussian test-function
/// basis: <K g, K h> over (x, mu) must equal <g, h> within unitTol.
MeasurementKernel sampled_kernel(std::vector<Complex> samples, const Axis& xAxis,
                                 const Axis& muAxis, const Axis& xpAxis,
                                 double unitTol = 1e-6);

/// rho(mu) = integral dx |integral dx' K psi(x')|^2; mass within massTol of 1.
OutcomeDistribution outcome_distribution(const MeasurementKernel& K,
                                         const Wavefunction1D& psi,
                                         double massTol = 1e-4);

/// sqrt( integral dx dmu | integral dx' (mu - x') K psi(x') |^2 ).
double retro_error(const MeasurementKernel& K, const Wavefunction1D& psi);

/// Normalized Gaussian packet exp(i p0 x) * Gaussian envelope of width a.
Wavefunction1D modulated_gaussian(const Axis& xAxis, double a, double p0,
                                  double center = 0.0);

}  // namespace phasemeter
