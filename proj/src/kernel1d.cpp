#include "phasemeter/kernel1d.hpp"

#include <cmath>

namespace phasemeter {

namespace {

void require_normalized(const Wavefunction1D& psi, const char* context) {
    if (psi.x.n < 2 || psi.values.size() != psi.x.n)
        throw ValidationError(std::string(context) + ": malformed wavefunction grid");
    double n2 = psi.squaredNorm();
    if (std::abs(n2 - 1.0) > 1e-8)
        throw ValidationError(std::string(context) + ": wavefunction not normalized (|psi|^2 = " +
                              std::to_string(n2) + ")");
}

double gaussian_density(double u, double var) {
    return std::exp(-u * u / (2.0 * var)) / std::sqrt(2.0 * M_PI * var);
}

// psi_out(x, mu) for a sampled kernel, row-major [x][mu].
Mat sampled_output(const MeasurementKernel& K, const Vec& psi) {
    const int nx = K.sXAxis.n, nm = K.sMuAxis.n, np = K.sXpAxis.n;
    Mat out(nx, nm);
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < nm; ++j) {
            Complex s = 0.0;
            const Complex* row = &K.samples[(std::size_t(i) * nm + j) * np];
            for (int k = 0; k < np; ++k) s += row[k] * psi[k];
            out(i, j) = s * K.sXpAxis.step;
        }
    return out;
}

}  // namespace

MeasurementKernel delta_kernel(const Mat& f, const Axis& xAxis, const Axis& muAxis,
                               double shift, double normTol) {
    MeasurementKernel K;
    K.form = KernelForm::Delta;
    K.shift = shift;
    if (f.size() > 0) {
        if (f.rows() != xAxis.n || f.cols() != muAxis.n)
            throw ValidationError("delta_kernel: multiplier shape does not match axes");
        for (int j = 0; j < muAxis.n; ++j) {
            double n2 = f.col(j).squaredNorm() * xAxis.step;
            if (std::abs(n2 - 1.0) > normTol)
                throw ValidationError("delta_kernel: multiplier column " + std::to_string(j) +
                                      " has integral |f|^2 dx = " + std::to_string(n2));
        }
        K.multiplier = f;
        K.fXAxis = xAxis;
        K.fMuAxis = muAxis;
    }
    return K;
}

MeasurementKernel gaussian_kernel(double width) {
    if (!(width > 0.0)) throw ValidationError("gaussian_kernel: width must be positive");
    MeasurementKernel K;
    K.form = KernelForm::Gaussian;
    K.width = width;
    return K;
}

MeasurementKernel sampled_kernel(std::vector<Complex> samples, const Axis& xAxis,
                                 const Axis& muAxis, const Axis& xpAxis,
                                 double unitTol) {
    if (samples.size() != std::size_t(xAxis.n) * muAxis.n * xpAxis.n)
        throw ValidationError("sampled_kernel: sample array shape does not match axes");
    MeasurementKernel K;
    K.form = KernelForm::Sampled;
    K.samples = std::move(samples);
    K.sXAxis = xAxis;
    K.sMuAxis = muAxis;
    K.sXpAxis = xpAxis;

    // Unitarity on a Gaussian test basis: <K g, K h> must equal <g, h>.
    const double span = xpAxis.max() - xpAxis.min;
    std::vector<Vec> basis;
    for (int t = 0; t < 4; ++t) {
        double c = xpAxis.min + span * (0.35 + 0.08 * t);
        double w = span * (0.03 + 0.01 * t);
        Vec g(xpAxis.n);
        for (int k = 0; k < xpAxis.n; ++k) {
            double u = (xpAxis.at(k) - c) / w;
            g[k] = std::pow(M_PI * w * w, -0.25) * std::exp(-0.5 * u * u) *
                   Complex(std::cos(0.7 * t * xpAxis.at(k)), std::sin(0.7 * t * xpAxis.at(k)));
        }
        basis.push_back(std::move(g));
    }
    std::vector<Mat> outs;
    for (const Vec& g : basis) outs.push_back(sampled_output(K, g));
    const double dA = xAxis.step * muAxis.step;
    for (std::size_t a = 0; a < basis.size(); ++a)
        for (std::size_t b = a; b < basis.size(); ++b) {
            Complex lhs = (outs[a].conjugate().cwiseProduct(outs[b])).sum() * dA;
            Complex rhs = basis[a].dot(basis[b]) * xpAxis.step;
            if (std::abs(lhs - rhs) > unitTol)
                throw ValidationError("sampled_kernel: unitarity violated by " +
                                      std::to_string(std::abs(lhs - rhs)));
        }
    return K;
}

OutcomeDistribution outcome_distribution(const MeasurementKernel& K,
                                         const Wavefunction1D& psi, double massTol) {
    require_normalized(psi, "outcome_distribution");
    OutcomeDistribution out;
    switch (K.form) {
        case KernelForm::Delta: {
            // rho(mu) = |psi(mu - shift)|^2 exactly; report on the shifted axis.
            out.mu = {psi.x.min + K.shift, psi.x.step, psi.x.n};
            out.density = psi.values.cwiseAbs2();
            break;
        }
        case KernelForm::Gaussian: {
            // |phi_w|^2 is a normalized Gaussian of variance w^2/2.
            const double var = 0.5 * K.width * K.width;
            const int pad = int(std::ceil(6.0 * K.width / psi.x.step)) + 1;
            out.mu = {psi.x.min - pad * psi.x.step, psi.x.step, psi.x.n + 2 * pad};
            out.density = Eigen::VectorXd::Zero(out.mu.n);
            for (int j = 0; j < out.mu.n; ++j) {
                double s = 0.0;
                for (int i = 0; i < psi.x.n; ++i)
                    s += gaussian_density(out.mu.at(j) - psi.x.at(i), var) *
                         std::norm(psi.values[i]);
                out.density[j] = s * psi.x.step;
            }
            break;
        }
        case KernelForm::Sampled: {
            if (!psi.x.same_as(K.sXpAxis))
                throw ValidationError("outcome_distribution: wavefunction grid does not "
                                      "match the kernel x' axis");
            Mat field = sampled_output(K, psi.values);
            out.mu = K.sMuAxis;
            out.density = field.cwiseAbs2().colwise().sum().transpose() * K.sXAxis.step;
            break;
        }
    }
    double mass = out.mass();
    if (std::abs(mass - 1.0) > massTol)
        throw AccuracyError("outcome_distribution: mass " + std::to_string(mass) +
                            " outside 1 +- tolerance");
    return out;
}

double retro_error(const MeasurementKernel& K, const Wavefunction1D& psi) {
    require_normalized(psi, "retro_error");
    switch (K.form) {
        case KernelForm::Delta:
            // (mu - x') K = shift * K on the delta support.
            return std::abs(K.shift);
        case KernelForm::Gaussian: {
            const double var = 0.5 * K.width * K.width;
            const int pad = int(std::ceil(6.0 * K.width / psi.x.step)) + 1;
            Axis mu{psi.x.min - pad * psi.x.step, psi.x.step, psi.x.n + 2 * pad};
            double s = 0.0;
            for (int j = 0; j < mu.n; ++j)
                for (int i = 0; i < psi.x.n; ++i) {
                    double d = mu.at(j) - psi.x.at(i);
                    s += d * d * gaussian_density(d, var) * std::norm(psi.values[i]);
                }
            return std::sqrt(s * psi.x.step * mu.step);
        }
        case KernelForm::Sampled: {
            if (!psi.x.same_as(K.sXpAxis))
                throw ValidationError("retro_error: wavefunction grid does not match the "
                                      "kernel x' axis");
            const int nx = K.sXAxis.n, nm = K.sMuAxis.n, np = K.sXpAxis.n;
            double s = 0.0;
            for (int i = 0; i < nx; ++i)
                for (int j = 0; j < nm; ++j) {
                    Complex acc = 0.0;
                    const Complex* row = &K.samples[(std::size_t(i) * nm + j) * np];
                    for (int k = 0; k < np; ++k)
                        acc += (K.sMuAxis.at(j) - K.sXpAxis.at(k)) * row[k] * psi.values[k];
                    s += std::norm(acc * K.sXpAxis.step);
                }
            return std::sqrt(s * K.sXAxis.step * K.sMuAxis.step);
        }
    }
    throw ValidationError("retro_error: unknown kernel form");
}

Wavefunction1D modulated_gaussian(const Axis& xAxis, double a, double p0, double center) {
    if (!(a > 0.0)) throw ValidationError("modulated_gaussian: width must be positive");
    Wavefunction1D psi{xAxis, Vec(xAxis.n)};
    const double norm = std::pow(M_PI * a * a, -0.25);
    for (int i = 0; i < xAxis.n; ++i) {
        double x = xAxis.at(i);
        double u = (x - center) / a;
        psi.values[i] = norm * std::exp(-0.5 * u * u) *
                        Complex(std::cos(p0 * x), std::sin(p0 * x));
    }
    double n = std::sqrt(psi.squaredNorm());
    psi.values /= n;
    return psi;
}

}  // namespace phasemeter
