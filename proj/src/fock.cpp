#include "phasemeter/fock.hpp"

#include <cmath>
#include <random>

namespace phasemeter {

StateVector StateVector::normalized() const {
    double n = norm();
    if (!(n > 0.0) || !std::isfinite(n))
        throw ValidationError("StateVector::normalized: zero or non-finite norm");
    return {amplitudes / n, lengthScale};
}

int StateVector::top_level(double tol) const {
    for (int n = dim() - 1; n >= 0; --n)
        if (std::abs(amplitudes[n]) > tol) return n;
    return -1;
}

bool OperatorMatrix::is_hermitian(double tol) const {
    return (entries - entries.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

void require_same_scale(double a, double b, const char* context) {
    if (std::abs(a - b) > 1e-12 * std::max(1.0, std::abs(a)))
        throw ValidationError(std::string(context) + ": mismatched length scales " +
                              std::to_string(a) + " vs " + std::to_string(b));
}

static void check_scale(double lambda, const char* context) {
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw ValidationError(std::string(context) + ": lengthScale must be positive");
}

StateVector make_number_state(int n, int dim, double lambda) {
    check_scale(lambda, "make_number_state");
    if (dim < 1) throw ValidationError("make_number_state: dim must be >= 1");
    if (n < 0 || n >= dim)
        throw ValidationError("make_number_state: level " + std::to_string(n) +
                              " outside truncation dim " + std::to_string(dim));
    Vec amps = Vec::Zero(dim);
    amps[n] = 1.0;
    return {amps, lambda};
}

std::pair<OperatorMatrix, OperatorMatrix> ladder_operators(int dim, double lambda) {
    check_scale(lambda, "ladder_operators");
    if (dim < 2) throw ValidationError("ladder_operators: dim must be >= 2");
    Mat a = Mat::Zero(dim, dim);
    for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(double(n));
    return {{a, lambda}, {a.adjoint(), lambda}};
}

std::pair<OperatorMatrix, OperatorMatrix> quadrature_operators(int dim, double lambda) {
    auto [a, ad] = ladder_operators(dim, lambda);
    const Complex i(0.0, 1.0);
    Mat x = (lambda / std::sqrt(2.0)) * (a.entries + ad.entries);
    Mat p = (i / (lambda * std::sqrt(2.0))) * (ad.entries - a.entries);
    return {{x, lambda}, {p, lambda}};
}

StateVector random_finite_state(unsigned seed, int maxLevel, int dim, double lambda) {
    check_scale(lambda, "random_finite_state");
    if (maxLevel < 0 || maxLevel >= dim)
        throw ValidationError("random_finite_state: maxLevel " + std::to_string(maxLevel) +
                              " outside truncation dim " + std::to_string(dim));
    std::mt19937 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vec amps = Vec::Zero(dim);
    for (int n = 0; n <= maxLevel; ++n) {
        double re = gauss(rng), im = gauss(rng);
        amps[n] = Complex(re, im);
    }
    StateVector s{amps, lambda};
    return s.normalized();
}

Eigen::MatrixXd hermite_basis(const Eigen::VectorXd& x, int dim, double lambda) {
    check_scale(lambda, "hermite_basis");
    if (dim < 1) throw ValidationError("hermite_basis: dim must be >= 1");
    const auto N = x.size();
    Eigen::MatrixXd h(N, dim);
    const double norm0 = std::pow(M_PI * lambda * lambda, -0.25);
    for (Eigen::Index j = 0; j < N; ++j) {
        double u = x[j] / lambda;
        h(j, 0) = norm0 * std::exp(-0.5 * u * u);
        if (dim > 1) h(j, 1) = std::sqrt(2.0) * u * h(j, 0);
        for (int n = 2; n < dim; ++n)
            h(j, n) = std::sqrt(2.0 / n) * u * h(j, n - 1) -
                      std::sqrt(double(n - 1) / n) * h(j, n - 2);
    }
    return h;
}

}  // namespace phasemeter
