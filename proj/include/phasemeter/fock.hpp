#pragma once

#include <complex>
#include <utility>

#include <Eigen/Dense>

#include "phasemeter/errors.hpp"

namespace phasemeter {

using Complex = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;

/// State on a truncated Fock basis built at oscillator length lengthScale
/// (natural units, hbar = 1).  Immutable by convention: operations return
/// new values.
struct StateVector {
    Vec amplitudes;
    double lengthScale = 1.0;

    int dim() const { return static_cast<int>(amplitudes.size()); }
    double norm() const { return amplitudes.norm(); }
    StateVector normalized() const;

    /// Highest level with non-negligible amplitude (|c_n| > tol), -1 for zero.
    int top_level(double tol = 1e-14) const;
};

/// Dense operator on the truncated system space, tagged with the scale its
/// Fock basis was built at.
struct OperatorMatrix {
    Mat entries;
    double lengthScale = 1.0;

    int dim() const { return static_cast<int>(entries.rows()); }
    bool is_hermitian(double tol = 1e-12) const;
};

void require_same_scale(double a, double b, const char* context);

StateVector make_number_state(int n, int dim, double lambda);

/// (a, a-dagger).  <m|a|n> = sqrt(n) delta_{m,n-1} on the truncated block.
std::pair<OperatorMatrix, OperatorMatrix> ladder_operators(int dim, double lambda);

/// (x, p) with x = (lambda/sqrt2)(a + a+), p = (i/(lambda sqrt2))(a+ - a).
std::pair<OperatorMatrix, OperatorMatrix> quadrature_operators(int dim, double lambda);

/// Deterministic normalized state supported on levels 0..maxLevel.
StateVector random_finite_state(unsigned seed, int maxLevel, int dim, double lambda);

/// Oscillator eigenfunctions sampled on a position grid: column n holds
/// <x_j|n> at scale lambda.  Stable three-term recurrence.
Eigen::MatrixXd hermite_basis(const Eigen::VectorXd& x, int dim, double lambda);

}  // namespace phasemeter
