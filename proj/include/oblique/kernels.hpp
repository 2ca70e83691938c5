#pragma once

#include <Eigen/Core>
#include <complex>

#include "oblique/geometry.hpp"
#include "oblique/specfun.hpp"

namespace oblique {

using Mat2c = Eigen::Matrix2cd;

class SpectralParameter {
public:
    explicit SpectralParameter(cdouble lambda);
    SpectralParameter(double lambda) : SpectralParameter(cdouble(lambda, 0.0)) {}

    cdouble lambda() const { return lambda_; }
    cdouble sqrt_lambda() const { return sqrt_; }
    // -i sqrt(lambda); Re > 0, the decay rate of the kernels.
    cdouble kappa() const { return cdouble(sqrt_.imag(), -sqrt_.real()); }
    bool is_negative_real() const { return lambda_.imag() == 0.0 && lambda_.real() < 0; }
    SpectralParameter conj() const { return SpectralParameter(std::conj(lambda_)); }

private:
    cdouble lambda_;
    cdouble sqrt_;
};

// sqrt with the branch Im > 0 (valid off [0, inf)).
cdouble sqrt_upper(cdouble z);

// Energy omega = offset + c^2/2; the offset is stored exactly so that the
// non-relativistic regime does not lose digits to cancellation.
class DiracParameter {
public:
    DiracParameter(cdouble offset, double c);

    cdouble offset() const { return offset_; }
    cdouble energy() const { return offset_ + c_ * c_ / 2; }
    double c() const { return c_; }
    // sqrt(omega^2/c^2 - c^2/4) = sqrt(offset + offset^2/c^2), Im > 0.
    cdouble root() const { return root_; }
    // Scalar parameter whose single layer is the M3 block of the compressed operator.
    SpectralParameter relativistic() const { return SpectralParameter(root_ * root_); }

private:
    cdouble offset_;
    double c_;
    cdouble root_;
};

cdouble kernel_U(const SpectralParameter& sp, const Vec2& x);
cdouble kernel_L(const SpectralParameter& sp, const Vec2& x);
// dbar of L: (i lambda / 2) U.
Mat2c kernel_G(const DiracParameter& dp, const Vec2& x);

// Wirtinger derivatives of U with respect to its argument.
cdouble kernel_U_dz(const SpectralParameter& sp, const Vec2& x);
cdouble kernel_U_dzbar(const SpectralParameter& sp, const Vec2& x);
// dbar of L with respect to its argument, equals (i lambda/2) U.
cdouble kernel_L_dzbar(const SpectralParameter& sp, const Vec2& x);

const Mat2c& pauli1();
const Mat2c& pauli2();
const Mat2c& pauli3();
const Mat2c& mat_M1();
const Mat2c& mat_M2();
const Mat2c& mat_M3();

}  // namespace oblique
