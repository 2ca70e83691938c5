#include "oblique/kernels.hpp"

#include <cmath>
#include <numbers>

#include "oblique/errors.hpp"

namespace oblique {

namespace {

constexpr double inv_two_pi = 0.5 / std::numbers::pi;
const cdouble I(0.0, 1.0);

double radius_or_throw(const Vec2& x) {
    const double r = x.norm();
    if (!(r > 0)) throw SingularityError("kernel evaluated at x = 0");
    return r;
}

Mat2c make(cdouble a, cdouble b, cdouble c, cdouble d) {
    Mat2c m;
    m << a, b, c, d;
    return m;
}

}  // namespace

cdouble sqrt_upper(cdouble z) {
    cdouble s = std::sqrt(z);
    if (s.imag() < 0) s = -s;
    return s;
}

SpectralParameter::SpectralParameter(cdouble lambda) : lambda_(lambda) {
    if (!std::isfinite(lambda.real()) || !std::isfinite(lambda.imag()))
        throw DomainError("spectral parameter must be finite");
    if (lambda.imag() == 0.0 && lambda.real() >= 0)
        throw DomainError("spectral parameter lies on [0, inf)");
    sqrt_ = sqrt_upper(lambda);
    if (sqrt_.imag() == 0.0) sqrt_ = cdouble(0.0, std::sqrt(-lambda.real()));
}

DiracParameter::DiracParameter(cdouble offset, double c) : offset_(offset), c_(c) {
    if (!(c > 0) || !std::isfinite(c)) throw ParameterError("speed of light must be positive");
    const cdouble w = energy();
    if (w.imag() == 0.0 && offset.imag() == 0.0 && (offset.real() >= 0 || w.real() <= -c * c / 2))
        throw DomainError("Dirac energy lies in the essential spectrum");
    root_ = sqrt_upper(offset + offset * offset / (c * c));
    if (!(root_.imag() > 0)) throw DomainError("Dirac energy lies in the essential spectrum");
}

cdouble kernel_U(const SpectralParameter& sp, const Vec2& x) {
    const double r = radius_or_throw(x);
    return inv_two_pi * bessel_k01(sp.kappa() * r).first;
}

cdouble kernel_L(const SpectralParameter& sp, const Vec2& x) {
    const double r = radius_or_throw(x);
    return inv_two_pi * sp.sqrt_lambda() * bessel_k01(sp.kappa() * r).second * cdouble(x.x(), -x.y()) / r;
}

cdouble kernel_U_dz(const SpectralParameter& sp, const Vec2& x) {
    // dz K0(k r) = -k K1(k r) zbar/(2r)
    const double r = radius_or_throw(x);
    const cdouble k = sp.kappa();
    return -inv_two_pi * k * bessel_k01(k * r).second * cdouble(x.x(), -x.y()) / (2 * r);
}

cdouble kernel_U_dzbar(const SpectralParameter& sp, const Vec2& x) {
    const double r = radius_or_throw(x);
    const cdouble k = sp.kappa();
    return -inv_two_pi * k * bessel_k01(k * r).second * cdouble(x.x(), x.y()) / (2 * r);
}

cdouble kernel_L_dzbar(const SpectralParameter& sp, const Vec2& x) {
    return I * sp.lambda() / 2.0 * kernel_U(sp, x);
}

Mat2c kernel_G(const DiracParameter& dp, const Vec2& x) {
    const double r = radius_or_throw(x);
    const double c = dp.c();
    const cdouble k = dp.root();
    auto [k0, k1] = bessel_k01(-I * k * r);
    const cdouble a = inv_two_pi / c * k * k1 / r;
    const cdouble b = inv_two_pi / c * k0;
    // omega/c I + c/2 sigma3 = diag(offset/c + c, offset/c)
    const cdouble d1 = dp.offset() / c + c, d2 = dp.offset() / c;
    return make(b * d1, a * cdouble(x.x(), -x.y()), a * cdouble(x.x(), x.y()), b * d2);
}

const Mat2c& pauli1() { static const Mat2c m = make(0, 1, 1, 0); return m; }
const Mat2c& pauli2() { static const Mat2c m = make(0, -I, I, 0); return m; }
const Mat2c& pauli3() { static const Mat2c m = make(1, 0, 0, -1); return m; }
const Mat2c& mat_M1() { static const Mat2c m = make(1, 0, 0, 0); return m; }
const Mat2c& mat_M2() { static const Mat2c m = make(0, 1, 0, 0); return m; }
const Mat2c& mat_M3() { static const Mat2c m = make(0, 0, 0, 1); return m; }

}  // namespace oblique
