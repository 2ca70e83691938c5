#include "oblique/specfun.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "oblique/errors.hpp"

namespace oblique {

namespace {

constexpr double euler_gamma = 0.57721566490153286061;
constexpr double eps = 1e-17;

template <class T>
double re(const T& z) { return std::real(z); }

template <class T>
std::pair<T, T> k01_series(T z) {
    const T q = z * z / 4.0;
    const T lg = std::log(z / 2.0) + euler_gamma;
    // K0 = -(ln(z/2)+g) I0 + sum H_k q^k/(k!)^2
    // K1 = 1/z + ln(z/2) I1 - (z/4) sum (psi(k+1)+psi(k+2)) q^k/(k!(k+1)!)
    T t0 = 1.0, t1 = 1.0;  // q^k/(k!)^2 and q^k/(k!(k+1)!)
    T i0 = 1.0, s0 = 0.0, i1s = 1.0, s1 = -2.0 * euler_gamma + 1.0;
    double H = 0;
    for (int k = 1; k < 80; ++k) {
        t0 *= q / double(k * k);
        t1 *= q / double(k * (k + 1));
        H += 1.0 / k;
        const double psi_sum = 2.0 * (H - euler_gamma) + 1.0 / (k + 1);
        i0 += t0;
        s0 += H * t0;
        i1s += t1;
        s1 += psi_sum * t1;
        if (std::abs(t0) * (1.0 + H) < eps * std::abs(i0)) break;
    }
    const T k0 = -lg * i0 + s0;
    const T i1 = z / 2.0 * i1s;
    const T k1 = 1.0 / z + (lg - euler_gamma) * i1 - z / 4.0 * s1;
    return {k0, k1};
}

template <class T>
std::pair<T, T> k01_asymptotic(T z) {
    const T pre = std::sqrt(std::numbers::pi / (2.0 * z)) * std::exp(-z);
    T out[2];
    for (int nu = 0; nu < 2; ++nu) {
        const double mu = 4.0 * nu * nu;
        T term = 1.0, sum = 1.0;
        double last = INFINITY;
        for (int k = 1; k < 200; ++k) {
            T next = term * (mu - double((2 * k - 1) * (2 * k - 1))) / (8.0 * k * z);
            const double a = std::abs(next);
            if (a > last) break;  // divergent tail
            term = next;
            sum += term;
            last = a;
            if (a < eps * std::abs(sum)) break;
        }
        out[nu] = pre * sum;
    }
    return {out[0], out[1]};
}

template <class T>
std::pair<T, T> k01_integral(T z) {
    // K_nu(z) = e^{-z} int_0^inf exp(-z (cosh t - 1)) cosh(nu t) dt, trapezoid in t
    const double x = re(z), az = std::abs(z);
    const double phi = std::atan2(std::imag(cdouble(z)), x);
    const double strip = 0.9 * (std::numbers::pi / 2 - std::abs(phi));
    const double digits = 40.0 + x + 0.5 * std::log(2.0 * az / std::numbers::pi);
    const double h = 2.0 * std::numbers::pi * strip / digits;
    double T_end = 1.0;
    for (int it = 0; it < 60; ++it) {
        const double target = std::acosh(1.0 + (45.0 + T_end) / x);
        if (std::abs(target - T_end) < 1e-3) break;
        T_end = target;
    }
    T s0 = 0.5, s1 = 0.5;
    const int n = int(std::ceil(T_end / h));
    for (int j = 1; j <= n; ++j) {
        const double t = j * h;
        const double sh = std::sinh(t / 2);
        const T f = std::exp(-z * (2.0 * sh * sh));
        s0 += f;
        s1 += f * std::cosh(t);
    }
    const T ez = std::exp(-z) * h;
    return {ez * s0, ez * s1};
}

template <class T>
std::pair<T, T> k01(T z, BesselRegime regime) {
    if (!(re(z) > 0))
        throw DomainError("modified Bessel K requires Re z > 0");
    const double a = std::abs(z);
    if (regime == BesselRegime::automatic)
        regime = a <= kBesselSeriesRadius      ? BesselRegime::series
                 : a >= kBesselAsymptoticRadius ? BesselRegime::asymptotic
                                               : BesselRegime::integral;
    switch (regime) {
        case BesselRegime::series: return k01_series(z);
        case BesselRegime::asymptotic: return k01_asymptotic(z);
        default: return k01_integral(z);
    }
}

template <class T>
T i0_series(T z) {
    const T q = z * z / 4.0;
    T t = 1.0, s = 1.0;
    for (int k = 1; k < 500; ++k) {
        t *= q / double(k * k);
        s += t;
        if (std::abs(t) < eps * std::abs(s) && k > std::abs(z)) break;
    }
    return s;
}

}  // namespace

BesselEval bessel_k_eval(int order, cdouble z, BesselRegime regime) {
    if (order != 0 && order != 1) throw ParameterError("bessel_k supports orders 0 and 1");
    BesselEval e{0.0, z, order, false};
    if (!(z.real() > 0)) throw DomainError("modified Bessel K requires Re z > 0");
    if (z.real() > kBesselUnderflowRe) {
        e.underflow = true;
        return e;
    }
    auto [k0, k1] = k01(z, regime);
    e.value = order == 0 ? k0 : k1;
    return e;
}

cdouble bessel_k(int order, cdouble z) { return bessel_k_eval(order, z).value; }

double bessel_k(int order, double x) {
    if (order != 0 && order != 1) throw ParameterError("bessel_k supports orders 0 and 1");
    auto [k0, k1] = bessel_k01(x);
    return order == 0 ? k0 : k1;
}

std::pair<cdouble, cdouble> bessel_k01(cdouble z) {
    if (z.real() > kBesselUnderflowRe) return {0.0, 0.0};
    if (z.imag() == 0.0) {
        auto [a, b] = bessel_k01(z.real());
        return {a, b};
    }
    return k01(z, BesselRegime::automatic);
}

std::pair<double, double> bessel_k01(double x) {
    if (x > kBesselUnderflowRe) return {0.0, 0.0};
    return k01(x, BesselRegime::automatic);
}

cdouble bessel_i0(cdouble z) { return i0_series(z); }
double bessel_i0(double x) { return i0_series(x); }

BesselIK bessel_ik_int(int n, double x) {
    if (!(x > 0)) throw DomainError("bessel_ik_int requires x > 0");
    if (n < 0 || n > 200) throw ParameterError("bessel_ik_int order must lie in [0, 200]");

    const double q = x * x / 4;
    double t = 1, s = 1;
    for (int k = 1; k < 5000; ++k) {
        t *= q / (double(k) * double(n + k));
        s += t;
        if (t < eps * s && k > x) break;
    }
    const double I = std::exp(n * std::log(x / 2) - std::lgamma(n + 1.0)) * s;

    auto [km, k] = bessel_k01(x);
    if (n == 0) return {I, km};
    for (int m = 1; m < n; ++m) {
        const double kp = km + 2.0 * m / x * k;
        km = k;
        k = kp;
    }
    return {I, k};
}

}  // namespace oblique
