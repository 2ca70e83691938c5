#pragma once

#include <complex>
#include <utility>

namespace oblique {

using cdouble = std::complex<double>;

struct BesselEval {
    cdouble value;
    cdouble argument;
    int order = 0;
    // Set when Re z is so large that the value was flushed to zero.
    bool underflow = false;
};

// Evaluation regimes of K0/K1. `automatic` picks by |z|.
enum class BesselRegime { automatic, series, integral, asymptotic };

inline constexpr double kBesselSeriesRadius = 2.0;
inline constexpr double kBesselAsymptoticRadius = 17.0;
inline constexpr double kBesselUnderflowRe = 700.0;

// K_order(z) for order 0 or 1 and Re z > 0.
BesselEval bessel_k_eval(int order, cdouble z, BesselRegime regime = BesselRegime::automatic);
cdouble bessel_k(int order, cdouble z);
double bessel_k(int order, double x);

// (K0(z), K1(z)) in one pass.
std::pair<cdouble, cdouble> bessel_k01(cdouble z);
std::pair<double, double> bessel_k01(double x);

// I0 by its power series; intended for moderate |z| (log splitting of K0).
cdouble bessel_i0(cdouble z);
double bessel_i0(double x);

struct BesselIK {
    double i;
    double k;
};
// I_n(x), K_n(x) for integer n in [0, 200] and x > 0.
BesselIK bessel_ik_int(int n, double x);

}  // namespace oblique
