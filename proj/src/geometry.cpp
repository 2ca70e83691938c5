#include "oblique/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "oblique/errors.hpp"

namespace oblique {

namespace {
constexpr double two_pi = 2.0 * std::numbers::pi;
constexpr int kSamples = 512;
}  // namespace

double TrigPoly::value(double t) const { return derivative(t, 0); }

double TrigPoly::derivative(double t, int order) const {
    // d^m/dt^m cos(kt) = k^m cos(kt + m pi/2), likewise for sin
    const double shift = order * std::numbers::pi / 2;
    double s = 0;
    if (order == 0 && !cos.empty()) s += cos[0];
    for (std::size_t k = 1; k < cos.size(); ++k)
        s += cos[k] * std::pow(double(k), order) * std::cos(k * t + shift);
    for (std::size_t k = 1; k < sin.size(); ++k)
        s += sin[k] * std::pow(double(k), order) * std::sin(k * t + shift);
    return s;
}

int TrigPoly::degree() const {
    return int(std::max<std::size_t>(std::max(cos.size(), sin.size()), 1) - 1);
}

Curve::Curve(std::string name, TrigPoly x, TrigPoly y)
    : name_(std::move(name)), x_(std::move(x)), y_(std::move(y)) {
    for (double v : x_.cos) if (!std::isfinite(v)) throw ParameterError("non-finite curve coefficient");
    for (double v : x_.sin) if (!std::isfinite(v)) throw ParameterError("non-finite curve coefficient");
    for (double v : y_.cos) if (!std::isfinite(v)) throw ParameterError("non-finite curve coefficient");
    for (double v : y_.sin) if (!std::isfinite(v)) throw ParameterError("non-finite curve coefficient");

    const int M = std::max(4096, 16 * degree());
    double smin = INFINITY;
    for (int k = 0; k < M; ++k) {
        const double s = speed(two_pi * k / M);
        smin = std::min(smin, s);
        max_speed_ = std::max(max_speed_, s);
    }
    if (!(max_speed_ > 0) || smin <= 1e-6 * max_speed_)
        throw ParameterError("curve '" + name_ + "' is not regularly parametrized (|p'| vanishes)");
    const double area = signed_area();
    if (area < 0) throw ParameterError("curve '" + name_ + "' is clockwise (signed area < 0)");
    if (!(area > 0)) throw ParameterError("curve '" + name_ + "' encloses no area");

    const int S = std::max(kSamples, 8 * degree());
    sample_t_.resize(S);
    sample_p_.resize(S);
    for (int k = 0; k < S; ++k) {
        sample_t_[k] = two_pi * k / S;
        sample_p_[k] = point(sample_t_[k]);
    }
    for (int i = 0; i < S; ++i)
        for (int j = i + 1; j < S; ++j)
            diameter_ = std::max(diameter_, (sample_p_[i] - sample_p_[j]).norm());
}

Vec2 Curve::point(double t) const { return {x_.value(t), y_.value(t)}; }
Vec2 Curve::tangent(double t) const { return {x_.derivative(t), y_.derivative(t)}; }
Vec2 Curve::second_derivative(double t) const { return {x_.derivative(t, 2), y_.derivative(t, 2)}; }

Vec2 Curve::normal(double t) const {
    const Vec2 d = tangent(t);
    return Vec2(d.y(), -d.x()) / d.norm();
}

double Curve::speed(double t) const { return tangent(t).norm(); }

int Curve::degree() const { return std::max(x_.degree(), y_.degree()); }

double Curve::signed_area() const {
    // trapezoid is exact for trig polynomials of degree < M
    const int M = 4 * degree() + 8;
    double s = 0;
    for (int k = 0; k < M; ++k) {
        const double t = two_pi * k / M;
        const Vec2 p = point(t), d = tangent(t);
        s += p.x() * d.y() - p.y() * d.x();
    }
    return 0.5 * s * two_pi / M;
}

double Curve::length() const {
    const int M = std::max(2048, 64 * degree());
    double s = 0;
    for (int k = 0; k < M; ++k) s += speed(two_pi * k / M);
    return s * two_pi / M;
}

double Curve::diameter() const { return diameter_; }
double Curve::max_speed() const { return max_speed_; }

Curve::Projection Curve::project(const Vec2& x) const {
    std::size_t best = 0;
    double dbest = INFINITY;
    for (std::size_t k = 0; k < sample_p_.size(); ++k) {
        const double d = (sample_p_[k] - x).squaredNorm();
        if (d < dbest) dbest = d, best = k;
    }
    double t = sample_t_[best];
    const double dt = two_pi / double(sample_t_.size());
    for (int it = 0; it < 30; ++it) {
        const Vec2 r = point(t) - x, d1 = tangent(t), d2 = second_derivative(t);
        const double g = r.dot(d1), gp = d1.squaredNorm() + r.dot(d2);
        if (gp <= 0) break;
        const double step = std::clamp(-g / gp, -dt, dt);
        t += step;
        if (std::abs(step) < 1e-15) break;
    }
    return {(point(t) - x).norm(), t};
}

Curve make_circle(double R) {
    if (!(R > 0) || !std::isfinite(R)) throw ParameterError("circle radius must be positive");
    return Curve("circle", TrigPoly{{0, R}, {}}, TrigPoly{{}, {0, R}});
}

Curve make_ellipse(double a, double b) {
    if (!(a > 0) || !(b > 0) || !std::isfinite(a) || !std::isfinite(b))
        throw ParameterError("ellipse semi-axes must be positive");
    return Curve("ellipse", TrigPoly{{0, a}, {}}, TrigPoly{{}, {0, b}});
}

Curve make_kite() {
    return Curve("kite", TrigPoly{{-0.65, 1.0, 0.65}, {}}, TrigPoly{{}, {0, 1.5}});
}

Curve make_custom(const std::string& name, TrigPoly x, TrigPoly y) {
    return Curve(name.empty() ? "custom" : name, std::move(x), std::move(y));
}

QuadratureGrid::QuadratureGrid(const Curve& curve, int N)
    : curve_(curve), N_(N), weight_(two_pi / N) {
    if (N < 16 || N % 2 != 0)
        throw ParameterError("quadrature node count must be even and >= 16, got " + std::to_string(N));
    t_.resize(N);
    p_.resize(N);
    nu_.resize(N);
    jac_.resize(N);
    for (int k = 0; k < N; ++k) {
        t_[k] = two_pi * k / N;
        p_[k] = curve.point(t_[k]);
        const Vec2 d = curve.tangent(t_[k]);
        jac_[k] = d.norm();
        nu_[k] = Vec2(d.y(), -d.x()) / jac_[k];
    }
}

double QuadratureGrid::length() const {
    double s = 0;
    for (double j : jac_) s += j;
    return s * weight_;
}

}  // namespace oblique
