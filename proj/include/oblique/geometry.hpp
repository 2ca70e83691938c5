#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

namespace oblique {

using Vec2 = Eigen::Vector2d;

// a0 + sum_k (cos_k cos(kt) + sin_k sin(kt)); cos[0] is the constant term, sin[0] is ignored.
struct TrigPoly {
    std::vector<double> cos;
    std::vector<double> sin;

    double value(double t) const;
    double derivative(double t, int order = 1) const;
    int degree() const;
};

class Curve {
public:
    Curve(std::string name, TrigPoly x, TrigPoly y);

    const std::string& name() const { return name_; }
    const TrigPoly& x_coeffs() const { return x_; }
    const TrigPoly& y_coeffs() const { return y_; }

    Vec2 point(double t) const;
    Vec2 tangent(double t) const;  // p'(t)
    Vec2 second_derivative(double t) const;
    Vec2 normal(double t) const;   // outward unit normal
    double speed(double t) const;  // |p'(t)|

    double signed_area() const;
    double length() const;
    double diameter() const;
    double max_speed() const;
    // Highest trig degree, used to pick sample counts that make the trapezoid rule exact.
    int degree() const;

    struct Projection {
        double distance;
        double t;
    };
    // Closest point on the curve to x.
    Projection project(const Vec2& x) const;

private:
    std::string name_;
    TrigPoly x_, y_;
    double diameter_ = 0, max_speed_ = 0;
    std::vector<double> sample_t_;
    std::vector<Vec2> sample_p_;
};

Curve make_circle(double R = 1.0);
Curve make_ellipse(double a = 2.0, double b = 1.0);
Curve make_kite();
Curve make_custom(const std::string& name, TrigPoly x, TrigPoly y);

class QuadratureGrid {
public:
    QuadratureGrid(const Curve& curve, int N);

    int size() const { return N_; }
    double weight() const { return weight_; }
    const Curve& curve() const { return curve_; }
    const std::vector<double>& nodes() const { return t_; }
    const std::vector<Vec2>& points() const { return p_; }
    const std::vector<Vec2>& normals() const { return nu_; }
    const std::vector<double>& jacobians() const { return jac_; }
    // Sum of weight * jacobian.
    double length() const;

private:
    Curve curve_;
    int N_;
    double weight_;
    std::vector<double> t_;
    std::vector<Vec2> p_, nu_;
    std::vector<double> jac_;
};

inline QuadratureGrid grid(const Curve& c, int N) { return QuadratureGrid(c, N); }

}  // namespace oblique
