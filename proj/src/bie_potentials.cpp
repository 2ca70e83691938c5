#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "oblique/bie.hpp"
#include "oblique/errors.hpp"
#include "oblique/parallel.hpp"

namespace oblique {

namespace {

constexpr double pi = std::numbers::pi;
// Fine spacing is at most distance / kNearRatio.
constexpr double kNearRatio = 5.0;
constexpr int kMaxRefinement = 4096;

struct FineGrid {
    int u = 1;
    int n = 0;
    double h = 0;
    std::vector<Vec2> points;
    std::vector<double> jac;
    // dirichlet[s]: periodic sinc of the coarse grid at angle 2 pi s / n
    std::vector<double> dirichlet;
};

FineGrid make_fine(const QuadratureGrid& g, int u) {
    FineGrid f;
    const int N = g.size();
    f.u = u;
    f.n = N * u;
    f.h = 2 * pi / f.n;
    f.points.resize(f.n);
    f.jac.resize(f.n);
    f.dirichlet.resize(f.n);
    for (int q = 0; q < f.n; ++q) {
        const double t = f.h * q;
        f.points[q] = g.curve().point(t);
        f.jac[q] = g.curve().speed(t);
        if (q == 0) {
            f.dirichlet[q] = 1.0;
        } else if (q % u == 0) {
            f.dirichlet[q] = 0.0;
        } else {
            f.dirichlet[q] = std::sin(N * t / 2) / std::tan(t / 2) / N;
        }
    }
    return f;
}

struct NearFieldPlan {
    std::vector<int> factor;  // 1 = plain trapezoid on the coarse grid
    std::map<int, FineGrid> fine;
};

NearFieldPlan make_plan(const QuadratureGrid& g, const std::vector<Vec2>& points) {
    NearFieldPlan plan;
    plan.factor.assign(points.size(), 1);
    const double hb = g.weight() * g.curve().max_speed();
    const double floor = 1e-12 * g.curve().diameter();
    parallel_for(int(points.size()), [&](int i) {
        const double d = g.curve().project(points[i]).distance;
        if (d <= floor)
            throw SingularityError("evaluation point lies on the curve");
        if (d >= kNearRatio * hb) return;
        int u = 2;
        while (u * d < kNearRatio * hb && u < kMaxRefinement) u *= 2;
        plan.factor[i] = u;
    });
    for (int u : plan.factor)
        if (u > 1 && !plan.fine.count(u)) plan.fine.emplace(u, make_fine(g, u));
    return plan;
}

Eigen::VectorXcd refine_density(const FineGrid& f, const DensityVector& phi) {
    const int N = int(phi.size());
    Eigen::VectorXcd out(f.n);
    for (int q = 0; q < f.n; ++q) {
        cdouble s = 0;
        for (int j = 0; j < N; ++j) {
            int idx = (q - f.u * j) % f.n;
            if (idx < 0) idx += f.n;
            const double d = f.dirichlet[idx];
            if (d != 0.0) s += d * phi[j];
        }
        out[q] = s;
    }
    return out;
}

template <class K>
Eigen::VectorXcd apply_layer(const QuadratureGrid& g, const DensityVector& phi,
                             const std::vector<Vec2>& points, const K& kernel) {
    if (phi.size() != g.size()) throw ParameterError("density length does not match the grid");
    const NearFieldPlan plan = make_plan(g, points);
    std::map<int, Eigen::VectorXcd> fine_phi;
    for (const auto& [u, f] : plan.fine) fine_phi.emplace(u, refine_density(f, phi));

    Eigen::VectorXcd out(points.size());
    parallel_for(int(points.size()), [&](int i) {
        const Vec2& x = points[i];
        cdouble s = 0;
        const int u = plan.factor[i];
        if (u == 1) {
            for (int k = 0; k < g.size(); ++k)
                s += kernel(Vec2(x - g.points()[k])) * g.jacobians()[k] * phi[k];
            s *= g.weight();
        } else {
            const FineGrid& f = plan.fine.at(u);
            const Eigen::VectorXcd& fp = fine_phi.at(u);
            for (int q = 0; q < f.n; ++q) s += kernel(Vec2(x - f.points[q])) * f.jac[q] * fp[q];
            s *= f.h;
        }
        out[i] = s;
    });
    return out;
}

}  // namespace

FieldSamples eval_SL(const QuadratureGrid& grid, const DensityVector& density,
                     const SpectralParameter& sp, const std::vector<Vec2>& points) {
    auto k = [&](const Vec2& x) { return kernel_U(sp, x); };
    return {points, apply_layer(grid, density, points, k)};
}

FieldSamples eval_Psi(const QuadratureGrid& grid, const DensityVector& density,
                      const SpectralParameter& sp, const std::vector<Vec2>& points) {
    auto k = [&](const Vec2& x) { return kernel_L(sp, x); };
    return {points, apply_layer(grid, density, points, k)};
}

std::vector<Eigen::MatrixXcd> boundary_to_points(const QuadratureGrid& g, const std::vector<Vec2>& points,
                                                 int count, const MultiKernel& kernel) {
    const NearFieldPlan plan = make_plan(g, points);
    const int N = g.size();
    std::vector<Eigen::MatrixXcd> P(count, Eigen::MatrixXcd(points.size(), N));
    parallel_for(int(points.size()), [&](int i) {
        const Vec2& x = points[i];
        const int u = plan.factor[i];
        std::vector<cdouble> buf(count);
        if (u == 1) {
            for (int k = 0; k < N; ++k) {
                kernel(Vec2(x - g.points()[k]), buf.data());
                const double w = g.jacobians()[k] * g.weight();
                for (int c = 0; c < count; ++c) P[c](i, k) = buf[c] * w;
            }
            return;
        }
        const FineGrid& f = plan.fine.at(u);
        std::vector<cdouble> kf(std::size_t(f.n) * count);
        for (int q = 0; q < f.n; ++q) {
            kernel(Vec2(x - f.points[q]), buf.data());
            for (int c = 0; c < count; ++c) kf[std::size_t(q) * count + c] = buf[c] * f.jac[q] * f.h;
        }
        for (int j = 0; j < N; ++j) {
            std::fill(buf.begin(), buf.end(), cdouble(0));
            for (int q = 0; q < f.n; ++q) {
                int idx = (q - u * j) % f.n;
                if (idx < 0) idx += f.n;
                const double d = f.dirichlet[idx];
                if (d == 0.0) continue;
                for (int c = 0; c < count; ++c) buf[c] += kf[std::size_t(q) * count + c] * d;
            }
            for (int c = 0; c < count; ++c) P[c](i, j) = buf[c];
        }
    });
    return P;
}

Eigen::MatrixXcd boundary_to_points(const QuadratureGrid& g, const std::vector<Vec2>& points,
                                    const ScalarKernel& kernel) {
    return boundary_to_points(g, points, 1, [&](const Vec2& v, cdouble* out) { out[0] = kernel(v); })[0];
}

std::vector<double> default_h_sequence(const Curve& curve) {
    const double d = curve.diameter();
    return {1e-2 * d, 5e-3 * d, 2.5e-3 * d};
}

OneSidedTraces one_sided_traces(const QuadratureGrid& g, const FieldFunction& field,
                                const std::vector<double>& hs, int order) {
    const int m = int(hs.size());
    if (m < 1) throw ParameterError("empty h sequence");
    for (int k = 0; k < m; ++k) {
        if (!(hs[k] > 0)) throw ParameterError("h sequence must be positive");
        if (k && !(hs[k] < hs[k - 1])) throw ParameterError("h sequence must be strictly decreasing");
    }
    if (order < 0 || order >= m) throw ParameterError("extrapolation order must be below the h-sequence length");

    const int N = g.size();
    std::vector<Vec2> pts;
    pts.reserve(2 * m * N);
    for (int s = 0; s < 2; ++s)
        for (int k = 0; k < m; ++k)
            for (int j = 0; j < N; ++j)
                pts.push_back(g.points()[j] + (s == 0 ? -hs[k] : hs[k]) * g.normals()[j]);
    const Eigen::VectorXcd v = field(pts);
    auto sample = [&](int side, int k) { return v.segment((side * m + k) * N, N); };

    // Lagrange extrapolation to h = 0 through the last order+1 offsets.
    const int first = m - 1 - order;
    OneSidedTraces out;
    for (int s = 0; s < 2; ++s) {
        Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(N);
        for (int a = first; a < m; ++a) {
            double w = 1;
            for (int b = first; b < m; ++b)
                if (b != a) w *= hs[b] / (hs[b] - hs[a]);
            acc += w * sample(s, a);
        }
        (s == 0 ? out.plus : out.minus) = acc;
    }

    if (m >= 3) {
        double d1 = 0, d2 = 0, scale = 0;
        for (int s = 0; s < 2; ++s) {
            d1 += (sample(s, m - 3) - sample(s, m - 2)).squaredNorm();
            d2 += (sample(s, m - 2) - sample(s, m - 1)).squaredNorm();
            scale += sample(s, m - 1).squaredNorm();
        }
        d1 = std::sqrt(d1), d2 = std::sqrt(d2), scale = std::sqrt(scale);
        out.contraction = d1 > 1e-13 * scale ? d2 / d1 : 0.0;
        if (out.contraction > 0.9)
            throw NumericalInstabilityError("trace extrapolation does not converge (contraction " +
                                            std::to_string(out.contraction) + ")");
    }
    return out;
}

JumpTraces jump_traces(const QuadratureGrid& g, const DensityVector& density, const SpectralParameter& sp,
                       const std::vector<double>& hs, int order) {
    const cdouble I(0, 1);
    auto value = [&](const std::vector<Vec2>& p) { return eval_Psi(g, density, sp, p).values; };
    auto dzbar = [&](const std::vector<Vec2>& p) -> Eigen::VectorXcd {
        return I * sp.lambda() / 2.0 * eval_SL(g, density, sp, p).values;
    };
    const OneSidedTraces f = one_sided_traces(g, value, hs, order);
    const OneSidedTraces d = one_sided_traces(g, dzbar, hs, order);
    JumpTraces out;
    const int N = g.size();
    out.jump_estimate.resize(N);
    for (int k = 0; k < N; ++k) {
        const Vec2& nu = g.normals()[k];
        out.jump_estimate[k] = I * cdouble(nu.x(), nu.y()) * (f.plus[k] - f.minus[k]);
    }
    out.dzbar_sum = -I * (d.plus + d.minus);
    out.contraction = std::max(f.contraction, d.contraction);
    return out;
}

double l2_norm(const QuadratureGrid& g, const Eigen::VectorXcd& v) {
    double s = 0;
    for (int k = 0; k < g.size(); ++k) s += std::norm(v[k]) * g.jacobians()[k];
    return std::sqrt(s * g.weight());
}

VolumeGrid make_volume_grid(const Vec2& center, double half_width, int n) {
    if (!(half_width > 0) || n < 2) throw ParameterError("volume grid needs positive width and n >= 2");
    VolumeGrid vg;
    vg.center = center;
    vg.half_width = half_width;
    vg.n = n;
    vg.h = 2 * half_width / n;
    vg.weight = vg.h * vg.h;
    vg.points.reserve(std::size_t(n) * n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            vg.points.emplace_back(center.x() - half_width + (b + 0.5) * vg.h,
                                   center.y() - half_width + (a + 0.5) * vg.h);
    return vg;
}

VolumeGrid exclude_near_curve(const VolumeGrid& vg, const Curve& curve, double min_distance) {
    std::vector<char> keep(vg.points.size());
    parallel_for(int(vg.points.size()), [&](int i) {
        keep[i] = curve.project(vg.points[i]).distance >= min_distance;
    });
    VolumeGrid out = vg;
    out.points.clear();
    for (std::size_t i = 0; i < keep.size(); ++i)
        if (keep[i]) out.points.push_back(vg.points[i]);
    return out;
}

DensityVector apply_Psi_star(const QuadratureGrid& g, const SpectralParameter& sp, const VolumeGrid& vg,
                             const Eigen::VectorXcd& f) {
    if (f.size() != Eigen::Index(vg.points.size()))
        throw ParameterError("volume samples do not match the volume grid");
    const double fmax = f.size() ? f.cwiseAbs().maxCoeff() : 0.0;
    if (fmax == 0.0) return DensityVector::Zero(g.size());
    std::vector<int> active;
    for (int i = 0; i < f.size(); ++i)
        if (std::abs(f[i]) > 1e-12 * fmax) active.push_back(i);
    parallel_for(int(active.size()), [&](int a) {
        if (g.curve().project(vg.points[active[a]]).distance < 2 * vg.h)
            throw ConfigurationError("volume source support meets the curve");
    });
    DensityVector out(g.size());
    parallel_for(g.size(), [&](int k) {
        cdouble s = 0;
        for (int i : active) s += std::conj(kernel_L(sp, Vec2(vg.points[i] - g.points()[k]))) * f[i];
        out[k] = s * vg.weight;
    });
    return out;
}

}  // namespace oblique
