#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <array>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <numbers>

#include "oblique/errors.hpp"
#include "oblique/parallel.hpp"
#include "oblique/spectral.hpp"

namespace oblique {

namespace {

constexpr double pi = std::numbers::pi;
constexpr int kGaussPoints = 16;
constexpr int kGradedPanels = 20;

struct Rule {
    std::vector<double> x, w;  // on [0, 1]
};

const Rule& gauss_unit() {
    static const Rule r = [] {
        using G = boost::math::quadrature::gauss<double, kGaussPoints>;
        Rule out;
        const auto& a = G::abscissa();
        const auto& w = G::weights();
        for (std::size_t k = 0; k < a.size(); ++k) {
            out.x.push_back(0.5 * (1 - a[k]));
            out.w.push_back(0.5 * w[k]);
            if (a[k] != 0) {
                out.x.push_back(0.5 * (1 + a[k]));
                out.w.push_back(0.5 * w[k]);
            }
        }
        return out;
    }();
    return r;
}

// Radial nodes and weights on [0, rmax]; graded toward 0 when `graded`.
void radial_rule(double rmax, bool graded, std::vector<double>& r, std::vector<double>& w) {
    const Rule& g = gauss_unit();
    std::vector<double> edges{0.0};
    if (graded) {
        for (int k = kGradedPanels; k >= 0; --k) edges.push_back(rmax * std::ldexp(1.0, -k));
    } else {
        for (int k = 1; k <= 4; ++k) edges.push_back(rmax * k / 4);
    }
    r.clear();
    w.clear();
    for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
        const double a = edges[p], L = edges[p + 1] - a;
        for (std::size_t k = 0; k < g.x.size(); ++k) {
            r.push_back(a + L * g.x[k]);
            w.push_back(L * g.w[k]);
        }
    }
}

int angular_count(double rho, double scale) {
    const int n = int(std::ceil(8 * pi * rho / scale / 8.0)) * 8;
    return std::clamp(n, 32, 2048);
}

// Convolution of `src` with kernel k(x - y) (derivative = true uses the dbar kernel).
cdouble convolve(const SpectralParameter& sp, const VolumeSource& src, const Vec2& x, bool derivative) {
    const double d0 = (x - src.center).norm();
    const double inv2pi = 0.5 / pi;
    const cdouble kap = sp.kappa();
    std::vector<double> r, w;
    cdouble total = 0;
    if (d0 > src.radius) {
        radial_rule(src.radius, false, r, w);
        for (std::size_t a = 0; a < r.size(); ++a) {
            const int nt = angular_count(r[a], src.scale) * 2;
            cdouble s = 0;
            for (int j = 0; j < nt; ++j) {
                const double th = 2 * pi * j / nt;
                const Vec2 y = src.center + r[a] * Vec2(std::cos(th), std::sin(th));
                const Vec2 v = x - y;
                s += (derivative ? kernel_U_dzbar(sp, v) : kernel_U(sp, v)) * src.f(y);
            }
            total += s * (2 * pi / nt) * r[a] * w[a];
        }
        return total;
    }
    radial_rule(d0 + src.radius, true, r, w);
    for (std::size_t a = 0; a < r.size(); ++a) {
        const int nt = angular_count(r[a], src.scale);
        const auto [k0, k1] = bessel_k01(kap * r[a]);
        cdouble s = 0;
        for (int j = 0; j < nt; ++j) {
            const double th = 2 * pi * j / nt;
            const Vec2 y = x + r[a] * Vec2(std::cos(th), std::sin(th));
            // x - y = -rho e^{i th}; dbar U(v) = -kappa K1 (v1 + i v2) / (4 pi rho)
            s += (derivative ? std::polar(1.0, th) : cdouble(1.0)) * src.f(y);
        }
        s *= 2 * pi / nt;
        const cdouble radial = derivative ? inv2pi * kap * k1 / 2.0 : inv2pi * k0;
        total += radial * s * r[a] * w[a];
    }
    return total;
}

}  // namespace

VolumeSource gaussian_bump(const Vec2& center, double sigma) {
    if (!(sigma > 0)) throw ParameterError("bump width must be positive");
    VolumeSource s;
    s.center = center;
    s.scale = sigma;
    s.radius = sigma * std::sqrt(2 * 39.0);  // f < 1e-17 outside
    s.f = [center, sigma](const Vec2& x) {
        return cdouble(std::exp(-(x - center).squaredNorm() / (2 * sigma * sigma)), 0.0);
    };
    return s;
}

Eigen::VectorXcd free_resolvent(const SpectralParameter& sp, const VolumeSource& src, const std::vector<Vec2>& pts) {
    Eigen::VectorXcd out(pts.size());
    parallel_for(int(pts.size()), [&](int i) { out[i] = convolve(sp, src, pts[i], false); });
    return out;
}

Eigen::VectorXcd free_resolvent_dzbar(const SpectralParameter& sp, const VolumeSource& src,
                                      const std::vector<Vec2>& pts) {
    Eigen::VectorXcd out(pts.size());
    parallel_for(int(pts.size()), [&](int i) { out[i] = convolve(sp, src, pts[i], true); });
    return out;
}

KreinSolution::KreinSolution(const Curve& curve, double alpha, const SpectralParameter& sp, VolumeSource src,
                             const SpectralOptions& opt)
    : grid_(curve, opt.auto_resolve ? resolved_node_count(curve, sp.kappa(), opt.N) : opt.N),
      alpha_(alpha),
      sp_(sp),
      src_(std::move(src)) {
    if (!std::isfinite(alpha)) throw ParameterError("alpha must be finite");
    if (!(src_.radius > 0) || !(src_.scale > 0) || !src_.f) throw ParameterError("invalid volume source");
    const int N = grid_.size();
    if (alpha == 0) {
        phi_ = DensityVector::Zero(N);
        smin_ = 1;
        return;
    }
    const Eigen::MatrixXcd S = assemble_S(grid_, sp).entries;
    const Eigen::MatrixXcd A = Eigen::MatrixXcd::Identity(N, N) - alpha * sp.lambda() * S;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(symmetrized(grid_, A));
    smin_ = svd.singularValues()(N - 1);
    if (smin_ <= 1e-8) {
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(alpha * sp.lambda() * S, false);
        Eigen::Index best;
        (es.eigenvalues().array() - 1.0).abs().minCoeff(&best);
        const cdouble ev = es.eigenvalues()[best];
        throw PoleProximityError("lambda = " + std::to_string(sp.lambda().real()) + std::string(" + ") +
                                     std::to_string(sp.lambda().imag()) +
                                     "i is (numerically) an eigenvalue of T_alpha: alpha lambda S has eigenvalue " +
                                     std::to_string(ev.real()) + " + " + std::to_string(ev.imag()) + "i",
                                 sp.lambda().real());
    }
    const double h = src_.scale / 8;
    const int n = int(std::ceil(2 * src_.radius / h));
    const VolumeGrid vg = make_volume_grid(src_.center, src_.radius, n);
    Eigen::VectorXcd samples(vg.points.size());
    for (std::size_t i = 0; i < vg.points.size(); ++i) samples[i] = src_.f(vg.points[i]);
    const DensityVector rhs = apply_Psi_star(grid_, sp.conj(), vg, samples);
    phi_ = A.partialPivLu().solve(rhs);
}

Eigen::VectorXcd KreinSolution::free_part(const std::vector<Vec2>& points) const {
    return free_resolvent(sp_, src_, points);
}

Eigen::VectorXcd KreinSolution::value(const std::vector<Vec2>& points) const {
    Eigen::VectorXcd g = free_resolvent(sp_, src_, points);
    if (alpha_ != 0) g += alpha_ * eval_Psi(grid_, phi_, sp_, points).values;
    return g;
}

Eigen::VectorXcd KreinSolution::dzbar(const std::vector<Vec2>& points) const {
    Eigen::VectorXcd g = free_resolvent_dzbar(sp_, src_, points);
    if (alpha_ != 0) g += alpha_ * cdouble(0, 1) * sp_.lambda() / 2.0 * eval_SL(grid_, phi_, sp_, points).values;
    return g;
}

FieldSamples krein_apply(const Curve& curve, double alpha, const SpectralParameter& sp, const VolumeSource& src,
                         const std::vector<Vec2>& points, const SpectralOptions& opt) {
    const KreinSolution sol(curve, alpha, sp, src, opt);
    return {points, sol.value(points)};
}

}  // namespace oblique
