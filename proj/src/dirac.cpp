#include "oblique/dirac.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <limits>
#include <numbers>

#include "oblique/errors.hpp"
#include "oblique/kernels.hpp"

namespace oblique {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double kBoxChange = 0.10;
constexpr double kPoleGate = 1e-8;

void check_lambda(cdouble lambda) {
    if (!std::isfinite(lambda.real()) || !std::isfinite(lambda.imag()))
        throw ParameterError("lambda must be finite");
    if (lambda.imag() == 0.0) throw DomainError("lambda must be non-real");
}

void check_c(double c) {
    if (!(c > 0) || !std::isfinite(c)) throw ParameterError("c must be positive and finite");
}

double spectral_norm2(const Mat2c& m) {
    return Eigen::JacobiSVD<Mat2c>(m).singularValues()(0);
}

// Largest eigenvalue of a Hermitian matrix.
double max_eigenvalue(const Eigen::MatrixXcd& H) {
    if (H.size() == 0) return 0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H, Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
}

Eigen::MatrixXcd psd_sqrt(const Eigen::MatrixXcd& G) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(G);
    Eigen::VectorXd d = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().adjoint();
}

Eigen::MatrixXcd gram(const Eigen::MatrixXcd& A) {
    Eigen::MatrixXcd G = Eigen::MatrixXcd::Zero(A.cols(), A.cols());
    G.selfadjointView<Eigen::Lower>().rankUpdate(A.adjoint());
    return G.selfadjointView<Eigen::Lower>();
}

// || U B Ut^H || from G = U^H U and Gt = Ut^H Ut.
double lowrank_norm(const Eigen::MatrixXcd& G, const Eigen::MatrixXcd& B, const Eigen::MatrixXcd& Gt) {
    const Eigen::MatrixXcd s = psd_sqrt(G);
    const Eigen::MatrixXcd H = s * B * Gt * B.adjoint() * s;
    return std::sqrt(std::max(0.0, max_eigenvalue(0.5 * (H + H.adjoint()))));
}

VolumeGrid probe_grid(const QuadratureGrid& grid, const VolumeBox& box, double spacing) {
    if (!(box.half_width >= 0) || !(spacing > 0)) throw ParameterError("invalid volume box");
    Vec2 centre = Vec2::Zero();
    for (const Vec2& p : grid.points()) centre += p;
    centre /= grid.size();
    const double w = box.half_width > 0 ? box.half_width : 3 * grid.curve().diameter();
    const int n = std::max(2, int(std::ceil(2 * w / spacing)));
    VolumeGrid vg = make_volume_grid(centre, w, n);
    return exclude_near_curve(vg, grid.curve(), vg.h / 2);
}

// D_v^{1/2} P D_b^{-1/2} for the boundary-to-volume matrices from boundary_to_points.
void weight(Eigen::MatrixXcd& P, const VolumeGrid& vg, const Eigen::VectorXd& db) {
    P *= std::sqrt(vg.weight);
    for (int k = 0; k < P.cols(); ++k) P.col(k) /= std::sqrt(db[k]);
}

// c G_omega(x - y) M3 column, split into its two rows.
std::vector<Eigen::MatrixXcd> dirac_columns(const QuadratureGrid& grid, const VolumeGrid& vg,
                                            const DiracParameter& dp, const Eigen::VectorXd& db) {
    const double c = dp.c();
    auto P = boundary_to_points(grid, vg.points, 2, [&](const Vec2& x, cdouble* out) {
        const Mat2c G = kernel_G(dp, x);
        out[0] = c * G(0, 1);
        out[1] = c * G(1, 1);
    });
    for (auto& m : P) weight(m, vg, db);
    return P;
}

Eigen::MatrixXcd psi_matrix(const QuadratureGrid& grid, const VolumeGrid& vg, const SpectralParameter& sp,
                            const Eigen::VectorXd& db) {
    Eigen::MatrixXcd P = boundary_to_points(grid, vg.points, [&](const Vec2& x) { return kernel_L(sp, x); });
    weight(P, vg, db);
    return P;
}

// || [d1 - r; d2] || via Grams.
double column_gap(const Eigen::MatrixXcd& d1, const Eigen::MatrixXcd& d2, const Eigen::MatrixXcd& r) {
    const Eigen::MatrixXcd diff = d1 - r;
    return std::sqrt(std::max(0.0, max_eigenvalue(gram(diff) + gram(d2))));
}

double phi_gap(const QuadratureGrid& grid, const VolumeGrid& vg, cdouble lambda, double c) {
    const Eigen::VectorXd db = l2_weights(grid);
    const auto d = dirac_columns(grid, vg, DiracParameter(lambda, c), db);
    return column_gap(d[0], d[1], psi_matrix(grid, vg, SpectralParameter(lambda), db));
}

void check_volume_box(const QuadratureGrid& grid, const VolumeBox& box, cdouble lambda, double c) {
    // coarse doubling check of the probe box for the boundary-to-volume gaps
    const double w = box.half_width > 0 ? box.half_width : 3 * grid.curve().diameter();
    const double s = std::max(4 * box.spacing, w / 16);
    const double g1 = phi_gap(grid, probe_grid(grid, {w, s}, s), lambda, c);
    const double g2 = phi_gap(grid, probe_grid(grid, {2 * w, s}, s), lambda, c);
    if (std::abs(g2 - g1) > kBoxChange * std::abs(g2))
        throw ConfigurationError("volume box too small: doubling it changes the gap by more than 10%");
}

double c2_gap(const QuadratureGrid& grid, cdouble lambda, double c, const Eigen::MatrixXcd& S) {
    const int N = grid.size();
    const auto M = assemble_M3CM3(grid, DiracParameter(lambda, c));
    const Eigen::MatrixXcd D = c * c * M.entries.bottomRightCorner(N, N) - lambda * S;
    const Eigen::VectorXd w = l2_weights(grid).cwiseSqrt();
    const Eigen::MatrixXcd Ds = w.asDiagonal() * D * w.cwiseInverse().asDiagonal();
    return Eigen::JacobiSVD<Eigen::MatrixXcd>(Ds).singularValues()(0);
}

// Everything that does not depend on c.
struct Reference {
    QuadratureGrid grid;
    VolumeGrid vg;
    Eigen::VectorXd db;
    Eigen::MatrixXcd r, rt;  // Psi_lambda, Psi_{conj lambda}
    Eigen::MatrixXcd S;      // S(lambda)
};

Reference make_reference(const Curve& curve, cdouble lambda, int N, const VolumeBox& box) {
    QuadratureGrid grid(curve, N);
    VolumeGrid vg = probe_grid(grid, box, box.spacing);
    Eigen::VectorXd db = l2_weights(grid);
    const SpectralParameter sp(lambda);
    Eigen::MatrixXcd r = psi_matrix(grid, vg, sp, db);
    Eigen::MatrixXcd rt = psi_matrix(grid, vg, sp.conj(), db);
    Eigen::MatrixXcd S = assemble_S(grid, sp).entries;
    return {std::move(grid), std::move(vg), std::move(db), std::move(r), std::move(rt), std::move(S)};
}

struct CSample {
    GapTuple gaps;
    DiracResolventBlocks blocks;
};

double radial_m1m3(cdouble lambda) {
    const SpectralParameter sp(lambda);
    double m = 0;
    for (double r : {1e-3, 0.1, 1.0, 10.0}) {
        const Mat2c lim = kernel_U(sp, Vec2(r, 0)) * mat_M1();
        m = std::max(m, (lim * mat_M3()).cwiseAbs().maxCoeff());
    }
    return m;
}

CSample sample_c(const Reference& ref, double alpha, cdouble lambda, double c, double box_half_width) {
    const QuadratureGrid& grid = ref.grid;
    const int N = grid.size();
    const DiracParameter dp(lambda, c), dpt(std::conj(lambda), c);
    CSample out;
    GapTuple& g = out.gaps;
    g.c = c;
    g.volume_points = int(ref.vg.points.size());
    g.a0 = schur_gap_a0(lambda, c, box_half_width);
    g.m1m3_block = radial_m1m3(lambda);
    g.cz = c2_gap(grid, lambda, c, ref.S);

    const auto d = dirac_columns(grid, ref.vg, dp, ref.db);
    const auto t = dirac_columns(grid, ref.vg, dpt, ref.db);
    g.phi = column_gap(d[0], d[1], ref.r);
    g.phistar = column_gap(t[0], t[1], ref.rt);

    // Grams of [dirac | reference] per output component.
    auto comp1 = [&](const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
        Eigen::MatrixXcd G(2 * N, 2 * N);
        G.topLeftCorner(N, N) = gram(a);
        G.topRightCorner(N, N) = a.adjoint() * b;
        G.bottomLeftCorner(N, N) = G.topRightCorner(N, N).adjoint();
        G.bottomRightCorner(N, N) = gram(b);
        return G;
    };
    auto comp2 = [&](const Eigen::MatrixXcd& a) {
        Eigen::MatrixXcd G = Eigen::MatrixXcd::Zero(2 * N, 2 * N);
        G.topLeftCorner(N, N) = gram(a);
        return G;
    };
    const std::array<Eigen::MatrixXcd, 2> G{comp1(d[0], ref.r), comp2(d[1])};
    const std::array<Eigen::MatrixXcd, 2> Gt{comp1(t[0], ref.rt), comp2(t[1])};

    const Eigen::VectorXd sw = ref.db.cwiseSqrt();
    const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(N, N);
    const auto M = assemble_M3CM3(grid, dp);
    const Eigen::MatrixXcd AD = I - alpha * c * c * M.entries.bottomRightCorner(N, N);
    const Eigen::MatrixXcd AR = I - alpha * lambda * ref.S;

    DiracResolventBlocks& b = out.blocks;
    b.c = c;
    b.alpha = alpha;
    b.lambda = lambda;
    b.N = N;
    b.min_singular_value =
        Eigen::JacobiSVD<Eigen::MatrixXcd>(sw.asDiagonal() * AD * sw.cwiseInverse().asDiagonal())
            .singularValues()
            .minCoeff();
    if (b.min_singular_value < kPoleGate)
        throw PoleProximityError("I - alpha c^2 M3 C M3 is numerically singular", lambda.real());

    auto sym = [&](const Eigen::MatrixXcd& X) -> Eigen::MatrixXcd {
        return sw.asDiagonal() * X * sw.cwiseInverse().asDiagonal();
    };
    Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(2 * N, 2 * N);
    B.topLeftCorner(N, N) = sym(alpha * AD.partialPivLu().solve(I));
    B.bottomRightCorner(N, N) = -sym(alpha * AR.partialPivLu().solve(I));
    Eigen::MatrixXcd BD = B, BR = B;
    BD.bottomRightCorner(N, N).setZero();
    BR.topLeftCorner(N, N).setZero();

    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            b.dirac[i][j] = lowrank_norm(G[i], BD, Gt[j]);
            b.reference[i][j] = lowrank_norm(G[i], BR, Gt[j]);
            b.difference[i][j] = lowrank_norm(G[i], B, Gt[j]);
        }
    const Eigen::MatrixXcd Gs = G[0] + G[1], Gts = Gt[0] + Gt[1];
    b.dirac_norm = lowrank_norm(Gs, BD, Gts);
    b.reference_norm = lowrank_norm(Gs, BR, Gts);
    b.difference_norm = lowrank_norm(Gs, B, Gts);
    return out;
}

double box_half_width(const Curve& curve, const VolumeBox& box) {
    return box.half_width > 0 ? box.half_width : 3 * curve.diameter();
}

}  // namespace

double schur_gap_a0(cdouble lambda, double c, double W) {
    check_lambda(lambda);
    check_c(c);
    if (!(W > 0)) throw ParameterError("box half-width must be positive");
    const SpectralParameter sp(lambda);
    const DiracParameter dp(lambda, c);
    auto f = [&](double r) {
        if (r <= 0) r = 1e-300;
        const Vec2 x(r, 0);
        const double k = spectral_norm2(kernel_G(dp, x) - kernel_U(sp, x) * mat_M1());
        const double angle = r <= W ? 2 * pi : 2 * pi - 8 * std::acos(std::min(1.0, W / r));
        return k * angle * r;
    };
    using boost::math::quadrature::gauss_kronrod;
    const double inner = gauss_kronrod<double, 31>::integrate(f, 0.0, W, 15, 1e-10);
    const double outer = gauss_kronrod<double, 31>::integrate(f, W, std::sqrt(2.0) * W, 15, 1e-10);
    return inner + outer;
}

GapTuple limit_gaps(const Curve& curve, cdouble lambda, double c, int N, const VolumeBox& box) {
    check_lambda(lambda);
    check_c(c);
    const double w = box_half_width(curve, box);
    const double a = schur_gap_a0(lambda, c, w);
    const double a2 = schur_gap_a0(lambda, c, 2 * w);
    if (std::abs(a2 - a) > kBoxChange * a2)
        throw ConfigurationError("volume box too small: doubling it changes the Schur bound by more than 10%");
    const Reference ref = make_reference(curve, lambda, N, box);
    check_volume_box(ref.grid, box, lambda, c);
    return sample_c(ref, 0.0, lambda, c, w).gaps;
}

DiracResolventBlocks dirac_correction(const Curve& curve, double alpha, cdouble lambda, double c, int N,
                                      const VolumeBox& box) {
    check_lambda(lambda);
    check_c(c);
    if (!std::isfinite(alpha)) throw ParameterError("alpha must be finite");
    const Reference ref = make_reference(curve, lambda, N, box);
    return sample_c(ref, alpha, lambda, c, box_half_width(curve, box)).blocks;
}

SqrtShiftBounds sqrt_shift_bounds(cdouble lambda, double c, int samples) {
    check_lambda(lambda);
    check_c(c);
    if (samples < 2) throw ParameterError("need at least two samples");
    const cdouble s0 = sqrt_upper(lambda);
    auto eval = [&](double cc) {
        SqrtShiftBounds b;
        b.lambda = lambda;
        b.c = cc;
        b.min_abs_ratio = b.min_im_ratio = std::numeric_limits<double>::infinity();
        b.max_abs_ratio = 0;
        for (int j = 0; j < samples; ++j) {
            const double t = double(j) / (samples - 1);
            const cdouble s = sqrt_upper(lambda + t * lambda * lambda / (cc * cc));
            const double r = std::abs(s) / std::abs(s0);
            b.min_abs_ratio = std::min(b.min_abs_ratio, r);
            b.max_abs_ratio = std::max(b.max_abs_ratio, r);
            b.min_im_ratio = std::min(b.min_im_ratio, s.imag() / s0.imag());
        }
        b.holds = b.min_abs_ratio >= 0.5 && b.max_abs_ratio <= 1.5 && b.min_im_ratio >= 0.5;
        return b;
    };
    SqrtShiftBounds out = eval(c);

    double hi = std::max(c, 1.0);
    while (!eval(hi).holds) {
        hi *= 2;
        if (hi > 1e12) throw DivergenceError("no c found at which the square-root bounds hold");
    }
    double lo = hi;
    while (eval(lo).holds && lo > 1e-12) lo /= 2;
    if (eval(lo).holds) {
        out.threshold_c = 0;
        return out;
    }
    for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (eval(mid).holds ? hi : lo) = mid;
    }
    out.threshold_c = hi;
    return out;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw ParameterError("slope fit needs at least two points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = double(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0) || !(y[i] > 0)) throw DomainError("log-log fit needs positive values");
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double den = n * sxx - sx * sx;
    if (den == 0) throw ParameterError("slope fit needs distinct abscissae");
    return (n * sxy - sx * sy) / den;
}

LimitStudyResult limit_study(const Curve& curve, cdouble lambda, double alpha, const std::vector<double>& c_values,
                             int N, const VolumeBox& box) {
    check_lambda(lambda);
    if (c_values.size() < 2) throw ParameterError("limit study needs at least two c values");
    std::vector<double> cs = c_values;
    std::sort(cs.begin(), cs.end());
    for (std::size_t i = 0; i < cs.size(); ++i) {
        check_c(cs[i]);
        if (i && cs[i] == cs[i - 1]) throw ParameterError("duplicate c value");
    }

    LimitStudyResult res;
    res.curve = curve.name();
    res.lambda = lambda;
    res.alpha = alpha;
    res.N = N;
    res.c_values = cs;
    res.sqrt_threshold_c = sqrt_shift_bounds(lambda, cs.front()).threshold_c;

    const double w = box_half_width(curve, box);
    if (std::abs(schur_gap_a0(lambda, cs.front(), 2 * w) - schur_gap_a0(lambda, cs.front(), w)) >
        kBoxChange * schur_gap_a0(lambda, cs.front(), 2 * w))
        throw ConfigurationError("volume box too small: doubling it changes the Schur bound by more than 10%");
    const Reference ref = make_reference(curve, lambda, N, box);
    check_volume_box(ref.grid, box, lambda, cs.front());

    for (double c : cs) {
        CSample s = sample_c(ref, alpha, lambda, c, w);
        res.gaps.push_back(s.gaps);
        res.corrections.push_back(s.blocks);
    }

    std::array<std::vector<double>, 4> series;
    for (const GapTuple& g : res.gaps) {
        series[0].push_back(g.a0);
        series[1].push_back(g.phi);
        series[2].push_back(g.phistar);
        series[3].push_back(g.cz);
    }
    for (int k = 0; k < 4; ++k) {
        res.slopes[k] = loglog_slope(cs, series[k]);
        res.decreasing[k] = true;
        res.constants[k] = 0;
        for (std::size_t i = 0; i < cs.size(); ++i) {
            res.constants[k] = std::max(res.constants[k], series[k][i] * cs[i]);
            if (i && !(series[k][i] < series[k][i - 1])) res.decreasing[k] = false;
        }
    }
    if (alpha != 0) {
        std::vector<double> diff, d22;
        for (const auto& b : res.corrections) {
            diff.push_back(b.difference_norm);
            d22.push_back(b.difference[1][1]);
        }
        res.correction_slope = loglog_slope(cs, diff);
        res.correction_22_slope = loglog_slope(cs, d22);
    }
    return res;
}

double compression_identity_residual(const Eigen::MatrixXcd& C, cdouble a) {
    if (C.rows() != C.cols() || C.rows() % 2) throw ParameterError("matrix must be square of even size");
    const int n = int(C.rows()) / 2;
    Eigen::MatrixXcd M3 = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
    M3.bottomRightCorner(n, n).setIdentity();
    const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(2 * n, 2 * n);
    const Eigen::MatrixXcd lhs = (I - a * M3 * C).partialPivLu().solve(M3);
    const Eigen::MatrixXcd rhs = M3 * (I - a * M3 * C * M3).partialPivLu().solve(I);
    return (lhs - rhs).norm() / rhs.norm();
}

}  // namespace oblique
