#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <numbers>
#include <sstream>

#include "oblique/bie.hpp"
#include "oblique/dirac.hpp"
#include "oblique/errors.hpp"
#include "oblique/spectral.hpp"
#include "support.hpp"

using namespace oblique;
using testing::rel;
constexpr double pi = std::numbers::pi;
const cdouble I(0, 1);

namespace {

std::vector<double> sorted_eigs(const QuadratureGrid& g, double lambda) {
    const Eigen::MatrixXd A = symmetrized(g, assemble_S_real(g, lambda));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (A + A.transpose()), Eigen::EigenvaluesOnly);
    std::vector<double> v(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    std::sort(v.begin(), v.end(), std::greater<>());
    return v;
}

std::vector<double> circle_oracle(double R, double lambda, int count) {
    std::vector<double> v{circle_oracle_mu(0, R, lambda)};
    for (int m = 1; int(v.size()) < count + 2; ++m) {
        v.push_back(circle_oracle_mu(m, R, lambda));
        v.push_back(circle_oracle_mu(m, R, lambda));
    }
    std::sort(v.begin(), v.end(), std::greater<>());
    v.resize(count);
    return v;
}

DensityVector mode(const QuadratureGrid& g, int m) {
    DensityVector phi(g.size());
    for (int k = 0; k < g.size(); ++k) phi[k] = std::polar(1.0, m * g.nodes()[k]);
    return phi;
}

DensityVector random_density(int N) {
    DensityVector phi(N);
    for (int k = 0; k < N; ++k) phi[k] = cdouble(testing::uniform(-1, 1), testing::uniform(-1, 1));
    return phi;
}

}  // namespace

TEST_CASE("circle(1), lambda=-1, N=128 matches the Fourier oracle") {
    const QuadratureGrid g(make_circle(1), 128);
    const auto mu = sorted_eigs(g, -1);
    const auto ref = circle_oracle(1, -1, 32);
    for (int k = 0; k < 32; ++k) CHECK(std::abs(mu[k] - ref[k]) <= 1e-8 * ref[k]);
    CHECK(std::abs(mu[0] - testing::oracle()["i0k0_at_1"].get<double>()) < 1e-13);
}

TEST_CASE("complex path agrees with the real path") {
    const QuadratureGrid g(make_kite(), 64);
    const Eigen::MatrixXd R = assemble_S_real(g, -2.0);
    const Eigen::MatrixXcd C = assemble_S(g, SpectralParameter(cdouble(-2.0, 1e-300))).entries;
    CHECK((C - R.cast<cdouble>()).norm() < 1e-12 * R.norm());
}

TEST_CASE("S(lambda) is positive for lambda=-5 on every builtin curve") {
    for (const Curve& c : {make_circle(1), make_ellipse(2, 1), make_kite()}) {
        const auto mu = sorted_eigs(QuadratureGrid(c, 128), -5);
        CHECK(mu.back() > 0);
        CHECK(std::is_sorted(mu.begin(), mu.end(), std::greater<>()));
    }
}

TEST_CASE("weighted S(lambda) is symmetric") {
    for (const Curve& c : {make_circle(1), make_ellipse(2, 1), make_kite()})
        for (double lambda : {-0.01, -1.0, -50.0}) {
            const QuadratureGrid g(c, 128);
            CHECK(relative_asymmetry(symmetrized(g, assemble_S_real(g, lambda))) <= 1e-10);
        }
}

TEST_CASE("norm envelope ||S|| sqrt(2+|lambda|) / ln sqrt(2 + 1/|lambda|) stays bounded") {
    const Curve c = make_circle(1);
    std::vector<double> env;
    for (double lambda : {-1e-3, -1e-2, -1e-1, -1.0, -1e1, -1e2, -1e3}) {
        const SingleLayerSpectrum s = single_layer_spectrum(c, lambda, 64, true);
        const double a = -lambda;
        env.push_back(s.mu.front() * std::sqrt(2 + a) / std::log(std::sqrt(2 + 1 / a)));
    }
    const auto [lo, hi] = std::minmax_element(env.begin(), env.end());
    CHECK(*lo > 0);
    CHECK(*hi / *lo < 10);
}

TEST_CASE("spectral convergence of the top eigenvalues under N doubling") {
    // kite against a fine reference
    const auto ref = sorted_eigs(QuadratureGrid(make_kite(), 512), -1);
    std::vector<double> err;
    for (int N : {32, 64, 128}) {
        const auto mu = sorted_eigs(QuadratureGrid(make_kite(), N), -1);
        double e = 0;
        for (int k = 0; k < 5; ++k) e = std::max(e, std::abs(mu[k] - ref[k]));
        err.push_back(e);
    }
    CHECK(err[1] / err[0] < 0.1);
    CHECK((err[2] < 1e-13 || err[2] / err[1] < 0.1));

    // circle mu_0 against the oracle: already at round-off for N=16
    std::vector<double> e0;
    for (int N : {16, 32, 64, 128, 256})
        e0.push_back(std::abs(sorted_eigs(QuadratureGrid(make_circle(1), N), -1)[0] - circle_oracle_mu(0, 1, -1)));
    for (double e : e0) CHECK(e < 1e-13);
}

TEST_CASE("zeta rule keeps S(lambda) positive at large |kappa| and agrees with Kress where both apply") {
    const QuadratureGrid g(make_circle(1), 256);
    const auto mu = sorted_eigs(g, -1600);
    CHECK(mu.back() > 0);
    CHECK(std::abs(mu[0] - circle_oracle_mu(0, 1, -1600)) < 1e-8 * mu[0]);
    const QuadratureGrid gk(make_kite(), 128);
    const Eigen::MatrixXd K = assemble_S_real(gk, -1, LogQuadrature::kress);
    const Eigen::MatrixXd Z = assemble_S_real(gk, -1, LogQuadrature::zeta);
    // the Nystrom matrices differ entrywise; their action on smooth densities agrees
    for (int m : {0, 1, 3}) {
        const Eigen::VectorXcd a = K.cast<cdouble>() * mode(gk, m), b = Z.cast<cdouble>() * mode(gk, m);
        CHECK((a - b).norm() < 1e-8 * a.norm());
    }
    CHECK_THROWS_AS(assemble_S_real(QuadratureGrid(make_circle(1), 16), -6400, LogQuadrature::zeta), ResolutionError);
}

TEST_CASE("assemble_S rejects lambda on [0, inf)") {
    CHECK_THROWS_AS(assemble_S(QuadratureGrid(make_circle(), 32), SpectralParameter(1.0)), DomainError);
}

TEST_CASE("M3 C M3: structural zeros and the scalar block") {
    const QuadratureGrid g(make_circle(1), 64);
    for (double c : {3.0, 20.0}) {
        const DiracParameter dp(cdouble(0, 1), c);
        const BoundaryOperatorMatrix M = assemble_M3CM3(g, dp);
        const int N = g.size();
        REQUIRE(M.entries.rows() == 2 * N);
        CHECK(M.entries.topRows(N).cwiseAbs().maxCoeff() == 0.0);
        CHECK(M.entries.leftCols(N).cwiseAbs().maxCoeff() == 0.0);
        Eigen::MatrixXcd P = Eigen::MatrixXcd::Zero(2 * N, 2 * N);
        P.bottomRightCorner(N, N).setIdentity();
        CHECK((P * M.entries - M.entries * P).norm() == 0.0);
        // bottom block = (lambda/c^2) S at the relativistic parameter
        const Eigen::MatrixXcd S = assemble_S(g, dp.relativistic()).entries;
        const Eigen::MatrixXcd B = M.entries.bottomRightCorner(N, N);
        CHECK((B - dp.offset() / (c * c) * S).norm() <= 1e-13 * B.norm());
    }
}

TEST_CASE("c^2 M3 C M3 - lambda S M3 decays at least like 1/c") {
    const QuadratureGrid g(make_circle(1), 64);
    const cdouble lambda(0, 1);
    const Eigen::MatrixXcd S = assemble_S(g, SpectralParameter(lambda)).entries;
    std::vector<double> cs{8, 16, 32, 64, 128}, gaps;
    for (double c : cs) {
        const Eigen::MatrixXcd B = assemble_M3CM3(g, DiracParameter(lambda, c)).entries.bottomRightCorner(64, 64);
        gaps.push_back(operator_norm(g, c * c * B - lambda * S));
    }
    for (std::size_t i = 1; i < gaps.size(); ++i) CHECK(gaps[i] < gaps[i - 1]);
    const double slope = loglog_slope(cs, gaps);
    MESSAGE("log-log slope " << slope);
    CHECK(slope <= -0.8);
}

TEST_CASE("matrix CSV round trip") {
    Eigen::MatrixXcd A(3, 2);
    A << cdouble(1, -2), cdouble(1e-300, 0), cdouble(pi, std::exp(1.0)), cdouble(-0.0, 7), cdouble(1e10, 1e-10),
        cdouble(0.1, 0.2);
    std::stringstream ss;
    write_matrix_csv(ss, A);
    const Eigen::MatrixXcd B = read_matrix_csv(ss);
    CHECK(B == A);
    std::stringstream bad("1,2,3\n");
    CHECK_THROWS(read_matrix_csv(bad));
}

TEST_CASE("SL potential against adaptive quadrature") {
    const QuadratureGrid g(make_circle(1), 128);
    const SpectralParameter sp(-1.0);
    for (const auto& e : testing::oracle()["circle_sl_potential"]) {
        const Vec2 x(e["x"].get<double>(), e["y"].get<double>());
        const cdouble ref = testing::cplx(e["value"]);
        const cdouble v = eval_SL(g, mode(g, e["m"]), sp, {x}).values[0];
        CHECK(std::abs(v - ref) < 1e-12 * std::max(1e-3, std::abs(ref)));
    }
    CHECK(rel(eval_SL(g, mode(g, 0), sp, {Vec2(0, 0)}).values[0], cdouble(testing::oracle()["k0_at_1"].get<double>())) <
          1e-13);
}

TEST_CASE("near-curve SL evaluation stays accurate") {
    const QuadratureGrid g(make_circle(1), 64);
    const SpectralParameter sp(-1.0);
    // exact for phi = e^{i m t}: SL phi (r e^{i t}) = I_m(r) K_m(1) e^{i m t} inside, I_m(1) K_m(r) e^{i m t} outside
    for (int m : {0, 2})
        for (double r : {0.999, 0.9999, 1.001}) {
            const double t = 0.3;
            const Vec2 x(r * std::cos(t), r * std::sin(t));
            const double rad = r < 1 ? bessel_ik_int(m, r).i * bessel_ik_int(m, 1).k : bessel_ik_int(m, 1).i * bessel_ik_int(m, r).k;
            const cdouble ref = rad * std::polar(1.0, m * t);
            CHECK(std::abs(eval_SL(g, mode(g, m), sp, {x}).values[0] - ref) < 1e-10);
        }
}

TEST_CASE("SL and Psi are linear, vanish on zero density and decay") {
    const QuadratureGrid g(make_ellipse(2, 1), 64);
    const SpectralParameter sp(-1.0);
    const DensityVector a = random_density(64), b = random_density(64);
    const std::vector<Vec2> pts{{0.2, 0.1}, {3.0, 1.0}, {-2.0, 0.5}, {0.0, 1.02}};
    const cdouble s(0.3, -1.2), t(2.0, 0.5);
    for (auto f : {&eval_SL, &eval_Psi}) {
        const Eigen::VectorXcd lhs = f(g, s * a + t * b, sp, pts).values;
        const Eigen::VectorXcd rhs = s * f(g, a, sp, pts).values + t * f(g, b, sp, pts).values;
        CHECK((lhs - rhs).norm() < 1e-13 * rhs.norm());
        CHECK(f(g, DensityVector::Zero(64), sp, pts).values.norm() == 0.0);
        double prev = INFINITY;
        for (double r = 4; r < 40; r += 4) {
            const double v = std::abs(f(g, a, sp, {Vec2(r, 0.3 * r)}).values[0]);
            CHECK(v < prev);
            prev = v;
        }
        CHECK(prev < 1e-12);
    }
    CHECK_THROWS_AS(eval_SL(g, a, sp, {g.points()[5]}), SingularityError);
}

TEST_CASE("dzbar Psi = (i lambda / 2) SL off the curve") {
    const QuadratureGrid g(make_kite(), 64);
    const DensityVector phi = random_density(64);
    for (cdouble lambda : {cdouble(-2, 0), cdouble(1, 1)}) {
        const SpectralParameter sp(lambda);
        for (const Vec2& x : {Vec2(0.0, 0.2), Vec2(2.0, 1.5), Vec2(-0.4, -2.0)}) {
            std::vector<double> errs;
            for (double h : {4e-3, 2e-3}) {
                const std::vector<Vec2> p{x + Vec2(h, 0), x - Vec2(h, 0), x + Vec2(0, h), x - Vec2(0, h)};
                const Eigen::VectorXcd v = eval_Psi(g, phi, sp, p).values;
                const cdouble dzb = ((v[0] - v[1]) + I * (v[2] - v[3])) / (4 * h);
                const cdouble ref = I * lambda / 2.0 * eval_SL(g, phi, sp, {x}).values[0];
                errs.push_back(std::abs(dzb - ref) / std::abs(ref));
            }
            CHECK(errs[1] < 1e-4);
            CHECK(errs[0] / errs[1] == doctest::Approx(4).epsilon(0.15));
        }
    }
}

TEST_CASE("Psi phi solves the Helmholtz equation off the curve") {
    const QuadratureGrid g(make_circle(1), 64);
    const DensityVector phi = random_density(64);
    const double lambda = -3;
    const SpectralParameter sp(lambda);
    for (const Vec2& x : {Vec2(0.1, 0.3), Vec2(1.6, -0.4)}) {
        std::vector<double> res;
        for (double h : {4e-3, 2e-3}) {
            const std::vector<Vec2> p{x, x + Vec2(h, 0), x - Vec2(h, 0), x + Vec2(0, h), x - Vec2(0, h)};
            const Eigen::VectorXcd v = eval_Psi(g, phi, sp, p).values;
            const cdouble lap = (v[1] + v[2] + v[3] + v[4] - 4.0 * v[0]) / (h * h);
            res.push_back(std::abs(-lap - lambda * v[0]) / std::abs(v[0]));
        }
        CHECK(res[1] < res[0] / 3);
        CHECK(res[1] < 1e-3);
    }
}

TEST_CASE("jump relations for Fourier modes") {
    const QuadratureGrid g(make_circle(1), 128);
    const SpectralParameter sp(-2.0);
    const Eigen::MatrixXcd S = assemble_S(g, sp).entries;
    for (int m : {1, 3}) {
        const DensityVector phi = mode(g, m);
        const JumpTraces jt = jump_traces(g, phi, sp, default_h_sequence(g.curve()));
        const DensityVector lS = -2.0 * (S * phi);
        CHECK(l2_norm(g, jt.jump_estimate - phi) <= 1e-4 * l2_norm(g, phi));
        CHECK(l2_norm(g, jt.dzbar_sum - lS) <= 1e-4 * l2_norm(g, lS));
    }
    const JumpTraces z = jump_traces(g, DensityVector::Zero(128), sp, default_h_sequence(g.curve()));
    CHECK(z.jump_estimate.norm() == 0.0);
    CHECK(z.dzbar_sum.norm() == 0.0);
}

TEST_CASE("jump residual decreases with extrapolation order") {
    const QuadratureGrid g(make_kite(), 64);
    const SpectralParameter sp(-1.0);
    const DensityVector phi = mode(g, 2);
    const auto hs = default_h_sequence(g.curve());
    std::vector<double> res;
    for (int order : {0, 1, 2}) res.push_back(l2_norm(g, jump_traces(g, phi, sp, hs, order).jump_estimate - phi));
    CHECK(res[1] < res[0]);
    CHECK(res[2] < res[1]);
}

TEST_CASE("trace extrapolation detects divergence") {
    const QuadratureGrid g(make_circle(1), 32);
    FieldFunction blowup = [&](const std::vector<Vec2>& p) {
        Eigen::VectorXcd v(p.size());
        for (std::size_t i = 0; i < p.size(); ++i) v[i] = 1.0 / std::abs(p[i].norm() - 1);
        return v;
    };
    CHECK_THROWS_AS(one_sided_traces(g, blowup, default_h_sequence(g.curve())), NumericalInstabilityError);
    CHECK_THROWS_AS(one_sided_traces(g, blowup, {1e-2, 2e-2}), ParameterError);
}

TEST_CASE("Psi* is the adjoint of Psi on the volume grid") {
    const QuadratureGrid g(make_ellipse(2, 1), 128);
    const SpectralParameter sp(cdouble(-1, 0.5));
    VolumeGrid vg = make_volume_grid(Vec2(0, 0), 3, 60);
    Eigen::VectorXcd f(vg.points.size());
    for (std::size_t i = 0; i < vg.points.size(); ++i) {
        const Vec2 d = vg.points[i] - Vec2(0.2, 0.0);
        const double q = 1 - d.squaredNorm() / 0.09;
        f[i] = q > 0 ? cdouble(1, 0.4) * std::pow(q, 4) : 0.0;
    }
    const DensityVector phi = random_density(128);
    const Eigen::VectorXcd psi = eval_Psi(g, phi, sp, vg.points).values;
    const cdouble lhs = vg.weight * (f.adjoint() * psi)(0);
    const DensityVector ps = apply_Psi_star(g, sp, vg, f);
    cdouble rhs = 0;
    for (int k = 0; k < 128; ++k) rhs += std::conj(ps[k]) * phi[k] * g.weight() * g.jacobians()[k];
    CHECK(std::abs(lhs - rhs) < 1e-10 * std::abs(lhs));
    CHECK(apply_Psi_star(g, sp, vg, Eigen::VectorXcd::Zero(vg.points.size())).norm() == 0.0);
}

TEST_CASE("Psi* of a distant bump decays exponentially with the distance") {
    const QuadratureGrid g(make_circle(1), 64);
    const SpectralParameter sp(-1.0);
    std::vector<double> logs;
    for (double d : {3.0, 4.0, 5.0, 6.0}) {
        VolumeGrid vg = make_volume_grid(Vec2(1 + d, 0), 0.6, 24);
        Eigen::VectorXcd f(vg.points.size());
        for (std::size_t i = 0; i < vg.points.size(); ++i)
            f[i] = std::exp(-(vg.points[i] - vg.center).squaredNorm() / 0.02);
        logs.push_back(std::log(apply_Psi_star(g, sp, vg, f).cwiseAbs().maxCoeff()));
    }
    // kappa = 1: the log drops by about one per unit distance
    for (std::size_t i = 1; i < logs.size(); ++i) {
        const double slope = logs[i] - logs[i - 1];
        CHECK(slope < -0.9);
        CHECK(slope > -1.3);
    }
}

TEST_CASE("Psi* refuses sources touching the curve") {
    const QuadratureGrid g(make_circle(1), 32);
    VolumeGrid vg = make_volume_grid(Vec2(0, 0), 2, 40);
    Eigen::VectorXcd f = Eigen::VectorXcd::Ones(vg.points.size());
    CHECK_THROWS_AS(apply_Psi_star(g, SpectralParameter(-1.0), vg, f), ConfigurationError);
}
