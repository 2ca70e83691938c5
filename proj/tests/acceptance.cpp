// Acceptance criteria, one PASS/FAIL line each. Optional arguments select criteria by number.
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <json.hpp>
#include <random>
#include <set>
#include <sstream>

#include "oblique/bie.hpp"
#include "oblique/dirac.hpp"
#include "oblique/io.hpp"
#include "oblique/spectral.hpp"

using namespace oblique;
using nlohmann::json;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;
    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [violated: " << what << "]";
        }
    }
};

const json& oracle() {
    static const json j = json::parse(read_file(ORACLE_FIXTURE));
    return j;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

SpectralOptions opts(int N) {
    SpectralOptions o;
    o.N = N;
    return o;
}

// 1. assemble_S eigenvalues against the fixture values of R I_m K_m with multiplicities
void circle_oracle(Outcome& o) {
    double worst = 0;
    for (double lambda : {-0.5, -1.0, -5.0, -20.0}) {
        std::vector<double> ref;
        for (const auto& e : oracle()["circle_mu"])
            if (e["R"] == 1.0 && e["lambda"] == lambda)
                for (int k = 0; k < (e["m"] == 0 ? 1 : 2); ++k) ref.push_back(e["mu"]);
        std::sort(ref.begin(), ref.end(), std::greater<>());
        const QuadratureGrid g(make_circle(1), 128);
        const Eigen::MatrixXd A = symmetrized(g, assemble_S_real(g, lambda));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (A + A.transpose()), Eigen::EigenvaluesOnly);
        std::vector<double> mu(es.eigenvalues().data(), es.eigenvalues().data() + 128);
        std::sort(mu.begin(), mu.end(), std::greater<>());
        for (int k = 0; k < 10; ++k) worst = std::max(worst, std::abs(mu[k] - ref[k]) / ref[k]);
    }
    o.detail << "max relative error " << worst;
    o.require(worst <= 1e-8, "relative error <= 1e-8");
}

// 2. enumerate_spectrum against the per-branch 1-D roots
void spectrum_oracle(Outcome& o) {
    std::vector<double> ref;
    int m = 0;
    for (const auto& r : oracle()["circle_oblique_roots_alpha_m1"]) {
        for (int k = 0; k < (m == 0 ? 1 : 2); ++k) ref.push_back(r);
        ++m;
    }
    std::sort(ref.begin(), ref.end(), std::greater<>());
    const SpectrumResult s = enumerate_spectrum(make_circle(1), -1, 10, opts(256));
    o.require(s.eigenvalues.size() == 10, "10 roots");
    double worst = 0;
    bool ordered = true;
    for (std::size_t k = 0; k < s.eigenvalues.size(); ++k) {
        worst = std::max(worst, std::abs(s.eigenvalues[k].lambda - ref[k]) / std::abs(ref[k]));
        if (k && s.eigenvalues[k].lambda > s.eigenvalues[k - 1].lambda) ordered = false;
    }
    o.detail << "N=256, max relative error " << worst;
    o.require(worst <= 1e-6, "relative error <= 1e-6");
    o.require(ordered, "non-increasing order");
}

// 3. alpha > 0: no discrete spectrum
void no_bound_states(Outcome& o) {
    double max_ev = -INFINITY, max_radius = 0;
    bool empty = true;
    for (const Curve& c : {make_circle(1), make_kite()})
        for (double alpha : {0.1, 1.0, 10.0}) {
            const SpectrumResult s = enumerate_spectrum(c, alpha, 10, opts(128));
            empty = empty && s.eigenvalues.empty();
            for (const ProbeSample& p : s.probes) {
                max_ev = std::max(max_ev, p.max_eigenvalue);
                max_radius = std::max(max_radius, p.spectral_radius);
            }
        }
    o.detail << "120 probes: max eigenvalue of alpha lambda S " << max_ev << ", max spectral radius " << max_radius
             << "; empty spectra " << (empty ? "yes" : "no");
    o.require(empty, "empty spectrum");
    o.require(max_ev < 1, "max eigenvalue < 1");
    // alpha lambda S(lambda) is negative definite for alpha > 0; its spectral radius grows like
    // alpha sqrt(|lambda|)/2 and exceeds 1 on the stated grid, so this clause cannot hold
    o.require(max_radius < 1, "spectral radius < 1 (unattainable: |alpha lambda mu_1| ~ alpha sqrt(-lambda)/2)");
}

// 4. small-alpha asymptotics
void small_alpha(Outcome& o) {
    const std::vector<double> alphas{-0.2, -0.1, -0.05, -0.025};
    for (const Curve& c : {make_circle(1), make_ellipse(2, 1)}) {
        std::vector<double> off;
        double ratio = 0;
        for (double a : alphas) {
            const EigenvalueRoot r = find_eigenvalue(c, a, 1, opts(256));
            off.push_back(std::abs(r.lambda + 4 / (a * a)));
            ratio = r.lambda * a * a / -4;
        }
        o.detail << c.name() << ": |lambda1 + 4/alpha^2| =";
        for (double v : off) o.detail << " " << v;
        o.detail << ", ratio at -0.025 " << ratio << "; ";
        const double first = off.front();
        o.require(*std::max_element(off.begin(), off.end()) <= 1.05 * first, c.name() + " offset does not grow");
        o.require(ratio >= 0.95 && ratio <= 1.05, c.name() + " ratio in [0.95, 1.05]");
    }
}

// 5. monotonicity and limits of the dispersion functions
void monotonicity(Outcome& o) {
    std::vector<double> grid;
    for (int i = 0; i < 30; ++i) grid.push_back(-200 * std::pow(1e-3 / 200, i / 29.0));
    int violations = 0;
    for (const Curve& c : {make_circle(1), make_ellipse(2, 1), make_kite()}) {
        std::vector<std::vector<double>> v(5);
        for (double lambda : grid) {
            const auto mu = single_layer_spectrum(c, lambda, 128, true).mu;
            for (int n = 0; n < 5; ++n) v[n].push_back(lambda * mu[n]);
        }
        for (int n = 0; n < 5; ++n)
            for (std::size_t i = 1; i < grid.size(); ++i)
                if (!(v[n][i] > v[n][i - 1])) ++violations;
        for (int n = 1; n <= 5; ++n) {
            std::vector<double> near, far;
            for (double l : {-1e-1, -1e-2, -1e-3}) near.push_back(dispersion(c, n, l, 128).value);
            for (double l : {-1.0, -10.0, -100.0}) far.push_back(dispersion(c, n, l, 128).value);
            o.require(near[0] < near[1] && near[1] < near[2] && near[2] < 0, c.name() + " trend toward 0");
            o.require(far[0] > far[1] && far[1] > far[2], c.name() + " trend toward -infinity");
            if (n == 1) o.detail << c.name() << " n=1: " << near[2] << " at -1e-3, " << far[2] << " at -100; ";
        }
    }
    o.detail << "monotonicity violations " << violations;
    o.require(violations == 0, "strictly increasing");
}

// 6. jump relations from extrapolated traces
void jumps(Outcome& o) {
    const QuadratureGrid g(make_circle(1), 256);
    const SpectralParameter sp(-2.0);
    const Eigen::MatrixXcd S = assemble_S(g, sp).entries;
    double worst = 0;
    for (int m : {0, 1, 3}) {
        DensityVector phi(256);
        for (int k = 0; k < 256; ++k) phi[k] = std::polar(1.0, m * g.nodes()[k]);
        const JumpTraces jt = jump_traces(g, phi, sp, default_h_sequence(g.curve()));
        const DensityVector lS = -2.0 * (S * phi);
        const double r1 = l2_norm(g, jt.jump_estimate - phi) / l2_norm(g, phi);
        const double r2 = l2_norm(g, jt.dzbar_sum - lS) / l2_norm(g, lS);
        o.detail << "m=" << m << ": " << r1 << ", " << r2 << "; ";
        worst = std::max({worst, r1, r2});
    }
    o.require(worst <= 1e-4, "relative residual <= 1e-4");
}

// 7. Krein resolvent
void krein(Outcome& o) {
    const Curve c = make_circle(1);
    const double alpha = -1, lambda = -3;
    const VolumeSource src = gaussian_bump(Vec2(0.1, 0.05), 0.1);
    const KreinSolution ks(c, alpha, SpectralParameter(lambda), src, opts(256));
    FieldFunction v = [&](const std::vector<Vec2>& p) { return ks.value(p); };
    FieldFunction d = [&](const std::vector<Vec2>& p) { return ks.dzbar(p); };
    const TransmissionCheck tc = oblique_transmission(ks.grid(), v, d, alpha, default_h_sequence(c));
    const double h = 1e-3;
    double num = 0, den = 0;
    for (double x : {0.0, 0.05, 0.1, 0.15, 0.2})
        for (double y : {0.0, 0.05, 0.1}) {
            const Vec2 p(x, y);
            const Eigen::VectorXcd gv = ks.value({p, p + Vec2(h, 0), p - Vec2(h, 0), p + Vec2(0, h), p - Vec2(0, h)});
            const cdouble lap = (gv[1] + gv[2] + gv[3] + gv[4] - 4.0 * gv[0]) / (h * h);
            num += std::norm(-lap - lambda * gv[0] - src.f(p));
            den += std::norm(src.f(p));
        }
    const double pde = std::sqrt(num / den);
    o.detail << "min singular value " << ks.min_singular_value() << ", transmission " << tc.residual << ", PDE "
             << pde;
    o.require(ks.min_singular_value() > 1e-8, "lambda in the resolvent set");
    o.require(tc.residual <= 1e-3, "transmission <= 1e-3");
    o.require(pde <= 1e-2, "PDE residual <= 1e-2");
}

// 8. non-relativistic limit
void nonrel(Outcome& o) {
    const LimitStudyResult r = limit_study(make_circle(1), cdouble(0, 1), -1, {8, 16, 32, 64, 128}, 128);
    static const char* names[4] = {"a0", "phi", "phistar", "c"};
    for (int k = 0; k < 4; ++k) {
        o.detail << "gap_" << names[k] << " slope " << r.slopes[k] << (r.decreasing[k] ? "" : " (not decreasing)")
                 << "; ";
        o.require(r.decreasing[k], std::string("gap_") + names[k] + " decreasing");
    }
    const double ratio_c = r.gaps.back().cz / r.gaps.front().cz;
    o.detail << "gap_c(128)/gap_c(8) " << ratio_c << "; correction slope " << r.correction_slope
             << ", block-22 slope " << r.correction_22_slope;
    for (int k = 0; k < 3; ++k)
        o.require(r.slopes[k] >= -1.3 && r.slopes[k] <= -0.8, std::string("gap_") + names[k] + " slope in window");
    o.require(ratio_c <= 1.0 / 8, "gap_c ratio <= 1/8");
    // the M3 C M3 kernel difference converges like K/c^2 (a measured -2 slope); the window's lower
    // edge -1.3 excludes this faster rate
    o.require(r.slopes[3] >= -1.3 && r.slopes[3] <= -0.8, "gap_c slope in [-1.3, -0.8] (measured rate is 1/c^2)");
    o.require(r.correction_slope <= -0.8, "correction slope <= -0.8");
}

// 9. delta-shell comparison
void delta(Outcome& o) {
    const SpectrumResult d = delta_spectrum(make_circle(1), -50, 1, opts(256));
    o.require(!d.eigenvalues.empty(), "a delta-shell eigenvalue");
    if (d.eigenvalues.empty()) return;
    const double ratio = d.eigenvalues[0].lambda / (-50.0 * 50 / 4);
    const double l1 = find_eigenvalue(make_circle(1), -0.05, 1, opts(256)).lambda;
    o.detail << "E1 = " << d.eigenvalues[0].lambda << ", E1/(-alpha^2/4) = " << ratio
             << "; oblique alpha=-0.05: lambda1 alpha^2/(-4) = " << l1 * 0.05 * 0.05 / -4;
    o.require(ratio >= 0.9 && ratio <= 1.1, "ratio in [0.9, 1.1]");
}

// 10. special-function invariants on their stated grids
void specfun(Outcome& o) {
    double wr = 0;
    for (double x : {0.5, 1.0, 10.0})
        for (int n = 0; n <= 20; ++n) {
            const BesselIK a = bessel_ik_int(n, x), b = bessel_ik_int(n + 1, x);
            wr = std::max(wr, std::abs((a.i * b.k + b.i * a.k) * x - 1));
        }
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> lr(std::log(1e-6), std::log(700.0)), ar(-1.5, 1.5);
    double conj_err = 0;
    for (int i = 0; i < 100; ++i) {
        const cdouble z = std::polar(std::exp(lr(rng)), ar(rng));
        for (int j : {0, 1})
            conj_err = std::max(conj_err, std::abs(bessel_k(j, std::conj(z)) - std::conj(bessel_k(j, z))) /
                                              std::abs(bessel_k(j, z)));
    }
    static const double w[4] = {4.0 / 5, -1.0 / 5, 4.0 / 105, -1.0 / 280};
    double dk = 0;
    for (double r : {0.05, 0.7, 1.9, 2.0, 3.3, 8.0, 16.5, 17.0, 40.0})
        for (double a : {0.0, 0.6, -1.1}) {
            const cdouble z = std::polar(r, a);
            const cdouble h = 2e-2 * std::min(r, 1.0) * z / r;
            cdouble d = 0;
            for (int k = 1; k <= 4; ++k) d += w[k - 1] * (bessel_k(1, z + double(k) * h) - bessel_k(1, z - double(k) * h));
            d /= h;
            const cdouble id = -bessel_k(0, z) - bessel_k(1, z) / z;
            dk = std::max(dk, std::abs(d - id) / std::abs(id));
        }
    double overlap = 0;
    for (double a : {0.0, 0.5, -0.5, 1.0, -1.0, 1.4})
        for (int j : {0, 1}) {
            for (double r : {1.5, 2.0, 2.5, 3.0}) {
                const cdouble z = std::polar(r, a);
                const cdouble s = bessel_k_eval(j, z, BesselRegime::series).value;
                const cdouble t = bessel_k_eval(j, z, BesselRegime::integral).value;
                overlap = std::max(overlap, std::abs(s - t) / std::abs(t));
            }
            for (double r : {15.0, 17.0, 19.0, 21.0}) {
                const cdouble z = std::polar(r, a);
                const cdouble t = bessel_k_eval(j, z, BesselRegime::integral).value;
                const cdouble s = bessel_k_eval(j, z, BesselRegime::asymptotic).value;
                overlap = std::max(overlap, std::abs(s - t) / std::abs(t));
            }
        }
    double oracle_err = 0;
    for (const auto& e : oracle()["bessel_k"]) {
        const cdouble z(e["z"][0].get<double>(), e["z"][1].get<double>());
        const auto [k0, k1] = bessel_k01(z);
        const cdouble r0(e["k0"][0].get<double>(), e["k0"][1].get<double>());
        const cdouble r1(e["k1"][0].get<double>(), e["k1"][1].get<double>());
        oracle_err = std::max({oracle_err, std::abs(k0 - r0) / std::abs(r0), std::abs(k1 - r1) / std::abs(r1)});
    }
    o.detail << "Wronskian " << wr << ", conjugate symmetry " << conj_err << ", K1' identity " << dk
             << ", overlap " << overlap << ", oracle " << oracle_err;
    o.require(wr <= 1e-10, "Wronskian <= 1e-10");
    o.require(conj_err <= 1e-14, "conjugate symmetry");
    o.require(dk <= 1e-10, "K1' identity <= 1e-10");
    o.require(overlap <= 1e-9, "overlap continuity <= 1e-9");
    o.require(oracle_err <= 1e-10, "oracle <= 1e-10");
}

struct Criterion {
    int id;
    const char* name;
    double time_limit;  // seconds, 0 for none
    std::function<void(Outcome&)> run;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> all = {
        {1, "circle oracle equivalence", 10, circle_oracle},
        {2, "full-pipeline spectrum oracle", 60, spectrum_oracle},
        {3, "no discrete spectrum for alpha > 0", 0, no_bound_states},
        {4, "small-alpha asymptotics", 0, small_alpha},
        {5, "dispersion monotonicity and limits", 0, monotonicity},
        {6, "jump relations", 0, jumps},
        {7, "Krein formula consistency", 0, krein},
        {8, "non-relativistic limit", 300, nonrel},
        {9, "delta-shell comparison", 0, delta},
        {10, "special functions", 5, specfun},
    };
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
    int failures = 0;
    for (const Criterion& c : all) {
        if (!selected.empty() && !selected.count(c.id)) continue;
        Outcome o;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            c.run(o);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << " [exception: " << e.what() << "]";
        }
        const double t = seconds_since(t0);
        if (c.time_limit > 0 && t > c.time_limit) o.require(false, "runtime <= " + std::to_string(int(c.time_limit)) + " s");
        std::printf("CRITERION %d: %s | %s | %.1f s | %s\n", c.id, o.pass ? "PASS" : "FAIL", c.name, t,
                    o.detail.str().c_str());
        std::fflush(stdout);
        if (!o.pass) ++failures;
    }
    std::printf("%d criteria failed\n", failures);
    return failures ? 1 : 0;
}
