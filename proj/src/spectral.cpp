#include "oblique/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <boost/math/tools/toms748_solve.hpp>
#include <cmath>
#include <map>

#include "oblique/errors.hpp"

namespace oblique {

namespace {

// Memoized eigenvalues of S(lambda) on one curve.
class SpectrumCache {
public:
    SpectrumCache(const Curve& curve, int N, bool auto_resolve)
        : curve_(curve), N_(N), auto_resolve_(auto_resolve) {}

    const SingleLayerSpectrum& at(double lambda) {
        auto it = cache_.find(lambda);
        if (it == cache_.end())
            it = cache_.emplace(lambda, single_layer_spectrum(curve_, lambda, N_, auto_resolve_)).first;
        return it->second;
    }
    double mu(double lambda, int n) {
        const auto& s = at(lambda);
        if (n > int(s.mu.size())) throw ResolutionError("branch index exceeds the discretization rank");
        return s.mu[n - 1];
    }
    int evaluations() const { return int(cache_.size()); }

private:
    const Curve& curve_;
    int N_;
    bool auto_resolve_;
    std::map<double, SingleLayerSpectrum> cache_;
};

void check_options(const SpectralOptions& opt) {
    if (!(opt.tol > 0) || !(opt.tol < 1)) throw ParameterError("root tolerance must lie in (0, 1)");
    if (!(opt.residual_gate > 0)) throw ParameterError("residual gate must be positive");
    if (opt.N < 16 || opt.N % 2) throw ParameterError("N must be even and >= 16");
}

constexpr double kLambdaFloor = -1e12;
constexpr double kLambdaCeiling = -1e-30;

// Root of an increasing function g on (-inf, 0) given one point with g(lo) <= 0 or g(hi) >= 0.
struct Bracket {
    double lo, hi, glo, ghi;
};

template <class G>
double solve_bracket(G&& g, Bracket b, double tol) {
    if (b.glo == 0) return b.lo;
    if (b.ghi == 0) return b.hi;
    auto stop = [tol](double a, double c) { return std::abs(c - a) <= tol * std::min(std::abs(a), std::abs(c)); };
    std::uintmax_t iters = 300;
    auto r = boost::math::tools::toms748_solve(g, b.lo, b.hi, b.glo, b.ghi, stop, iters);
    return 0.5 * (r.first + r.second);
}

// Expands from x (g(x) evaluated) until the root is bracketed.
template <class G>
std::optional<Bracket> expand(G&& g, double x, double gx, double factor_left, double factor_right) {
    Bracket b{x, x, gx, gx};
    if (gx < 0) {
        for (;;) {
            const double y = x / factor_right;
            if (y > kLambdaCeiling) return std::nullopt;
            const double gy = g(y);
            if (gy >= 0) return Bracket{x, y, gx, gy};
            x = y, gx = gy;
        }
    }
    if (gx > 0) {
        for (;;) {
            const double y = x * factor_left;
            if (y < kLambdaFloor)
                throw DivergenceError("bracket expansion passed lambda = -1e12 without a sign change");
            const double gy = g(y);
            if (gy <= 0) return Bracket{y, x, gy, gx};
            x = y, gx = gy;
        }
    }
    return b;
}

void assign_multiplicities(std::vector<SpectrumEntry>& e, double cluster_tol) {
    std::size_t start = 0;
    for (std::size_t i = 1; i <= e.size(); ++i) {
        if (i < e.size() && std::abs(e[i].lambda - e[start].lambda) <= cluster_tol * std::abs(e[start].lambda)) continue;
        for (std::size_t j = start; j < i; ++j) e[j].multiplicity = int(i - start);
        start = i;
    }
}

EigenvalueRoot solve_branch(SpectrumCache& cache, double alpha, int n, const SpectralOptions& opt,
                            std::optional<std::pair<double, double>> bracket, std::optional<double> upper) {
    auto f = [&](double lam) { return lam * cache.mu(lam, n) - 1.0 / alpha; };
    std::optional<Bracket> b;
    if (bracket) {
        auto [lo, hi] = *bracket;
        if (!(lo < hi) || !(hi < 0)) throw ParameterError("bracket must satisfy lo < hi < 0");
        const double flo = f(lo), fhi = f(hi);
        if (flo <= 0 && fhi >= 0) b = Bracket{lo, hi, flo, fhi};
        else b = expand(f, flo > 0 ? lo : hi, flo > 0 ? flo : fhi, 4.0, 4.0);
    } else if (upper) {
        double hi = *upper, fhi = f(hi);
        if (fhi < 0) {
            // the previous branch root is a double root up to rounding
            hi *= 1 - 10 * opt.tol;
            fhi = f(hi);
        }
        b = fhi >= 0 ? expand(f, hi, fhi, 1.5, 4.0) : expand(f, hi, fhi, 4.0, 4.0);
    } else {
        const double seed = -4.0 / (alpha * alpha);
        b = expand(f, seed, f(seed), 4.0, 4.0);
    }
    if (!b) throw DivergenceError("no sign change of the dispersion function below zero");
    EigenvalueRoot r;
    r.bracket_lo = b->lo;
    r.bracket_hi = b->hi;
    r.lambda = solve_bracket(f, *b, opt.tol);
    if (upper) r.lambda = std::min(r.lambda, *upper);
    r.residual = std::abs(alpha * f(r.lambda));
    r.N = cache.at(r.lambda).N;
    r.evaluations = cache.evaluations();
    return r;
}

}  // namespace

SingleLayerSpectrum single_layer_spectrum(const Curve& curve, double lambda, int N, bool auto_resolve) {
    if (!(lambda < 0)) throw DomainError("single layer spectrum requires lambda < 0");
    const int n_eff = auto_resolve ? resolved_node_count(curve, std::sqrt(-lambda), N) : N;
    const QuadratureGrid g(curve, n_eff);
    const Eigen::MatrixXd A = symmetrized(g, assemble_S_real(g, lambda));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (A + A.transpose()), Eigen::EigenvaluesOnly);
    SingleLayerSpectrum s{lambda, n_eff, {}};
    s.mu.assign(es.eigenvalues().data(), es.eigenvalues().data() + n_eff);
    std::reverse(s.mu.begin(), s.mu.end());
    return s;
}

DispersionSample dispersion(const Curve& curve, int n, double lambda, int N, bool auto_resolve) {
    if (!(lambda < 0)) throw DomainError("dispersion requires lambda < 0");
    if (n < 1) throw ParameterError("branch index starts at 1");
    if (n > N / 4) throw ResolutionError("branch " + std::to_string(n) + " needs N >= " + std::to_string(4 * n));
    const auto s = single_layer_spectrum(curve, lambda, N, auto_resolve);
    return {lambda, n, lambda * s.mu[n - 1], s.N};
}

EigenvalueRoot find_eigenvalue(const Curve& curve, double alpha, int n, const SpectralOptions& opt,
                               std::optional<std::pair<double, double>> bracket) {
    check_options(opt);
    if (!(alpha < 0)) throw ParameterError("find_eigenvalue requires alpha < 0");
    if (n < 1 || n > opt.N / 4) throw ResolutionError("branch index out of range for N");
    SpectrumCache cache(curve, opt.N, opt.auto_resolve);
    return solve_branch(cache, alpha, n, opt, bracket, std::nullopt);
}

std::vector<ProbeSample> probe_no_bound_states(const Curve& curve, double alpha, int N, int points, double lo,
                                               double hi) {
    if (!(lo < hi) || !(hi < 0) || points < 2) throw ParameterError("probe grid must lie in lambda < 0");
    std::vector<ProbeSample> out;
    for (int k = 0; k < points; ++k) {
        const double lam = -std::exp(std::log(-lo) + (std::log(-hi) - std::log(-lo)) * k / (points - 1));
        const auto s = single_layer_spectrum(curve, lam, N);
        ProbeSample p{lam, 0, 0};
        const double a = alpha * lam * s.mu.front(), b = alpha * lam * s.mu.back();
        p.max_eigenvalue = std::max(a, b);
        p.spectral_radius = std::max(std::abs(a), std::abs(b));
        out.push_back(p);
    }
    return out;
}

SpectrumResult enumerate_spectrum(const Curve& curve, double alpha, int count, const SpectralOptions& opt) {
    check_options(opt);
    if (alpha == 0 || !std::isfinite(alpha)) throw ParameterError("alpha must be finite and non-zero");
    if (count < 0) throw ParameterError("count must be non-negative");
    if (count > opt.N / 8)
        throw ResolutionError("count " + std::to_string(count) + " exceeds N/8 = " + std::to_string(opt.N / 8));
    SpectrumResult res;
    res.alpha = alpha;
    res.curve = curve.name();
    res.N = opt.N;
    res.tol = opt.tol;
    res.residual_gate = opt.residual_gate;
    res.problem = "oblique";
    if (alpha > 0) {
        res.probes = probe_no_bound_states(curve, alpha, opt.N);
        for (const auto& p : res.probes)
            if (p.max_eigenvalue >= 1)
                throw InconsistencyError("alpha > 0 but alpha lambda S(lambda) has an eigenvalue >= 1");
        return res;
    }
    SpectrumCache cache(curve, opt.N, opt.auto_resolve);
    std::optional<double> upper;
    for (int n = 1; n <= count; ++n) {
        const EigenvalueRoot r = solve_branch(cache, alpha, n, opt, std::nullopt, upper);
        if (r.residual > opt.residual_gate)
            throw NumericalInstabilityError("Birman-Schwinger residual " + std::to_string(r.residual) +
                                            " above gate on branch " + std::to_string(n));
        res.eigenvalues.push_back({n, r.lambda, r.residual, r.N, 1});
        upper = r.lambda;
    }
    assign_multiplicities(res.eigenvalues, opt.cluster_tol);
    return res;
}

SpectrumResult delta_spectrum(const Curve& curve, double alpha, int count, const SpectralOptions& opt) {
    check_options(opt);
    if (alpha == 0 || !std::isfinite(alpha)) throw ParameterError("alpha must be finite and non-zero");
    if (count < 0) throw ParameterError("count must be non-negative");
    if (count > opt.N / 8) throw ResolutionError("count exceeds N/8");
    SpectrumResult res;
    res.alpha = alpha;
    res.curve = curve.name();
    res.N = opt.N;
    res.tol = opt.tol;
    res.residual_gate = opt.residual_gate;
    res.problem = "delta";
    if (alpha > 0) return res;

    SpectrumCache cache(curve, opt.N, opt.auto_resolve);
    std::optional<double> lower;
    for (int n = 1; n <= count; ++n) {
        auto g = [&](double lam) { return cache.mu(lam, n) + 1.0 / alpha; };
        std::optional<Bracket> b;
        if (lower) {
            double lo = *lower, glo = g(lo);
            if (glo > 0) {
                lo *= 1 + 10 * opt.tol;
                glo = g(lo);
            }
            b = glo <= 0 ? expand(g, lo, glo, 4.0, 16.0) : expand(g, lo, glo, 4.0, 4.0);
        } else {
            const double seed = -alpha * alpha / 4 - 1;
            b = expand(g, seed, g(seed), 4.0, 16.0);
        }
        if (!b) {
            for (int m = n; m <= count; ++m) res.empty_branches.push_back(m);
            break;
        }
        double lam = solve_bracket(g, *b, opt.tol);
        if (lower) lam = std::max(lam, *lower);
        const double resid = std::abs(alpha * g(lam));
        res.eigenvalues.push_back({n, lam, resid, cache.at(lam).N, 1});
        lower = lam;
    }
    assign_multiplicities(res.eigenvalues, opt.cluster_tol);
    return res;
}

double circle_oracle_mu(int n, double R, double lambda) {
    if (n < 0) throw ParameterError("Fourier index must be non-negative");
    if (!(R > 0)) throw ParameterError("radius must be positive");
    if (!(lambda < 0)) throw DomainError("oracle requires lambda < 0");
    const auto ik = bessel_ik_int(n, std::sqrt(-lambda) * R);
    return R * ik.i * ik.k;
}

EigenfunctionField eigenfunction(const Curve& curve, double alpha, double lambda_n, int n,
                                 const std::vector<Vec2>& points, const SpectralOptions& opt) {
    check_options(opt);
    if (!(alpha < 0)) throw ParameterError("eigenfunctions exist only for alpha < 0");
    if (!(lambda_n < 0)) throw DomainError("eigenvalue must be negative");
    const int N = opt.auto_resolve ? resolved_node_count(curve, std::sqrt(-lambda_n), opt.N) : opt.N;
    if (n < 1 || n > N / 4) throw ResolutionError("branch index out of range for N");
    const QuadratureGrid g(curve, N);
    const Eigen::MatrixXd A = alpha * lambda_n * symmetrized(g, assemble_S_real(g, lambda_n));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (A + A.transpose()));
    // ascending order: the n-th largest sits at N - n
    int idx = N - n;
    if (std::abs(es.eigenvalues()[idx] - 1) > 10 * opt.residual_gate) {
        Eigen::Index best;
        (es.eigenvalues().array() - 1).abs().minCoeff(&best);
        idx = int(best);
    }
    const double ev = es.eigenvalues()[idx];
    if (std::abs(ev - 1) > 10 * opt.residual_gate)
        throw InconsistencyError("no eigenvalue of alpha lambda S(lambda) within 10 tol of 1 (nearest " +
                                 std::to_string(ev) + ")");
    EigenfunctionField out;
    out.lambda = lambda_n;
    out.bs_eigenvalue = ev;
    out.N = N;
    const Eigen::VectorXd v = es.eigenvectors().col(idx);
    out.density = (v.array() / l2_weights(g).array()).matrix().cast<cdouble>();
    out.density /= l2_norm(g, out.density);
    if (!points.empty()) out.field = eval_Psi(g, out.density, SpectralParameter(lambda_n), points);
    return out;
}

TransmissionCheck oblique_transmission(const QuadratureGrid& g, const FieldFunction& value,
                                       const FieldFunction& dzbar, double alpha, const std::vector<double>& hs) {
    const OneSidedTraces f = one_sided_traces(g, value, hs);
    const OneSidedTraces d = one_sided_traces(g, dzbar, hs);
    const int N = g.size();
    Eigen::VectorXcd A(N), B = alpha * (d.plus + d.minus);
    for (int k = 0; k < N; ++k) {
        const Vec2& nu = g.normals()[k];
        A[k] = cdouble(nu.x(), nu.y()) * (f.plus[k] - f.minus[k]);
    }
    TransmissionCheck t;
    t.jump_norm = l2_norm(g, A);
    t.dzbar_norm = l2_norm(g, B);
    const double scale = std::max(t.jump_norm, t.dzbar_norm);
    t.residual = scale > 0 ? l2_norm(g, A + B) / scale : 0.0;
    t.contraction = std::max(f.contraction, d.contraction);
    return t;
}

TransmissionCheck eigenfunction_transmission(const Curve& curve, const EigenfunctionField& ef, double alpha) {
    const QuadratureGrid g(curve, ef.N);
    const SpectralParameter sp(ef.lambda);
    const cdouble I(0, 1);
    auto value = [&](const std::vector<Vec2>& p) { return eval_Psi(g, ef.density, sp, p).values; };
    auto dzbar = [&](const std::vector<Vec2>& p) -> Eigen::VectorXcd {
        return I * sp.lambda() / 2.0 * eval_SL(g, ef.density, sp, p).values;
    };
    return oblique_transmission(g, value, dzbar, alpha, default_h_sequence(curve));
}

}  // namespace oblique
