#include <array>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include "oblique/bie.hpp"
#include "oblique/errors.hpp"
#include "oblique/parallel.hpp"

namespace oblique {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double euler_gamma = 0.57721566490153286061;
constexpr int kZetaHalfWidth = 8;

// zeta(3), zeta(5), ..., zeta(17)
constexpr std::array<long double, 8> zeta_odd = {
    1.2020569031595942853997L, 1.0369277551433699263314L, 1.0083492773819228268398L,
    1.0020083928260822144179L, 1.0004941886041194645588L, 1.0001227133475784891468L,
    1.0000305882363070204935L, 1.0000076371976378997623L};

// Fornberg weights on integer nodes -m..m: w[k][j] approximates f^(k)(0).
std::vector<std::vector<long double>> fd_weights(int m, int max_order) {
    const int n = 2 * m + 1;
    std::vector<long double> x(n);
    for (int j = 0; j < n; ++j) x[j] = j - m;
    std::vector<std::vector<long double>> C(n, std::vector<long double>(max_order + 1, 0.0L));
    long double c1 = 1, c4 = x[0];
    C[0][0] = 1;
    for (int i = 1; i < n; ++i) {
        const int mn = std::min(i, max_order);
        long double c2 = 1, c5 = c4;
        c4 = x[i];
        for (int j = 0; j < i; ++j) {
            const long double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    C[i][k] = c1 * (k * C[i - 1][k - 1] - c5 * C[i - 1][k]) / c2;
                C[i][0] = -c1 * c5 * C[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k) C[j][k] = (c4 * C[j][k] - k * C[j][k - 1]) / c3;
            C[j][0] = c4 * C[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<std::vector<long double>> w(max_order + 1, std::vector<long double>(n));
    for (int k = 0; k <= max_order; ++k)
        for (int j = 0; j < n; ++j) w[k][j] = C[j][k];
    return w;
}

// Correction weights c_l, l = 0..m, for int ln|x| f(x) dx with the punctured trapezoid.
const std::vector<double>& zeta_weights(int m) {
    static const auto table = [] {
        std::array<std::vector<double>, kZetaHalfWidth + 1> t;
        for (int mm = 1; mm <= kZetaHalfWidth; ++mm) {
            const auto w = fd_weights(mm, 2 * mm);
            std::vector<long double> c(mm + 1, 0.0L);
            long double scale = 1;
            for (int k = 1; k <= mm; ++k) {
                scale /= 4.0L * pi * pi;
                const long double coef = (k % 2 ? -1.0L : 1.0L) * zeta_odd[k - 1] * scale;
                for (int l = 0; l <= mm; ++l) c[l] += coef * w[2 * k][mm + l];
            }
            t[mm].assign(c.begin(), c.end());
        }
        return t;
    }();
    return table[m];
}

template <class T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

template <class T>
Mat<T> single_layer(const QuadratureGrid& g, T kappa, LogQuadrature rule) {
    const int N = g.size();
    const double h = g.weight();
    const auto& p = g.points();
    const auto& jac = g.jacobians();
    const double inv2pi = 0.5 / pi;

    std::vector<double> kress_R, kress_log;
    int m = 0;
    if (rule == LogQuadrature::kress) {
        kress_R.resize(N);
        kress_log.resize(N);
        for (int d = 0; d < N; ++d) {
            const double t = 2 * pi * d / N;
            double s = 0;
            for (int k = 1; k < N / 2; ++k) s += std::cos(k * t) / k;
            kress_R[d] = -4 * pi / N * s - 4 * pi / (double(N) * N) * (d % 2 ? -1.0 : 1.0);
            if (d > 0) kress_log[d] = std::log(4 * std::pow(std::sin(t / 2), 2));
        }
    } else {
        m = std::min(kZetaHalfWidth, N / 2 - 1);
    }
    const std::vector<double>* cz = m ? &zeta_weights(m) : nullptr;
    const T log_half_kappa = std::log(kappa / 2.0);

    Mat<T> B(N, N);
    parallel_for(N, [&](int i) {
        for (int j = i; j < N; ++j) {
            T v;
            if (i == j) {
                const T smooth = inv2pi * (-log_half_kappa - euler_gamma - std::log(jac[i]));
                if (rule == LogQuadrature::kress) {
                    v = kress_R[0] * (-0.5 * inv2pi) + h * smooth;
                } else {
                    v = h * (smooth - inv2pi * std::log(h / (2 * pi))) - h * (*cz)[0] * inv2pi;
                }
            } else {
                const int d = j - i;
                const T z = kappa * (p[i] - p[j]).norm();
                const T k0 = bessel_k01(z).first;
                if (rule == LogQuadrature::kress) {
                    const T m1 = -0.5 * inv2pi * bessel_i0(z);
                    v = kress_R[d] * m1 + h * (inv2pi * k0 - m1 * kress_log[d]);
                } else {
                    v = h * inv2pi * k0;
                    const int l = std::min(d, N - d);
                    if (l <= m) v -= h * (*cz)[l] * inv2pi * bessel_i0(z);
                }
            }
            B(i, j) = v;
        }
    });
    for (int j = 0; j < N; ++j)
        for (int i = j + 1; i < N; ++i) B(i, j) = B(j, i);
    for (int j = 0; j < N; ++j) B.col(j) *= jac[j];
    return B;
}

void check_resolution(const QuadratureGrid& g, cdouble kappa, LogQuadrature rule) {
    if (rule != LogQuadrature::zeta) return;
    const double step = std::abs(kappa) * g.weight() * g.curve().max_speed();
    if (step > kZetaMaxStep)
        throw ResolutionError("N = " + std::to_string(g.size()) + " under-resolves |kappa| = " +
                              std::to_string(std::abs(kappa)) + "; need N >= " +
                              std::to_string(resolved_node_count(g.curve(), kappa, g.size())));
}

}  // namespace

LogQuadrature resolve_rule(const Curve& curve, cdouble kappa, LogQuadrature rule) {
    if (rule != LogQuadrature::automatic) return rule;
    return std::abs(kappa) * curve.diameter() <= kKressLimit ? LogQuadrature::kress : LogQuadrature::zeta;
}

int resolved_node_count(const Curve& curve, cdouble kappa, int N) {
    const double need = 2 * pi * std::abs(kappa) * curve.max_speed() / kZetaTargetStep;
    int n = std::max(N, int(std::ceil(need / 16.0)) * 16);
    if (n % 2) ++n;
    return n;
}

BoundaryOperatorMatrix assemble_S(const QuadratureGrid& grid, const SpectralParameter& sp,
                                  LogQuadrature rule) {
    const cdouble kappa = sp.kappa();
    rule = resolve_rule(grid.curve(), kappa, rule);
    check_resolution(grid, kappa, rule);
    BoundaryOperatorMatrix out{Eigen::MatrixXcd(), std::make_shared<const QuadratureGrid>(grid), sp,
                               std::nullopt, BoundaryOperatorMatrix::Kind::S, rule};
    if (sp.is_negative_real())
        out.entries = single_layer<double>(grid, kappa.real(), rule).cast<cdouble>();
    else
        out.entries = single_layer<cdouble>(grid, kappa, rule);
    return out;
}

Eigen::MatrixXd assemble_S_real(const QuadratureGrid& grid, double lambda, LogQuadrature rule) {
    if (!(lambda < 0)) throw DomainError("real single layer requires lambda < 0");
    const double kappa = std::sqrt(-lambda);
    rule = resolve_rule(grid.curve(), kappa, rule);
    check_resolution(grid, kappa, rule);
    return single_layer<double>(grid, kappa, rule);
}

BoundaryOperatorMatrix assemble_M3CM3(const QuadratureGrid& grid, const DiracParameter& dp,
                                      LogQuadrature rule) {
    const cdouble kappa = cdouble(0, -1) * dp.root();
    rule = resolve_rule(grid.curve(), kappa, rule);
    check_resolution(grid, kappa, rule);
    const int N = grid.size();
    BoundaryOperatorMatrix out{Eigen::MatrixXcd::Zero(2 * N, 2 * N),
                               std::make_shared<const QuadratureGrid>(grid), dp.relativistic(), dp,
                               BoundaryOperatorMatrix::Kind::M3CM3, rule};
    const double c = dp.c();
    out.entries.bottomRightCorner(N, N) = dp.offset() / (c * c) * single_layer<cdouble>(grid, kappa, rule);
    return out;
}

Eigen::VectorXd l2_weights(const QuadratureGrid& grid) {
    Eigen::VectorXd w(grid.size());
    for (int k = 0; k < grid.size(); ++k) w[k] = std::sqrt(grid.weight() * grid.jacobians()[k]);
    return w;
}

namespace {
template <class M>
M symmetrize_impl(const QuadratureGrid& grid, const M& A) {
    const Eigen::VectorXd w = l2_weights(grid);
    const int N = grid.size();
    const int blocks = int(A.rows() / N);
    if (A.rows() != A.cols() || A.rows() != blocks * N || blocks < 1)
        throw ParameterError("matrix size does not match the quadrature grid");
    Eigen::VectorXd W(A.rows());
    for (int b = 0; b < blocks; ++b) W.segment(b * N, N) = w;
    return W.asDiagonal() * A * W.cwiseInverse().asDiagonal();
}
}  // namespace

Eigen::MatrixXcd symmetrized(const QuadratureGrid& grid, const Eigen::MatrixXcd& A) {
    return symmetrize_impl(grid, A);
}

Eigen::MatrixXd symmetrized(const QuadratureGrid& grid, const Eigen::MatrixXd& A) {
    return symmetrize_impl(grid, A);
}

double operator_norm(const QuadratureGrid& grid, const Eigen::MatrixXcd& A) {
    const Eigen::MatrixXcd B = symmetrized(grid, A);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(B);
    return svd.singularValues()(0);
}

double relative_asymmetry(const Eigen::MatrixXd& A) {
    return (A - A.transpose()).norm() / A.norm();
}

void write_matrix_csv(std::ostream& out, const Eigen::MatrixXcd& A) {
    char buf[64];
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        for (Eigen::Index j = 0; j < A.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g", A(i, j).real(), A(i, j).imag());
            if (j) out << ',';
            out << buf;
        }
        out << '\n';
    }
}

Eigen::MatrixXcd read_matrix_csv(std::istream& in) {
    std::vector<std::vector<cdouble>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> vals;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
        if (vals.size() % 2) throw ConfigurationError("matrix CSV row has an odd number of fields");
        std::vector<cdouble> row;
        for (std::size_t k = 0; k < vals.size(); k += 2) row.emplace_back(vals[k], vals[k + 1]);
        if (!rows.empty() && row.size() != rows.front().size())
            throw ConfigurationError("matrix CSV rows differ in length");
        rows.push_back(std::move(row));
    }
    Eigen::MatrixXcd A(rows.size(), rows.empty() ? 0 : rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j) A(i, j) = rows[i][j];
    return A;
}

}  // namespace oblique
