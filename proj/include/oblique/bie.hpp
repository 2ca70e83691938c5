#pragma once

#include <Eigen/Dense>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

#include "oblique/geometry.hpp"
#include "oblique/kernels.hpp"

namespace oblique {

using DensityVector = Eigen::VectorXcd;

// Quadrature for the logarithmic singularity of K0 on the curve.
//  kress: Martensen-Kussmaul splitting K0 = -ln(z/2) I0(z) + smooth with exact log weights.
//  zeta: trapezoid with zeta-function end corrections applied to the same I0 factor;
//        stays stable when |kappa| * diameter is large and I0 grows exponentially.
//  automatic: kress while |kappa| * diameter <= kKressLimit, zeta otherwise.
enum class LogQuadrature { automatic, kress, zeta };

inline constexpr double kKressLimit = 5.0;
// Largest |kappa| * h * max|p'| for which the zeta-corrected rule is accepted.
inline constexpr double kZetaMaxStep = 1.5;
// Target |kappa| * h * max|p'| used when the node count is chosen automatically.
inline constexpr double kZetaTargetStep = 1.0;

LogQuadrature resolve_rule(const Curve& curve, cdouble kappa, LogQuadrature rule);
// Smallest node count (multiple of 16, at least N) that resolves kappa on the curve.
int resolved_node_count(const Curve& curve, cdouble kappa, int N);

struct BoundaryOperatorMatrix {
    enum class Kind { S, M3CM3 };

    Eigen::MatrixXcd entries;
    std::shared_ptr<const QuadratureGrid> grid;
    SpectralParameter lambda;
    std::optional<DiracParameter> dirac;
    Kind kind = Kind::S;
    LogQuadrature rule = LogQuadrature::kress;
};

BoundaryOperatorMatrix assemble_S(const QuadratureGrid& grid, const SpectralParameter& sp,
                                  LogQuadrature rule = LogQuadrature::automatic);
// Real-arithmetic single layer for lambda < 0.
Eigen::MatrixXd assemble_S_real(const QuadratureGrid& grid, double lambda,
                                LogQuadrature rule = LogQuadrature::automatic);
// 2N x 2N matrix of M3 C M3 at energy offset + c^2/2; component-major ordering.
BoundaryOperatorMatrix assemble_M3CM3(const QuadratureGrid& grid, const DiracParameter& dp,
                                      LogQuadrature rule = LogQuadrature::automatic);

// sqrt(w |p'|) per node, the L2(Sigma) symmetrization weights.
Eigen::VectorXd l2_weights(const QuadratureGrid& grid);
// D^{1/2} A D^{-1/2} for an N x N (or block 2N x 2N) Nystrom matrix.
Eigen::MatrixXcd symmetrized(const QuadratureGrid& grid, const Eigen::MatrixXcd& A);
Eigen::MatrixXd symmetrized(const QuadratureGrid& grid, const Eigen::MatrixXd& A);
// Largest singular value of the weighted matrix, i.e. the L2(Sigma) operator norm.
double operator_norm(const QuadratureGrid& grid, const Eigen::MatrixXcd& A);
double relative_asymmetry(const Eigen::MatrixXd& A);

void write_matrix_csv(std::ostream& out, const Eigen::MatrixXcd& A);
Eigen::MatrixXcd read_matrix_csv(std::istream& in);

struct FieldSamples {
    std::vector<Vec2> points;
    Eigen::VectorXcd values;
};

FieldSamples eval_SL(const QuadratureGrid& grid, const DensityVector& density,
                     const SpectralParameter& sp, const std::vector<Vec2>& points);
FieldSamples eval_Psi(const QuadratureGrid& grid, const DensityVector& density,
                      const SpectralParameter& sp, const std::vector<Vec2>& points);

// Boundary-to-point matrix P with (P phi)_i = int k(x_i - y) phi(y) dsigma(y),
// including near-field refinement. `kernel` receives x - y.
using ScalarKernel = std::function<cdouble(const Vec2&)>;
Eigen::MatrixXcd boundary_to_points(const QuadratureGrid& grid, const std::vector<Vec2>& points,
                                    const ScalarKernel& kernel);
// Same for `count` kernels evaluated together; kernel writes count values to out.
using MultiKernel = std::function<void(const Vec2&, cdouble* out)>;
std::vector<Eigen::MatrixXcd> boundary_to_points(const QuadratureGrid& grid, const std::vector<Vec2>& points,
                                                 int count, const MultiKernel& kernel);

// Evaluator for fields defined off Sigma.
using FieldFunction = std::function<Eigen::VectorXcd(const std::vector<Vec2>&)>;

struct OneSidedTraces {
    Eigen::VectorXcd plus, minus;  // plus: inside (x - h nu), minus: outside (x + h nu)
    // ||v(h2) - v(h3)|| / ||v(h1) - v(h2)|| over both sides; about h3/h2 for smooth limits.
    double contraction = 0;
};

// Limits of field at nodes x_k -/+ h nu_k as h -> 0 by polynomial extrapolation in h.
// h_sequence holds absolute offsets, strictly decreasing.
OneSidedTraces one_sided_traces(const QuadratureGrid& grid, const FieldFunction& field,
                                const std::vector<double>& h_sequence, int order = 2);

std::vector<double> default_h_sequence(const Curve& curve);

struct JumpTraces {
    DensityVector jump_estimate;  // i(nu1 + i nu2)(trace+ - trace-)
    DensityVector dzbar_sum;      // -i(dbar trace+ + dbar trace-)
    double contraction = 0;
};

JumpTraces jump_traces(const QuadratureGrid& grid, const DensityVector& density,
                       const SpectralParameter& sp, const std::vector<double>& h_sequence,
                       int order = 2);

// L2(Sigma) norm of node values.
double l2_norm(const QuadratureGrid& grid, const Eigen::VectorXcd& v);

// Cell-centred tensor grid on [c - w, c + w]^2 with n cells per side.
struct VolumeGrid {
    Vec2 center;
    double half_width = 0;
    int n = 0;
    double h = 0;
    double weight = 0;
    std::vector<Vec2> points;
};

VolumeGrid make_volume_grid(const Vec2& center, double half_width, int n);
// Keeps only points at distance >= min_distance from the curve.
VolumeGrid exclude_near_curve(const VolumeGrid& vg, const Curve& curve, double min_distance);

// (Psi*_lambda f)(y_k) = sum_x w conj(L_lambda(x - y_k)) f(x).
DensityVector apply_Psi_star(const QuadratureGrid& grid, const SpectralParameter& sp,
                             const VolumeGrid& vg, const Eigen::VectorXcd& samples);

}  // namespace oblique
