#pragma once

#include <array>
#include <string>
#include <vector>

#include "oblique/bie.hpp"

namespace oblique {

// Volume probe grid for boundary-to-volume operators. half_width = 0 means
// three curve diameters around the centroid of the boundary nodes.
struct VolumeBox {
    double half_width = 0;
    double spacing = 0.1;
};

// Left-hand sides of the four non-relativistic estimates at one c.
struct GapTuple {
    double c = 0;
    double a0 = 0;       // Schur bound of (A0 - (lambda + c^2/2))^{-1} - (-Delta - lambda)^{-1} M1
    double phi = 0;      // || c Phi M3 - Psi M2 ||
    double phistar = 0;  // || c M3 Phi*_{conj} - M2^T Psi*_{conj} ||
    double cz = 0;       // || c^2 M3 C M3 - lambda S(lambda) M3 ||
    double m1m3_block = 0;  // max |(U M1) M3| over the radial samples, exactly zero
    int volume_points = 0;
};

GapTuple limit_gaps(const Curve& curve, cdouble lambda, double c, int N, const VolumeBox& box = {});

// Schur integral of |G_{lambda+c^2/2}(z) - U_lambda(z) M1| over [-W, W]^2.
double schur_gap_a0(cdouble lambda, double c, double half_width);

using BlockNorms = std::array<std::array<double, 2>, 2>;

// Resolvent corrections between volume probe grids. Dirac:
// c Phi M3 (I - alpha c^2 M3 C M3)^{-1} alpha c M3 Phi*; reference:
// Psi M2 (I - alpha lambda S M3)^{-1} alpha M2^T Psi*. Norms in L2 of the probe box.
struct DiracResolventBlocks {
    double c = 0;
    double alpha = 0;
    cdouble lambda;
    int N = 0;
    BlockNorms dirac{};
    BlockNorms reference{};
    BlockNorms difference{};
    double dirac_norm = 0;
    double reference_norm = 0;
    double difference_norm = 0;
    double min_singular_value = 0;  // of I - alpha c^2 M3 C M3 on the M3 range
};

DiracResolventBlocks dirac_correction(const Curve& curve, double alpha, cdouble lambda, double c, int N,
                                      const VolumeBox& box = {});

struct SqrtShiftBounds {
    cdouble lambda;
    double c = 0;
    double min_abs_ratio = 0;  // min_t |sqrt(lambda + t lambda^2/c^2)| / |sqrt(lambda)|
    double max_abs_ratio = 0;
    double min_im_ratio = 0;   // min_t Im sqrt(lambda + t lambda^2/c^2) / Im sqrt(lambda)
    bool holds = false;
    double threshold_c = 0;    // smallest c from which the bounds hold
};

SqrtShiftBounds sqrt_shift_bounds(cdouble lambda, double c, int samples = 201);

struct LimitStudyResult {
    std::string curve;
    cdouble lambda;
    double alpha = 0;
    int N = 0;
    std::vector<double> c_values;
    std::vector<GapTuple> gaps;
    std::vector<DiracResolventBlocks> corrections;
    std::array<double, 4> slopes{};      // a0, phi, phistar, cz
    std::array<double, 4> constants{};   // max_c gap * c
    std::array<bool, 4> decreasing{};
    double correction_slope = 0;
    double correction_22_slope = 0;
    double sqrt_threshold_c = 0;
};

LimitStudyResult limit_study(const Curve& curve, cdouble lambda, double alpha, const std::vector<double>& c_values,
                             int N, const VolumeBox& box = {});

// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

// || (I - a M3 C)^{-1} M3 - M3 (I - a M3 C M3)^{-1} || / || M3 (I - a M3 C M3)^{-1} ||
// for a 2n x 2n matrix C, M3 = diag(0, I_n).
double compression_identity_residual(const Eigen::MatrixXcd& C, cdouble a);

}  // namespace oblique
