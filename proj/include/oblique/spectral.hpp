#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "oblique/bie.hpp"

namespace oblique {

struct SpectralOptions {
    int N = 256;
    double tol = 1e-9;          // relative root tolerance on lambda
    double residual_gate = 1e-6;  // accepted |alpha lambda mu_n - 1|
    double cluster_tol = 1e-6;  // relative distance for multiplicity clustering
    // Raise N when lambda needs more nodes than requested.
    bool auto_resolve = true;
};

// Eigenvalues of S(lambda), lambda < 0, sorted non-increasingly.
struct SingleLayerSpectrum {
    double lambda = 0;
    int N = 0;
    std::vector<double> mu;
};
SingleLayerSpectrum single_layer_spectrum(const Curve& curve, double lambda, int N, bool auto_resolve = true);

struct DispersionSample {
    double lambda = 0;
    int n = 0;
    double value = 0;  // lambda * mu_n(S(lambda))
    int N = 0;
};

DispersionSample dispersion(const Curve& curve, int n, double lambda, int N = 256, bool auto_resolve = true);

struct EigenvalueRoot {
    double lambda = 0;
    double residual = 0;
    int N = 0;
    int evaluations = 0;
    double bracket_lo = 0, bracket_hi = 0;
};

// Root of lambda mu_n(S(lambda)) = 1/alpha for alpha < 0. An optional bracket
// [lo, hi] with lo < hi < 0 replaces the default seeding.
EigenvalueRoot find_eigenvalue(const Curve& curve, double alpha, int n, const SpectralOptions& opt = {},
                               std::optional<std::pair<double, double>> bracket = std::nullopt);

struct SpectrumEntry {
    int n = 0;
    double lambda = 0;
    double residual = 0;
    int N = 0;
    int multiplicity = 1;
};

struct ProbeSample {
    double lambda = 0;
    double max_eigenvalue = 0;   // largest eigenvalue of alpha lambda S(lambda)
    double spectral_radius = 0;  // largest modulus
};

struct SpectrumResult {
    double alpha = 0;
    std::string curve;
    int N = 0;
    double tol = 0;
    double residual_gate = 0;
    std::string problem;  // "oblique" or "delta"
    std::vector<SpectrumEntry> eigenvalues;
    std::vector<ProbeSample> probes;
    std::vector<int> empty_branches;
};

SpectrumResult enumerate_spectrum(const Curve& curve, double alpha, int count, const SpectralOptions& opt = {});

// Probe grid for alpha > 0: count points log-spaced in [lo, hi] (both negative).
std::vector<ProbeSample> probe_no_bound_states(const Curve& curve, double alpha, int N, int points = 20,
                                               double lo = -100.0, double hi = -1e-2);

// Roots of alpha mu_n(S(lambda)) = -1; branches without a root are listed as empty.
SpectrumResult delta_spectrum(const Curve& curve, double alpha, int count, const SpectralOptions& opt = {});

// R I_n(kR) K_n(kR), k = sqrt(-lambda).
double circle_oracle_mu(int n, double R, double lambda);

struct EigenfunctionField {
    double lambda = 0;
    double bs_eigenvalue = 0;  // eigenvalue of alpha lambda S(lambda) nearest 1
    int N = 0;
    DensityVector density;     // unit L2(Sigma) norm
    FieldSamples field;        // Psi_lambda phi
};

EigenfunctionField eigenfunction(const Curve& curve, double alpha, double lambda_n, int n,
                                 const std::vector<Vec2>& points, const SpectralOptions& opt = {});

struct TransmissionCheck {
    double residual = 0;   // relative L2(Sigma) residual of the oblique condition
    double jump_norm = 0;  // ||(nu1 + i nu2)(f+ - f-)||
    double dzbar_norm = 0; // ||alpha (dbar f+ + dbar f-)||
    double contraction = 0;
};

// (nu1 + i nu2)(f+ - f-) + alpha (dbar f+ + dbar f-) from extrapolated traces.
TransmissionCheck oblique_transmission(const QuadratureGrid& grid, const FieldFunction& value,
                                       const FieldFunction& dzbar, double alpha,
                                       const std::vector<double>& h_sequence);

TransmissionCheck eigenfunction_transmission(const Curve& curve, const EigenfunctionField& ef, double alpha);

// Smooth source for the resolvent; `radius` bounds the support numerically and
// `scale` is the length on which f varies.
struct VolumeSource {
    std::function<cdouble(const Vec2&)> f;
    Vec2 center;
    double radius = 0;
    double scale = 0;
};

VolumeSource gaussian_bump(const Vec2& center, double sigma);

// (-Delta - lambda)^{-1} f and its dbar at the given points by polar quadrature.
Eigen::VectorXcd free_resolvent(const SpectralParameter& sp, const VolumeSource& src, const std::vector<Vec2>& points);
Eigen::VectorXcd free_resolvent_dzbar(const SpectralParameter& sp, const VolumeSource& src,
                                      const std::vector<Vec2>& points);

class KreinSolution {
public:
    KreinSolution(const Curve& curve, double alpha, const SpectralParameter& sp, VolumeSource src,
                  const SpectralOptions& opt = {});

    Eigen::VectorXcd value(const std::vector<Vec2>& points) const;
    Eigen::VectorXcd dzbar(const std::vector<Vec2>& points) const;
    Eigen::VectorXcd free_part(const std::vector<Vec2>& points) const;

    const DensityVector& density() const { return phi_; }
    double min_singular_value() const { return smin_; }
    const QuadratureGrid& grid() const { return grid_; }
    double alpha() const { return alpha_; }

private:
    QuadratureGrid grid_;
    double alpha_;
    SpectralParameter sp_;
    VolumeSource src_;
    DensityVector phi_;
    double smin_ = 0;
};

// g = (-Delta - lambda)^{-1} f + alpha Psi_lambda (I - alpha lambda S)^{-1} Psi*_{conj lambda} f at points.
FieldSamples krein_apply(const Curve& curve, double alpha, const SpectralParameter& sp, const VolumeSource& src,
                         const std::vector<Vec2>& points, const SpectralOptions& opt = {});

}  // namespace oblique
