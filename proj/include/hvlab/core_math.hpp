#pragma once

#include <utility>
#include <vector>

#include "hvlab/rational.hpp"

namespace hvlab {

/// Diffusion weight rho(s), s = distance from the boundary plane.
/// The power family rho(s) = (1+s)^gamma is the workhorse; tabulated weights
/// are piecewise linear in s with one-sided difference derivatives.
struct Weight {
    enum class Profile { PowerOnePlus, CustomTabulated };

    Profile profile = Profile::PowerOnePlus;
    double gamma = 0.0; ///< lower power exponent, >= 0
    double beta = 0.0;  ///< optional upper exponent, >= gamma (0 = unset)

    // CustomTabulated: nodes must start at s=0 with value 1 (rho(0)=1).
    std::vector<double> tab_s;
    std::vector<double> tab_rho;

    static Weight power(double gamma_, double beta_ = 0.0);
    static Weight tabulated(std::vector<double> s, std::vector<double> rho);

    double operator()(double s) const { return eval(s); }
    double eval(double s) const;
    double derivative(double s) const;
    bool is_constant_one() const { return profile == Profile::PowerOnePlus && gamma == 0.0; }
};

struct ProblemParams {
    int N = 3;
    double a = 0.0;
    double b = 0.0;
    double p = 2.0;
    double q = 2.0;

    double two_star() const;  ///< 2N/(N-2)
    double two_lower() const; ///< 2(N-1)/(N-2)
};

struct InstantonParams {
    enum class Kind { InteriorBubble, BoundaryBubble };

    Kind kind = Kind::BoundaryBubble;
    double epsilon = 1.0;
    double amplitude = 1.0;
};

enum class SphereConvention { SphereSurface, BallVolume };

/// (2N/(N-2), 2(N-1)/(N-2)) as exact rationals. Throws DimensionError for N < 3.
std::pair<Rational, Rational> critical_exponents(int N);

/// (gamma - p + 1)/p. Requires gamma > p-1 > 0, else AdmissibilityError.
double hardy_constant(double p, double gamma);

/// Surface measure of the unit sphere S^{m} (an m-dimensional manifold).
double sphere_surface_measure(int m);
/// Volume of the unit ball in R^m.
double ball_volume(int m);

/// (N-2)/2 * omega^{1/(N-1)} with omega = |S^{N-1}| (SphereSurface) or |B^N|
/// (BallVolume). SphereSurface is the calibrated convention; the calibration
/// itself lives in the minimizers module.
double trace_best_constant(int N, SphereConvention convention);

double instanton_eval(const InstantonParams& params, int N, double r, double z);

/// Analytic gradient (d/dr, d/dz) of the bubble.
std::pair<double, double> instanton_grad(const InstantonParams& params, int N, double r, double z);

/// Coefficient c_int in -Lap u = c_int * u^(2*-1): N(N-2)*amplitude^(2-2*)
/// for the interior bubble, 0 for the boundary bubble (harmonic).
double instanton_interior_coefficient(const InstantonParams& params, int N);

/// Signed coefficient c_bd in -du/dz|_{z=0} = c_bd * u^(2_*-1).
/// BoundaryBubble: (N-2)*amplitude^(2-2_*).
/// InteriorBubble: -(N-2)/epsilon * amplitude^(2-2_*), negative because the
/// bubble center sits inside the domain; the value is computed, not assumed.
double instanton_boundary_coefficient(const InstantonParams& params, int N);

struct InstantonResidual {
    double interior = 0.0;
    double boundary = 0.0;
};

/// Finite-difference residuals of the bubble against its PDE at one point.
/// interior: |(-Lap_h u) - c_int u^(2*-1)| with the axisymmetric stencil
///   Lap = d_rr + (N-2)/r d_r + d_zz, width h; requires r >= h (StencilError).
/// boundary: |(-d_h u/dz)|_{z=0} - c_bd u^(2_*-1)| with a one-sided
///   second-order stencil.
InstantonResidual instanton_pde_residual(const InstantonParams& params, int N, double r, double z,
                                         double h);

/// Boundary residual with the analytic z-derivative instead of a stencil.
double instanton_boundary_residual_analytic(const InstantonParams& params, int N, double r);

/// Rescale a boundary bubble so that (N-2)*amplitude^(2-2_*) = target.
InstantonParams normalize_instanton_to_constant(const InstantonParams& params, int N,
                                                double target_bd_constant);

struct Rho1Check {
    bool holds = false;
    double c1_estimate = 0.0;
};

/// Hypothesis (rho_1): 0 < rho'(s) s <= c1 rho(s) on the samples.
Rho1Check check_rho1(const Weight& weight, const std::vector<double>& samples);

} // namespace hvlab
