#include "hvlab/core_math.hpp"

#include <algorithm>
#include <cmath>

#include "hvlab/errors.hpp"

namespace hvlab {

Weight Weight::power(double gamma_, double beta_) {
    if (gamma_ < 0) throw ArgumentError("Weight: gamma must be >= 0");
    if (beta_ != 0.0 && beta_ < gamma_) throw ArgumentError("Weight: beta must be >= gamma");
    Weight w;
    w.profile = Profile::PowerOnePlus;
    w.gamma = gamma_;
    w.beta = beta_;
    return w;
}

Weight Weight::tabulated(std::vector<double> s, std::vector<double> rho) {
    if (s.size() < 2 || s.size() != rho.size())
        throw ArgumentError("Weight: tabulated profile needs matching node/value lists");
    if (s.front() != 0.0) throw ArgumentError("Weight: table must start at s = 0");
    if (rho.front() != 1.0) throw ArgumentError("Weight: normalization rho(0) = 1 required");
    for (std::size_t i = 1; i < s.size(); ++i) {
        if (s[i] <= s[i - 1]) throw ArgumentError("Weight: table abscissae must increase");
        if (rho[i] <= 0.0) throw ArgumentError("Weight: table values must be positive");
    }
    Weight w;
    w.profile = Profile::CustomTabulated;
    w.tab_s = std::move(s);
    w.tab_rho = std::move(rho);
    return w;
}

double Weight::eval(double s) const {
    if (s < 0) throw DomainError("Weight: rho is defined for s >= 0");
    if (profile == Profile::PowerOnePlus) return std::pow(1.0 + s, gamma);
    // piecewise linear, extended by the last segment's slope beyond the table
    const auto& xs = tab_s;
    auto it = std::upper_bound(xs.begin(), xs.end(), s);
    std::size_t hi = static_cast<std::size_t>(it - xs.begin());
    if (hi == 0) hi = 1;
    if (hi >= xs.size()) hi = xs.size() - 1;
    const std::size_t lo = hi - 1;
    const double t = (s - xs[lo]) / (xs[hi] - xs[lo]);
    return tab_rho[lo] + t * (tab_rho[hi] - tab_rho[lo]);
}

double Weight::derivative(double s) const {
    if (s < 0) throw DomainError("Weight: rho' is defined for s >= 0");
    if (profile == Profile::PowerOnePlus) {
        if (gamma == 0.0) return 0.0;
        return gamma * std::pow(1.0 + s, gamma - 1.0);
    }
    // one-sided difference on the containing segment
    const auto& xs = tab_s;
    auto it = std::upper_bound(xs.begin(), xs.end(), s);
    std::size_t hi = static_cast<std::size_t>(it - xs.begin());
    if (hi == 0) hi = 1;
    if (hi >= xs.size()) hi = xs.size() - 1;
    const std::size_t lo = hi - 1;
    return (tab_rho[hi] - tab_rho[lo]) / (xs[hi] - xs[lo]);
}

double ProblemParams::two_star() const { return critical_exponents(N).first.value(); }
double ProblemParams::two_lower() const { return critical_exponents(N).second.value(); }

std::pair<Rational, Rational> critical_exponents(int N) {
    if (N < 3) throw DimensionError("critical_exponents: N must be >= 3");
    return {Rational(2 * N, N - 2), Rational(2 * (N - 1), N - 2)};
}

double hardy_constant(double p, double gamma) {
    if (!(p - 1.0 > 0.0) || !(gamma > p - 1.0))
        throw AdmissibilityError("hardy_constant: requires gamma > p-1 > 0");
    return (gamma - p + 1.0) / p;
}

double sphere_surface_measure(int m) {
    if (m < 0) throw ArgumentError("sphere_surface_measure: m must be >= 0");
    // |S^m| = 2 pi^{(m+1)/2} / Gamma((m+1)/2)
    const double half = 0.5 * (m + 1);
    return 2.0 * std::pow(M_PI, half) / std::tgamma(half);
}

double ball_volume(int m) {
    if (m < 1) throw ArgumentError("ball_volume: m must be >= 1");
    const double half = 0.5 * m;
    return std::pow(M_PI, half) / std::tgamma(half + 1.0);
}

double trace_best_constant(int N, SphereConvention convention) {
    if (N < 3) throw DimensionError("trace_best_constant: N must be >= 3");
    const double omega =
        convention == SphereConvention::SphereSurface ? sphere_surface_measure(N - 1) : ball_volume(N);
    return 0.5 * (N - 2) * std::pow(omega, 1.0 / (N - 1));
}

namespace {

double bubble_denominator(const InstantonParams& p, double r, double z) {
    if (p.kind == InstantonParams::Kind::InteriorBubble)
        return p.epsilon * p.epsilon + r * r + (z - 1.0) * (z - 1.0);
    return r * r + (z + p.epsilon) * (z + p.epsilon);
}

} // namespace

double instanton_eval(const InstantonParams& params, int N, double r, double z) {
    if (N < 3) throw DimensionError("instanton_eval: N must be >= 3");
    if (params.epsilon <= 0 || params.amplitude <= 0)
        throw ArgumentError("instanton_eval: epsilon and amplitude must be positive");
    const double s = 0.5 * (N - 2);
    const double d2 = bubble_denominator(params, r, z);
    return params.amplitude * std::pow(params.epsilon, s) * std::pow(d2, -s);
}

std::pair<double, double> instanton_grad(const InstantonParams& params, int N, double r, double z) {
    const double s = 0.5 * (N - 2);
    const double d2 = bubble_denominator(params, r, z);
    const double common = -2.0 * s * params.amplitude * std::pow(params.epsilon, s) *
                          std::pow(d2, -s - 1.0);
    const double zc =
        params.kind == InstantonParams::Kind::InteriorBubble ? z - 1.0 : z + params.epsilon;
    return {common * r, common * zc};
}

double instanton_interior_coefficient(const InstantonParams& params, int N) {
    if (params.kind == InstantonParams::Kind::BoundaryBubble) return 0.0;
    const double two_star = critical_exponents(N).first.value();
    return N * (N - 2) * std::pow(params.amplitude, 2.0 - two_star);
}

double instanton_boundary_coefficient(const InstantonParams& params, int N) {
    const double two_lower = critical_exponents(N).second.value();
    const double lam_pow = std::pow(params.amplitude, 2.0 - two_lower);
    if (params.kind == InstantonParams::Kind::BoundaryBubble) return (N - 2) * lam_pow;
    return -(N - 2) / params.epsilon * lam_pow;
}

InstantonResidual instanton_pde_residual(const InstantonParams& params, int N, double r, double z,
                                         double h) {
    if (h <= 0) throw ArgumentError("instanton_pde_residual: stencil width must be positive");
    if (r < h) throw StencilError("instanton_pde_residual: point too close to the axis");
    auto u = [&](double rr, double zz) { return instanton_eval(params, N, rr, zz); };

    InstantonResidual res;
    const double two_star = critical_exponents(N).first.value();
    const double two_lower = critical_exponents(N).second.value();

    if (z > h) {
        const double urr = (u(r + h, z) - 2.0 * u(r, z) + u(r - h, z)) / (h * h);
        const double ur = (u(r + h, z) - u(r - h, z)) / (2.0 * h);
        const double uzz = (u(r, z + h) - 2.0 * u(r, z) + u(r, z - h)) / (h * h);
        const double lap = urr + (N - 2) / r * ur + uzz;
        const double c_int = instanton_interior_coefficient(params, N);
        res.interior = std::abs(-lap - c_int * std::pow(u(r, z), two_star - 1.0));
    }
    if (z == 0.0) {
        const double duz = (-3.0 * u(r, 0.0) + 4.0 * u(r, h) - u(r, 2.0 * h)) / (2.0 * h);
        const double c_bd = instanton_boundary_coefficient(params, N);
        res.boundary = std::abs(-duz - c_bd * std::pow(u(r, 0.0), two_lower - 1.0));
    }
    return res;
}

double instanton_boundary_residual_analytic(const InstantonParams& params, int N, double r) {
    const double two_lower = critical_exponents(N).second.value();
    const double duz = instanton_grad(params, N, r, 0.0).second;
    const double c_bd = instanton_boundary_coefficient(params, N);
    return std::abs(-duz - c_bd * std::pow(instanton_eval(params, N, r, 0.0), two_lower - 1.0));
}

InstantonParams normalize_instanton_to_constant(const InstantonParams& params, int N,
                                                double target_bd_constant) {
    if (target_bd_constant <= 0)
        throw DomainError("normalize_instanton_to_constant: target must be positive");
    if (params.kind != InstantonParams::Kind::BoundaryBubble)
        throw ArgumentError("normalize_instanton_to_constant: boundary bubble only");
    const double two_lower = critical_exponents(N).second.value();
    InstantonParams out = params;
    out.amplitude = std::pow((N - 2) / target_bd_constant, 1.0 / (two_lower - 2.0));
    return out;
}

Rho1Check check_rho1(const Weight& weight, const std::vector<double>& samples) {
    if (samples.empty()) throw ArgumentError("check_rho1: empty sample set");
    Rho1Check out;
    out.holds = true;
    for (double s : samples) {
        if (s <= 0) throw ArgumentError("check_rho1: samples must be positive");
        const double num = weight.derivative(s) * s;
        if (!(num > 0.0)) out.holds = false;
        const double ratio = num / weight.eval(s);
        if (!std::isfinite(ratio)) {
            out.holds = false;
            continue;
        }
        out.c1_estimate = std::max(out.c1_estimate, ratio);
    }
    return out;
}

} // namespace hvlab
