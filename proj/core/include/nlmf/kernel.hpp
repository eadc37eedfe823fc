#pragma once

#include <functional>

#include "nlmf/geometry.hpp"

namespace nlmf {

/// Radial power-law kernel gamma_delta(r) = D0 / (delta^{d+2-s} r^s),
/// supported on the horizon ball and normalized so that the second moment
/// over the unit ball equals the spatial dimension d.
///
/// A custom unit-ball profile gamma_1 can be installed for other kernel
/// families; it is evaluated as gamma_1(r/delta) / delta^{d+2}. Closed-form
/// moment integrals exist only for the power-law family, so custom kernels
/// are restricted to direct operator evaluation.
struct KernelSpec {
    double delta = 1.0;  ///< horizon
    double s = 0.0;      ///< singularity order, 0 <= s < d + 2
    int d = 2;           ///< spatial dimension
    double D0 = 0.0;     ///< moment-normalization constant

    std::function<double(double)> gamma1;  ///< optional non-power-law profile

    bool power_law() const { return !gamma1; }

    static KernelSpec make(double delta, double s, int d = 2);
    static KernelSpec make_custom(double delta, std::function<double(double)> gamma1,
                                  int d = 2);
};

/// D0 such that the second moment of gamma_1 over the unit ball equals d.
/// For d = 2 this is (4 - s) / pi.
double kernel_scaling_constant(double s, int d);

/// Kernel value at separation r; zero outside the horizon. Evaluation at
/// r = 0 is an error for s > 0.
double kernel_eval(const KernelSpec& spec, double r);
inline double kernel_eval(const KernelSpec& spec, const Vec2& xi, const Vec2& xj) {
    return kernel_eval(spec, (xj - xi).norm());
}

/// Symmetric positive two-point material coefficient (diffusivity A or bulk
/// modulus kappa).
struct TwoPointCoefficient {
    std::function<double(const Vec2&, const Vec2&)> eval;

    double operator()(const Vec2& a, const Vec2& b) const { return eval(a, b); }
    explicit operator bool() const { return static_cast<bool>(eval); }
};

TwoPointCoefficient constant_coefficient(double value);

/// A(x, y) = 2 (1/a(x) + 1/a(y))^{-1}; the local field must be strictly
/// positive wherever evaluated.
TwoPointCoefficient harmonic_mean_coefficient(std::function<double(const Vec2&)> local_field);

/// Pointwise fracture energy with the pairwise arithmetic mean.
struct FractureEnergyField {
    std::function<double(const Vec2&)> pointwise;

    double pair(const Vec2& a, const Vec2& b) const {
        return 0.5 * (pointwise(a) + pointwise(b));
    }
};

/// kappa = E / (3 (1 - 2 nu)); bond-based models fix nu = 0.25 in 2D and
/// nu = 1/3 in 3D.
double bulk_modulus_from_young(double young, double poisson);

/// Critical bond stretch: sqrt(pi G / (3 kappa delta)) in 2D,
/// sqrt(5 G / (9 kappa delta)) in 3D.
double critical_stretch(double kappa, double fracture_energy, double delta, int d = 2);
double critical_stretch(const TwoPointCoefficient& kappa, const FractureEnergyField& G,
                        double delta, const Vec2& xi, const Vec2& xj, int d = 2);

}  // namespace nlmf
