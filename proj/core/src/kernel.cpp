#include "nlmf/kernel.hpp"

#include <cmath>
#include <numbers>

namespace nlmf {

namespace {

double unit_sphere_area(int d) {
    // |S^{d-1}| = 2 pi^{d/2} / Gamma(d/2)
    return 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
}

}  // namespace

double kernel_scaling_constant(double s, int d) {
    if (d < 1 || d > 3) throw std::invalid_argument("kernel dimension must be 1, 2 or 3");
    if (s < 0.0 || s >= d + 2.0)
        throw std::invalid_argument("singularity order must satisfy 0 <= s < d + 2");
    // int_{B_1} (D0 / r^s) r^2 dz = D0 |S^{d-1}| / (d + 2 - s) = d
    return d * (d + 2.0 - s) / unit_sphere_area(d);
}

KernelSpec KernelSpec::make(double delta, double s, int d) {
    if (!(delta > 0.0)) throw std::invalid_argument("horizon delta must be positive");
    KernelSpec spec;
    spec.delta = delta;
    spec.s = s;
    spec.d = d;
    spec.D0 = kernel_scaling_constant(s, d);
    return spec;
}

KernelSpec KernelSpec::make_custom(double delta, std::function<double(double)> gamma1, int d) {
    if (!(delta > 0.0)) throw std::invalid_argument("horizon delta must be positive");
    if (!gamma1) throw std::invalid_argument("custom kernel requires a gamma_1 profile");
    KernelSpec spec;
    spec.delta = delta;
    spec.s = 0.0;
    spec.d = d;
    spec.D0 = 0.0;
    spec.gamma1 = std::move(gamma1);
    return spec;
}

double kernel_eval(const KernelSpec& spec, double r) {
    if (r > spec.delta * (1.0 + kRadiusInclusionTol)) return 0.0;
    if (!spec.power_law())
        return spec.gamma1(r / spec.delta) / std::pow(spec.delta, spec.d + 2);
    if (r <= 0.0) {
        if (spec.s > 0.0)
            throw std::invalid_argument("singular kernel evaluated at zero separation");
        return spec.D0 / std::pow(spec.delta, spec.d + 2);
    }
    return spec.D0 / (std::pow(spec.delta, spec.d + 2 - spec.s) * std::pow(r, spec.s));
}

TwoPointCoefficient constant_coefficient(double value) {
    if (!(value > 0.0)) throw std::invalid_argument("coefficient must be positive");
    return {[value](const Vec2&, const Vec2&) { return value; }};
}

TwoPointCoefficient harmonic_mean_coefficient(std::function<double(const Vec2&)> local_field) {
    return {[field = std::move(local_field)](const Vec2& a, const Vec2& b) {
        const double fa = field(a);
        const double fb = field(b);
        if (!(fa > 0.0) || !(fb > 0.0))
            throw numerical_error("harmonic mean requires a strictly positive local field");
        return 2.0 / (1.0 / fa + 1.0 / fb);
    }};
}

double bulk_modulus_from_young(double young, double poisson) {
    if (!(young > 0.0)) throw std::invalid_argument("Young's modulus must be positive");
    if (poisson >= 0.5) throw std::invalid_argument("Poisson ratio must be below 0.5");
    return young / (3.0 * (1.0 - 2.0 * poisson));
}

double critical_stretch(double kappa, double fracture_energy, double delta, int d) {
    if (!(kappa > 0.0) || !(fracture_energy > 0.0) || !(delta > 0.0))
        throw std::invalid_argument("critical stretch requires positive kappa, G and delta");
    if (d == 2) return std::sqrt(std::numbers::pi * fracture_energy / (3.0 * kappa * delta));
    if (d == 3) return std::sqrt(5.0 * fracture_energy / (9.0 * kappa * delta));
    throw std::invalid_argument("critical stretch is defined for d = 2 or 3");
}

double critical_stretch(const TwoPointCoefficient& kappa, const FractureEnergyField& G,
                        double delta, const Vec2& xi, const Vec2& xj, int d) {
    return critical_stretch(kappa(xi, xj), G.pair(xi, xj), delta, d);
}

}  // namespace nlmf
