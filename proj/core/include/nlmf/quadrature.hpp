#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <vector>

#include "nlmf/kernel.hpp"
#include "nlmf/point_cloud.hpp"

namespace nlmf {

/// Which nonlocal operator the quadrature must integrate exactly.
enum class ReproducingMode {
    DiffusionScalar,    ///< q = p(z) gamma(|z|); the constant C = 2 cancels
    PeridynamicTensor,  ///< q = p(z) gamma(|z|) (z x z / |z|^2)_{ab}, three entries
};

/// One constraint function q(z) = (z1/delta)^ax (z2/delta)^ay
///                              * (z1^cx z2^cy / |z|^{cx+cy}) * gamma(|z|).
/// The monomial is evaluated in z/delta so the constraint rows share a common
/// scale; that leaves the weights unchanged but keeps the Gram matrix well
/// conditioned across orders.
struct BasisTerm {
    int ax = 0, ay = 0;  ///< monomial exponents
    int cx = 0, cy = 0;  ///< tensor-entry exponents: (0,0), (2,0), (1,1) or (0,2)

    int degree() const { return ax + ay; }
};

/// Reproducing function space V_{h,x_i}: polynomials through order n times
/// the kernel (times the unit-bond tensor entries in peridynamic mode),
/// restricted to functions with finite ball integrals.
struct ReproducingSpace {
    int order = 0;
    ReproducingMode mode = ReproducingMode::DiffusionScalar;
    std::vector<BasisTerm> terms;

    int size() const { return static_cast<int>(terms.size()); }
};

/// Monomials are enumerated in graded lexicographic order
/// {1, z1, z2, z1^2, z1 z2, z2^2, ...}; peridynamic mode expands each into
/// the three independent tensor entries. Requires n > d + s - 3.
ReproducingSpace build_basis(int order, const KernelSpec& spec, ReproducingMode mode);

/// Exact ball integrals g_alpha = I[q_alpha] via closed-form polar
/// integration (radial power times an angular trig moment; odd parity gives
/// exactly zero).
Eigen::VectorXd moment_integrals(const ReproducingSpace& space, const KernelSpec& spec);

/// Per-center quadrature weights with their constraint residuals and the
/// Lagrange multipliers recovered from the saddle-point solve.
struct WeightFamily {
    int center = -1;
    Eigen::VectorXd weights;      ///< omega_ij per neighbor, units length^2
    Eigen::VectorXd residuals;    ///< B omega - g per constraint
    Eigen::VectorXd multipliers;  ///< lambda of the eliminated saddle system
    double residual_rel = 0.0;    ///< max |residual| / (1 + max |g|)
};

/// Constraint-satisfaction gate on the relative reproduction residual.
inline constexpr double kWeightResidualTol = 1e-10;

/// Minimal weighted-l2-norm weights subject to exact reproduction of every
/// basis function: omega = W^{-1} B^T (B W^{-1} B^T)^{-1} g with
/// W_jj = 2 gamma(x_i, x_j). Rank-deficient Gram matrices are inverted
/// spectrally, zeroing multiplier components below 1e-12 of the largest
/// eigenvalue; infeasible constraint sets fail the residual gate.
WeightFamily solve_weights(int center, const Neighborhood& nbhd, const PointCloud& cloud,
                           const ReproducingSpace& space, const KernelSpec& spec);

/// One family per Interior point, generated independently (parallel across
/// centers, deterministic). Per-point failures are collected and reported
/// with their point ids.
std::vector<WeightFamily> generate_all_weights(const PointCloud& cloud,
                                               const std::vector<Neighborhood>& nbhds,
                                               const ReproducingSpace& space,
                                               const KernelSpec& spec);

/// Debug dump: per point `center_id M_i residual_max` then `neighbor_id
/// weight` lines.
void dump_weights(const std::vector<WeightFamily>& families,
                  const std::vector<Neighborhood>& nbhds, std::ostream& out);

}  // namespace nlmf
