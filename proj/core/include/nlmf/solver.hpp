#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <functional>
#include <iosfwd>
#include <memory>

#include "nlmf/operators.hpp"

namespace nlmf {

/// Post-solve residual gate |A u - b|_inf <= tol (1 + |b|_inf).
inline constexpr double kSolveResidualTol = 1e-8;

using ScalarBC = std::function<double(const Vec2&, double)>;   ///< (x, t)
using VectorBC = std::function<Vec2(const Vec2&, double)>;     ///< (x, t)

/// Linear system contract: interior rows carry
///   mass_scaling * u_i - (L u)_i = rhs_i,
/// constrained rows (DirichletLayer / FreeLayer) are replaced by identity
/// rows with the prescribed value. mass_scaling is rho/dt (diffusion),
/// rho/dt^2 (peridynamics) or 0 (static).
struct ConstrainedSystem {
    const NonlocalOperator* op = nullptr;
    double mass_scaling = 0.0;
};

/// Assemble the sparse matrix of a constrained system (row replacement keeps
/// point indexing stable across fracture re-masking).
Eigen::SparseMatrix<double> assemble_matrix(const ConstrainedSystem& system,
                                            const PointCloud& cloud);

/// Static scalar solve: -(L u)_i = f(x_i) on interior rows, u = u_D on the
/// constraint layer. Constrained entries of the returned field equal the
/// prescribed values bitwise.
ScalarField solve_static(const NonlocalOperator& op, const PointCloud& cloud,
                         const std::function<double(const Vec2&)>& f, const ScalarBC& u_D);

/// Static vector solve of the peridynamic system.
VectorField2 solve_static(const NonlocalOperator& op, const PointCloud& cloud,
                          const std::function<Vec2(const Vec2&)>& f, const VectorBC& u_D);

template <typename Field>
struct TimeIntegratorState {
    double t = 0.0;
    int step = 0;
    Field u_curr;
    Field u_prev;  ///< unused for diffusion; second-order inertia for PD
};

/// Backward-Euler integrator for the dynamic diffusion problem
///   (rho/dt) u^{m+1} - (L u)^{m+1} = f(., t^{m+1}) + (rho/dt) u^m.
/// The factorization is computed once and reused across steps.
class DiffusionIntegrator {
public:
    DiffusionIntegrator(const NonlocalOperator& op, const PointCloud& cloud, double dt,
                        double rho);

    TimeIntegratorState<ScalarField> step(const TimeIntegratorState<ScalarField>& state,
                                          const std::function<double(const Vec2&, double)>& f,
                                          const ScalarBC& u_D);

private:
    const NonlocalOperator& op_;
    const PointCloud& cloud_;
    double dt_;
    double rho_;
    Eigen::SparseMatrix<double> matrix_;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_;
};

/// Backward-Euler integrator for dynamic (bond-based) peridynamics,
///   (rho/dt^2) u^{m+1} - (L_theta u)^{m+1}
///       = f(., t^{m+1}) + (rho/dt^2)(2 u^m - u^{m-1}),
/// with the bond states of the previous step (semi-implicit coupling). The
/// factorization is reused until the mask changes.
class PeridynamicIntegrator {
public:
    PeridynamicIntegrator(NonlocalOperator op, const PointCloud& cloud, double dt, double rho);

    /// Install the lagged bond states for subsequent steps.
    void set_bond_mask(const BondMask& theta);
    const NonlocalOperator& op() const { return op_; }

    TimeIntegratorState<VectorField2> step(const TimeIntegratorState<VectorField2>& state,
                                           const std::function<Vec2(const Vec2&, double)>& f,
                                           const VectorBC& u_D);

private:
    void refactor();

    NonlocalOperator op_;
    const PointCloud& cloud_;
    double dt_;
    double rho_;
    bool dirty_ = true;
    Eigen::SparseMatrix<double> matrix_;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_;
};

/// Rayleigh wave speed from E, nu, rho via the shear speed and the standard
/// (0.862 + 1.14 nu)/(1 + nu) approximation.
double rayleigh_speed(double young, double poisson, double density);

/// Diagnostic CFL number C_R dt / h; reported, never enforced.
double cfl_number(double rayleigh, double dt, double h);

/// Text snapshots `step t id x y u [v] [damage]`, one block per call.
class SnapshotWriter {
public:
    explicit SnapshotWriter(std::ostream& out) : out_(out) {}

    void write(int step, double t, const PointCloud& cloud, const ScalarField& u);
    void write(int step, double t, const PointCloud& cloud, const VectorField2& u,
               const std::vector<double>* damage_by_point = nullptr);

private:
    std::ostream& out_;
};

}  // namespace nlmf
