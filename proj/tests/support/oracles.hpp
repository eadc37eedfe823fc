#pragma once

#include <Eigen/Dense>
#include <functional>

#include "nlmf/kernel.hpp"
#include "nlmf/point_cloud.hpp"
#include "nlmf/quadrature.hpp"

// Independent reference computations for the test suites. Everything here is
// deliberately built on different numerics than the library paths it checks.
namespace nlmf::testing {

/// Adaptive polar quadrature of f(z) over the ball of radius `radius`:
/// Gauss-Legendre radially, trapezoid angularly, both refined until two
/// consecutive levels agree to rel_tol.
double ball_integral(const std::function<double(const Vec2&)>& f, double radius,
                     double rel_tol = 1e-11);

/// Ball integral of one reproducing basis term (independent oracle for the
/// closed-form moments).
double basis_term_integral(const BasisTerm& term, const KernelSpec& spec,
                           double rel_tol = 1e-11);

/// Nonlocal diffusion action 2 int A gamma (u(y) - u(x)) dy by quadrature.
double diffusion_action(const std::function<double(const Vec2&, const Vec2&)>& A,
                        const std::function<double(const Vec2&)>& u, const KernelSpec& spec,
                        const Vec2& x, double rel_tol = 1e-11);

/// Bond-based peridynamic action c int kappa gamma (z x z/|z|^2)(u(y)-u(x)) dy.
Vec2 peridynamic_action(const std::function<double(const Vec2&, const Vec2&)>& kappa,
                        const std::function<Vec2(const Vec2&)>& u, const KernelSpec& spec,
                        const Vec2& x, double rel_tol = 1e-10);

/// Dense KKT reference for the constrained weight problem: assembles the full
/// saddle matrix [[W, B^T], [B, 0]] and solves it by SVD least squares.
Eigen::VectorXd dense_kkt_weights(int center, const Neighborhood& nbhd, const PointCloud& cloud,
                                  const ReproducingSpace& space, const KernelSpec& spec);

/// Conservative-form Navier action C1 div(E (2 strain + tr(strain) I)) by
/// central finite differences of the flux.
Vec2 navier_action_fd(const std::function<double(const Vec2&)>& young, double poisson,
                      const std::function<Vec2(const Vec2&)>& u, const Vec2& x,
                      double step = 1e-5);

}  // namespace nlmf::testing
