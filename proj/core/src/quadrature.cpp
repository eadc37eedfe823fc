#include "nlmf/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>

#include "nlmf/parallel.hpp"

namespace nlmf {

namespace {

double double_factorial(int n) {
    double v = 1.0;
    for (int k = n; k > 1; k -= 2) v *= k;
    return v;
}

/// int_0^{2pi} cos^p sin^q dtheta; zero unless both exponents are even.
double trig_moment(int p, int q) {
    if (p % 2 != 0 || q % 2 != 0) return 0.0;
    return 2.0 * std::numbers::pi * double_factorial(p - 1) * double_factorial(q - 1) /
           double_factorial(p + q);
}

double ipow(double base, int e) {
    double v = 1.0;
    for (int k = 0; k < e; ++k) v *= base;
    return v;
}

}  // namespace

ReproducingSpace build_basis(int order, const KernelSpec& spec, ReproducingMode mode) {
    if (order < 0) throw std::invalid_argument("polynomial order must be nonnegative");
    if (!(order > spec.d + spec.s - 3.0))
        throw std::invalid_argument("polynomial order n must exceed d + s - 3 = " +
                                    std::to_string(spec.d + spec.s - 3.0));

    ReproducingSpace space;
    space.order = order;
    space.mode = mode;
    for (int deg = 0; deg <= order; ++deg)
        for (int ax = deg; ax >= 0; --ax) {
            const int ay = deg - ax;
            // finite ball integral needs the radial power deg + 1 - s > -1
            const bool integrable = deg + 2.0 - spec.s > 0.0;
            if (!integrable) continue;
            if (mode == ReproducingMode::DiffusionScalar) {
                space.terms.push_back({ax, ay, 0, 0});
            } else {
                space.terms.push_back({ax, ay, 2, 0});
                space.terms.push_back({ax, ay, 1, 1});
                space.terms.push_back({ax, ay, 0, 2});
            }
        }
    return space;
}

Eigen::VectorXd moment_integrals(const ReproducingSpace& space, const KernelSpec& spec) {
    if (!spec.power_law())
        throw std::invalid_argument(
            "closed-form moment integrals cover only the power-law kernel family");
    Eigen::VectorXd g(space.size());
    for (int a = 0; a < space.size(); ++a) {
        const BasisTerm& t = space.terms[a];
        const int k = t.degree();
        // radial: D0/delta^{d+2-s} * delta^{-k} * delta^{k+2-s}/(k+2-s)
        //       = D0 delta^{-d} / (k + 2 - s)   (monomials taken in z/delta)
        const double radial =
            spec.D0 / std::pow(spec.delta, spec.d) / (k + 2.0 - spec.s);
        g[a] = radial * trig_moment(t.ax + t.cx, t.ay + t.cy);
    }
    return g;
}

WeightFamily solve_weights(int center, const Neighborhood& nbhd, const PointCloud& cloud,
                           const ReproducingSpace& space, const KernelSpec& spec) {
    const int m = nbhd.size();
    const int k = space.size();
    if (m == 0)
        throw numerical_error("point " + std::to_string(center) + ": empty neighborhood");

    const Vec2 xi = cloud.points[center];
    Eigen::MatrixXd basis(k, m);     // B_{alpha,j} = q_alpha(x_j - x_i)
    Eigen::VectorXd inv_w(m);        // W^{-1}, W_jj = 2 gamma(x_i, x_j)
    for (int j = 0; j < m; ++j) {
        const Vec2 z = cloud.points[nbhd.neighbors[j]] - xi;
        const double r = z.norm();
        if (r < 1e-14 * spec.delta)
            throw numerical_error("point " + std::to_string(center) +
                                  ": degenerate (near-coincident) neighbor " +
                                  std::to_string(nbhd.neighbors[j]));
        const double gamma = kernel_eval(spec, r);
        inv_w[j] = 1.0 / (2.0 * gamma);
        const double zx = z.x / spec.delta;
        const double zy = z.y / spec.delta;
        const double cth = z.x / r;
        const double sth = z.y / r;
        for (int a = 0; a < k; ++a) {
            const BasisTerm& t = space.terms[a];
            basis(a, j) = ipow(zx, t.ax) * ipow(zy, t.ay) * ipow(cth, t.cx) * ipow(sth, t.cy) *
                          gamma;
        }
    }
    const Eigen::VectorXd g = moment_integrals(space, spec);

    // Gram matrix of the eliminated saddle system
    const Eigen::MatrixXd gram = basis * inv_w.asDiagonal() * basis.transpose();
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
    if (eig.info() != Eigen::Success)
        throw numerical_error("point " + std::to_string(center) + ": Gram eigensolve failed");
    const double emax = eig.eigenvalues().cwiseAbs().maxCoeff();
    if (!(emax > 0.0) || !std::isfinite(emax))
        throw numerical_error("point " + std::to_string(center) + ": singular Gram matrix");

    // truncated spectral inverse: redundant constraint directions get zero
    // multipliers, giving the minimal-norm consistent solution
    Eigen::VectorXd inv_eig(k);
    for (int a = 0; a < k; ++a)
        inv_eig[a] = eig.eigenvalues()[a] > 1e-12 * emax ? 1.0 / eig.eigenvalues()[a] : 0.0;

    WeightFamily fam;
    fam.center = center;
    fam.multipliers = eig.eigenvectors() *
                      (inv_eig.asDiagonal() * (eig.eigenvectors().transpose() * g));
    fam.weights = inv_w.asDiagonal() * (basis.transpose() * fam.multipliers);
    fam.residuals = basis * fam.weights - g;
    fam.residual_rel =
        fam.residuals.cwiseAbs().maxCoeff() / (1.0 + g.cwiseAbs().maxCoeff());
    if (!(fam.residual_rel <= kWeightResidualTol))
        throw numerical_error(
            "point " + std::to_string(center) + ": reproduction residual " +
            std::to_string(fam.residual_rel) + " exceeds tolerance (" + std::to_string(m) +
            " neighbors for " + std::to_string(k) + " constraints; neighborhood too small?)");
    return fam;
}

std::vector<WeightFamily> generate_all_weights(const PointCloud& cloud,
                                               const std::vector<Neighborhood>& nbhds,
                                               const ReproducingSpace& space,
                                               const KernelSpec& spec) {
    const int n = static_cast<int>(nbhds.size());
    std::vector<WeightFamily> families(n);
    std::vector<std::string> failures;
    std::mutex failure_mutex;

    parallel_for(n, [&](int row) {
        try {
            families[row] = solve_weights(nbhds[row].center, nbhds[row], cloud, space, spec);
        } catch (const std::exception& e) {
            std::scoped_lock lock(failure_mutex);
            failures.emplace_back(e.what());
        }
    });

    if (!failures.empty()) {
        std::sort(failures.begin(), failures.end());
        std::ostringstream msg;
        msg << "weight generation failed for " << failures.size() << " point(s):";
        const std::size_t shown = std::min<std::size_t>(failures.size(), 5);
        for (std::size_t i = 0; i < shown; ++i) msg << "\n  " << failures[i];
        if (failures.size() > shown) msg << "\n  ...";
        throw numerical_error(msg.str());
    }
    return families;
}

void dump_weights(const std::vector<WeightFamily>& families,
                  const std::vector<Neighborhood>& nbhds, std::ostream& out) {
    out.precision(17);
    for (std::size_t row = 0; row < families.size(); ++row) {
        const WeightFamily& fam = families[row];
        const Neighborhood& nb = nbhds[row];
        out << fam.center << " " << nb.size() << " " << fam.residual_rel << "\n";
        for (int j = 0; j < nb.size(); ++j)
            out << nb.neighbors[j] << " " << fam.weights[j] << "\n";
    }
}

}  // namespace nlmf
