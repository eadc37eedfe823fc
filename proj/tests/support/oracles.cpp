#include "oracles.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "nlmf/operators.hpp"

namespace nlmf::testing {

namespace {

// nodes/weights for Gauss-Legendre on [0, 1] via Newton iteration on P_n
void gauss_legendre01(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.resize(n);
    weights.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const double dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        const double dp = n * (x * p1 - p0) / (x * x - 1.0);
        nodes[i] = 0.5 * (x + 1.0);
        weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
}

double polar_level(const std::function<double(const Vec2&)>& f, double radius, int nr, int nt) {
    std::vector<double> rn, rw;
    gauss_legendre01(nr, rn, rw);
    double acc = 0.0;
    const double dt = 2.0 * std::numbers::pi / nt;
    for (int i = 0; i < nr; ++i) {
        const double r = rn[i] * radius;
        double ring = 0.0;
        for (int j = 0; j < nt; ++j) {
            const double th = (j + 0.5) * dt;
            ring += f({r * std::cos(th), r * std::sin(th)});
        }
        acc += ring * dt * r * rw[i] * radius;
    }
    return acc;
}

}  // namespace

double ball_integral(const std::function<double(const Vec2&)>& f, double radius,
                     double rel_tol) {
    double prev = polar_level(f, radius, 8, 32);
    for (int level = 1; level <= 7; ++level) {
        const int nr = 8 << level;
        const int nt = 32 << level;
        const double next = polar_level(f, radius, nr, nt);
        if (std::abs(next - prev) <= rel_tol * (1.0 + std::abs(next))) return next;
        prev = next;
    }
    return prev;
}

double basis_term_integral(const BasisTerm& term, const KernelSpec& spec, double rel_tol) {
    const auto f = [&](const Vec2& z) {
        const double r = z.norm();
        if (r == 0.0) return 0.0;
        const double ct = z.x / r;
        const double st = z.y / r;
        double v = kernel_eval(spec, r);
        for (int k = 0; k < term.ax; ++k) v *= z.x / spec.delta;
        for (int k = 0; k < term.ay; ++k) v *= z.y / spec.delta;
        for (int k = 0; k < term.cx; ++k) v *= ct;
        for (int k = 0; k < term.cy; ++k) v *= st;
        return v;
    };
    return ball_integral(f, spec.delta, rel_tol);
}

double diffusion_action(const std::function<double(const Vec2&, const Vec2&)>& A,
                        const std::function<double(const Vec2&)>& u, const KernelSpec& spec,
                        const Vec2& x, double rel_tol) {
    const double ux = u(x);
    const auto f = [&](const Vec2& z) {
        const double r = z.norm();
        if (r == 0.0) return 0.0;
        const Vec2 y = x + z;
        return 2.0 * A(x, y) * kernel_eval(spec, r) * (u(y) - ux);
    };
    return ball_integral(f, spec.delta, rel_tol);
}

Vec2 peridynamic_action(const std::function<double(const Vec2&, const Vec2&)>& kappa,
                        const std::function<Vec2(const Vec2&)>& u, const KernelSpec& spec,
                        const Vec2& x, double rel_tol) {
    const Vec2 ux = u(x);
    const auto fx = [&](const Vec2& z) {
        const double r = z.norm();
        if (r == 0.0) return 0.0;
        const Vec2 y = x + z;
        const Vec2 du = u(y) - ux;
        const double proj = (z.x * du.x + z.y * du.y) / (r * r);
        return kBondConstant2d * kappa(x, y) * kernel_eval(spec, r) * proj * z.x;
    };
    const auto fy = [&](const Vec2& z) {
        const double r = z.norm();
        if (r == 0.0) return 0.0;
        const Vec2 y = x + z;
        const Vec2 du = u(y) - ux;
        const double proj = (z.x * du.x + z.y * du.y) / (r * r);
        return kBondConstant2d * kappa(x, y) * kernel_eval(spec, r) * proj * z.y;
    };
    return {ball_integral(fx, spec.delta, rel_tol), ball_integral(fy, spec.delta, rel_tol)};
}

Eigen::VectorXd dense_kkt_weights(int center, const Neighborhood& nbhd, const PointCloud& cloud,
                                  const ReproducingSpace& space, const KernelSpec& spec) {
    const int m = nbhd.size();
    const int k = space.size();
    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(m + k, m + k);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m + k);
    const Vec2 xi = cloud.points[center];
    for (int j = 0; j < m; ++j) {
        const Vec2 z = cloud.points[nbhd.neighbors[j]] - xi;
        const double r = z.norm();
        const double gamma = kernel_eval(spec, r);
        kkt(j, j) = 2.0 * gamma;
        const double ct = z.x / r;
        const double st = z.y / r;
        for (int a = 0; a < k; ++a) {
            const BasisTerm& t = space.terms[a];
            double q = gamma;
            for (int e = 0; e < t.ax; ++e) q *= z.x / spec.delta;
            for (int e = 0; e < t.ay; ++e) q *= z.y / spec.delta;
            for (int e = 0; e < t.cx; ++e) q *= ct;
            for (int e = 0; e < t.cy; ++e) q *= st;
            kkt(j, m + a) = q;
            kkt(m + a, j) = q;
        }
    }
    const Eigen::VectorXd g = moment_integrals(space, spec);
    rhs.segment(m, k) = g;
    const Eigen::VectorXd sol =
        kkt.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(rhs);
    return sol.head(m);
}

Vec2 navier_action_fd(const std::function<double(const Vec2&)>& young, double poisson,
                      const std::function<Vec2(const Vec2&)>& u, const Vec2& x, double step) {
    const double c1 = 1.0 / (2.0 * (1.0 + poisson));
    // flux(x) = E(x) (2 strain + tr(strain) I), strain by central differences
    const auto flux = [&](const Vec2& p) {
        const double hs = step;
        const Vec2 dux = (u({p.x + hs, p.y}) - u({p.x - hs, p.y})) * (0.5 / hs);
        const Vec2 duy = (u({p.x, p.y + hs}) - u({p.x, p.y - hs})) * (0.5 / hs);
        const double exx = dux.x;
        const double eyy = duy.y;
        const double exy = 0.5 * (duy.x + dux.y);
        const double tr = exx + eyy;
        const double e = young(p);
        return std::array<double, 4>{e * (2.0 * exx + tr), e * 2.0 * exy, e * 2.0 * exy,
                                     e * (2.0 * eyy + tr)};
    };
    const double hs = step;
    const auto fxp = flux({x.x + hs, x.y});
    const auto fxm = flux({x.x - hs, x.y});
    const auto fyp = flux({x.x, x.y + hs});
    const auto fym = flux({x.x, x.y - hs});
    return {c1 * ((fxp[0] - fxm[0]) * (0.5 / hs) + (fyp[1] - fym[1]) * (0.5 / hs)),
            c1 * ((fxp[2] - fxm[2]) * (0.5 / hs) + (fyp[3] - fym[3]) * (0.5 / hs))};
}

}  // namespace nlmf::testing
