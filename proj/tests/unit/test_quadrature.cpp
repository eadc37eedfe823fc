#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "../support/oracles.hpp"
#include "nlmf/quadrature.hpp"

using namespace nlmf;
using std::numbers::pi;

namespace {

PointCloud lattice_cloud(double h, double delta) {
    return build_uniform_grid(Rect{0.0, 0.0, 1.0, 1.0}, h, delta);
}

}  // namespace

TEST_CASE("basis enumeration") {
    const KernelSpec s0 = KernelSpec::make(1.0, 0.0);

    SUBCASE("counts") {
        CHECK(build_basis(2, s0, ReproducingMode::DiffusionScalar).size() == 6);
        CHECK(build_basis(3, s0, ReproducingMode::PeridynamicTensor).size() == 30);
        CHECK(build_basis(0, s0, ReproducingMode::DiffusionScalar).size() == 1);
    }
    SUBCASE("graded lexicographic order") {
        const ReproducingSpace sp = build_basis(2, s0, ReproducingMode::DiffusionScalar);
        const int expect[6][2] = {{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}};
        for (int a = 0; a < 6; ++a) {
            CHECK(sp.terms[a].ax == expect[a][0]);
            CHECK(sp.terms[a].ay == expect[a][1]);
        }
    }
    SUBCASE("admissibility bound") {
        const KernelSpec s2 = KernelSpec::make(1.0, 2.0);
        CHECK_THROWS_AS(build_basis(0, s2, ReproducingMode::DiffusionScalar),
                        std::invalid_argument);
        CHECK_THROWS_AS(build_basis(1, s2, ReproducingMode::DiffusionScalar),
                        std::invalid_argument);
        CHECK_NOTHROW(build_basis(2, s2, ReproducingMode::DiffusionScalar));
        CHECK_THROWS_AS(build_basis(-1, s0, ReproducingMode::DiffusionScalar),
                        std::invalid_argument);
    }
}

TEST_CASE("closed-form moments") {
    SUBCASE("constant against the flat kernel") {
        const KernelSpec spec = KernelSpec::make(1.0, 0.0);
        const ReproducingSpace sp = build_basis(0, spec, ReproducingMode::DiffusionScalar);
        const Eigen::VectorXd g = moment_integrals(sp, spec);
        CHECK(g[0] == doctest::Approx(4.0).epsilon(1e-14));  // D0 * pi
    }
    SUBCASE("odd monomials vanish exactly") {
        const KernelSpec spec = KernelSpec::make(0.4375, 1.0);
        for (const auto mode :
             {ReproducingMode::DiffusionScalar, ReproducingMode::PeridynamicTensor}) {
            const ReproducingSpace sp = build_basis(3, spec, mode);
            const Eigen::VectorXd g = moment_integrals(sp, spec);
            for (int a = 0; a < sp.size(); ++a) {
                const BasisTerm& t = sp.terms[a];
                if ((t.ax + t.cx) % 2 == 1 || (t.ay + t.cy) % 2 == 1) CHECK(g[a] == 0.0);
            }
        }
    }
    SUBCASE("tensor-entry moment fixed by the oracle") {
        const KernelSpec spec = KernelSpec::make(1.0, 1.0);
        const ReproducingSpace sp = build_basis(1, spec, ReproducingMode::PeridynamicTensor);
        // first term is the constant monomial against z1^2/|z|^2
        REQUIRE(sp.terms[0].ax == 0);
        REQUIRE(sp.terms[0].cx == 2);
        const Eigen::VectorXd g = moment_integrals(sp, spec);
        CHECK(g[0] == doctest::Approx(3.0).epsilon(1e-12));
        CHECK(g[0] ==
              doctest::Approx(testing::basis_term_integral(sp.terms[0], spec)).epsilon(1e-10));
    }
}

TEST_CASE("moment oracle sweep") {
    // every closed-form ball integral used by the bases matches adaptive
    // polar quadrature
    for (const double s : {0.0, 1.0})
        for (const double delta : {0.4375, 1.0})
            for (const auto mode :
                 {ReproducingMode::DiffusionScalar, ReproducingMode::PeridynamicTensor}) {
                const KernelSpec spec = KernelSpec::make(delta, s);
                const ReproducingSpace sp = build_basis(3, spec, mode);
                const Eigen::VectorXd g = moment_integrals(sp, spec);
                for (int a = 0; a < sp.size(); ++a) {
                    const double ref = testing::basis_term_integral(sp.terms[a], spec);
                    CHECK(std::abs(g[a] - ref) <= 1e-9 * (1.0 + std::abs(ref)));
                }
            }
}

TEST_CASE("weight solve basics") {
    const double h = 0.125;
    const double delta = 3.5 * h;
    const PointCloud cloud = lattice_cloud(h, delta);
    const auto nbhds = build_neighborhoods(cloud, delta);

    SUBCASE("constant-kernel weights sum to the ball area") {
        const KernelSpec spec = KernelSpec::make(delta, 0.0);
        const ReproducingSpace sp = build_basis(2, spec, ReproducingMode::DiffusionScalar);
        const WeightFamily fam = solve_weights(nbhds[40].center, nbhds[40], cloud, sp, spec);
        CHECK(fam.weights.sum() == doctest::Approx(pi * delta * delta).epsilon(1e-10));
        CHECK(fam.residual_rel <= kWeightResidualTol);
    }

    SUBCASE("weights share the lattice 90-degree symmetry") {
        const KernelSpec spec = KernelSpec::make(delta, 1.0);
        const ReproducingSpace sp = build_basis(2, spec, ReproducingMode::DiffusionScalar);
        // pick an interior row whose stencil is a full symmetric ball
        int row = -1;
        for (std::size_t r = 0; r < nbhds.size(); ++r) {
            const Vec2 c = cloud.points[nbhds[r].center];
            if (c.x == 0.5 && c.y == 0.5) row = static_cast<int>(r);
        }
        REQUIRE(row >= 0);
        const WeightFamily fam =
            solve_weights(nbhds[row].center, nbhds[row], cloud, sp, spec);
        const Vec2 center = cloud.points[nbhds[row].center];
        for (int j = 0; j < nbhds[row].size(); ++j) {
            const Vec2 z = cloud.points[nbhds[row].neighbors[j]] - center;
            // rotate by 90 degrees and find the matching neighbor
            const Vec2 zr{-z.y, z.x};
            for (int k = 0; k < nbhds[row].size(); ++k) {
                const Vec2 w = cloud.points[nbhds[row].neighbors[k]] - center;
                if (std::abs(w.x - zr.x) < 1e-12 && std::abs(w.y - zr.y) < 1e-12)
                    CHECK(fam.weights[j] ==
                          doctest::Approx(fam.weights[k]).epsilon(1e-10));
            }
        }
    }

    SUBCASE("underdetermined stencil is rejected with the point id") {
        const KernelSpec spec = KernelSpec::make(delta, 0.0);
        const ReproducingSpace sp = build_basis(2, spec, ReproducingMode::DiffusionScalar);
        Neighborhood tiny;
        tiny.center = nbhds[40].center;
        tiny.neighbors = {nbhds[40].neighbors[0], nbhds[40].neighbors[1],
                          nbhds[40].neighbors[2]};
        CHECK_THROWS_WITH_AS(solve_weights(tiny.center, tiny, cloud, sp, spec),
                             doctest::Contains(std::to_string(tiny.center).c_str()),
                             numerical_error);
    }

    SUBCASE("near-coincident neighbors are degenerate input") {
        const KernelSpec spec = KernelSpec::make(delta, 1.0);
        const ReproducingSpace sp = build_basis(2, spec, ReproducingMode::DiffusionScalar);
        PointCloud bad = cloud;
        const int center = nbhds[40].center;
        const int shadow = nbhds[40].neighbors[0];
        bad.points[shadow] = bad.points[center] + Vec2{1e-16 * delta, 0.0};
        CHECK_THROWS_AS(solve_weights(center, nbhds[40], bad, sp, spec), numerical_error);
    }
}

TEST_CASE("weight solve agrees with the dense KKT oracle") {
    // small stencil, full-rank constraints
    const double h = 0.25;
    const double delta = 1.75 * h;
    const PointCloud cloud = perturb_grid(lattice_cloud(h, delta), {0.3, 17});
    const auto nbhds = build_neighborhoods(cloud, delta);
    const KernelSpec spec = KernelSpec::make(delta, 1.0);
    const ReproducingSpace sp = build_basis(2, spec, ReproducingMode::DiffusionScalar);
    int checked = 0;
    for (const auto& nb : nbhds) {
        if (nb.size() > 12) continue;
        const WeightFamily fam = solve_weights(nb.center, nb, cloud, sp, spec);
        const Eigen::VectorXd ref = testing::dense_kkt_weights(nb.center, nb, cloud, sp, spec);
        for (int j = 0; j < nb.size(); ++j)
            CHECK(std::abs(fam.weights[j] - ref[j]) <= 1e-8 * (1.0 + std::abs(ref[j])));
        ++checked;
    }
    CHECK(checked > 0);
}

TEST_CASE("KKT stationarity of the returned weights") {
    const double h = 1.0 / 12;
    const double delta = 3.5 * h;
    const PointCloud cloud = perturb_grid(lattice_cloud(h, delta), {0.5, 11});
    const auto nbhds = build_neighborhoods(cloud, delta);
    const KernelSpec spec = KernelSpec::make(delta, 1.0);
    const ReproducingSpace sp = build_basis(3, spec, ReproducingMode::PeridynamicTensor);

    for (const std::size_t r : {std::size_t{0}, nbhds.size() / 2, nbhds.size() - 1}) {
        const WeightFamily fam = solve_weights(nbhds[r].center, nbhds[r], cloud, sp, spec);
        // omega must satisfy W omega = B^T lambda for the recovered multipliers
        const Vec2 xi = cloud.points[nbhds[r].center];
        Eigen::MatrixXd basis(sp.size(), nbhds[r].size());
        Eigen::VectorXd wdiag(nbhds[r].size());
        for (int j = 0; j < nbhds[r].size(); ++j) {
            const Vec2 z = cloud.points[nbhds[r].neighbors[j]] - xi;
            const double rr = z.norm();
            const double gamma = kernel_eval(spec, rr);
            wdiag[j] = 2.0 * gamma;
            for (int a = 0; a < sp.size(); ++a) {
                const BasisTerm& t = sp.terms[a];
                basis(a, j) = std::pow(z.x / delta, t.ax) * std::pow(z.y / delta, t.ay) *
                              std::pow(z.x / rr, t.cx) * std::pow(z.y / rr, t.cy) * gamma;
            }
        }
        const Eigen::VectorXd station =
            wdiag.asDiagonal() * fam.weights - basis.transpose() * fam.multipliers;
        const double scale = (wdiag.asDiagonal() * fam.weights).norm();
        CHECK(station.norm() <= 1e-8 * (1.0 + scale));
    }
}

TEST_CASE("family generation") {
    const double h = 0.125;
    const double delta = 3.5 * h;
    const KernelSpec spec = KernelSpec::make(delta, 0.0);
    const ReproducingSpace sp = build_basis(2, spec, ReproducingMode::DiffusionScalar);

    SUBCASE("uniform grid: every family passes the residual gate") {
        const PointCloud cloud = lattice_cloud(h, delta);
        const auto nbhds = build_neighborhoods(cloud, delta);
        const auto families = generate_all_weights(cloud, nbhds, sp, spec);
        CHECK(families.size() == static_cast<std::size_t>(cloud.interior_count()));
        for (const auto& fam : families) CHECK(fam.residual_rel <= kWeightResidualTol);
    }
    SUBCASE("two runs produce bit-identical weights") {
        const PointCloud cloud = perturb_grid(lattice_cloud(h, delta), {0.5, 23});
        const auto nbhds = build_neighborhoods(cloud, delta);
        const auto a = generate_all_weights(cloud, nbhds, sp, spec);
        const auto b = generate_all_weights(cloud, nbhds, sp, spec);
        for (std::size_t r = 0; r < a.size(); ++r)
            for (int j = 0; j < a[r].weights.size(); ++j)
                CHECK(a[r].weights[j] == b[r].weights[j]);
    }
    SUBCASE("perturbed grids keep exactness") {
        const PointCloud cloud = perturb_grid(lattice_cloud(h, delta), {0.5, 77});
        const auto nbhds = build_neighborhoods(cloud, delta);
        const auto families = generate_all_weights(cloud, nbhds, sp, spec);
        for (const auto& fam : families) CHECK(fam.residual_rel <= kWeightResidualTol);
    }
}

TEST_CASE("weights scale as areas") {
    const double h = 0.125;
    const double delta = 3.5 * h;
    const PointCloud cloud = perturb_grid(lattice_cloud(h, delta), {0.2, 5});
    const auto nbhds = build_neighborhoods(cloud, delta);
    const KernelSpec spec = KernelSpec::make(delta, 1.0);
    const ReproducingSpace sp = build_basis(2, spec, ReproducingMode::DiffusionScalar);

    const double t = 3.0;
    PointCloud scaled = cloud;
    for (Vec2& p : scaled.points) p = p * t;
    scaled.h = cloud.h * t;
    scaled.delta = cloud.delta * t;
    scaled.rebuild_index();
    const KernelSpec sspec = KernelSpec::make(t * delta, 1.0);

    const WeightFamily a = solve_weights(nbhds[10].center, nbhds[10], cloud, sp, spec);
    const WeightFamily b = solve_weights(nbhds[10].center, nbhds[10], scaled, sp, sspec);
    for (int j = 0; j < a.weights.size(); ++j)
        CHECK(b.weights[j] == doctest::Approx(t * t * a.weights[j]).epsilon(1e-9));
}

TEST_CASE("weight debug dump format") {
    const double h = 0.25;
    const double delta = 2.0 * h;
    const PointCloud cloud = lattice_cloud(h, delta);
    const auto nbhds = build_neighborhoods(cloud, delta);
    const KernelSpec spec = KernelSpec::make(delta, 0.0);
    const ReproducingSpace sp = build_basis(1, spec, ReproducingMode::DiffusionScalar);
    const auto families = generate_all_weights(cloud, nbhds, sp, spec);

    std::ostringstream out;
    dump_weights(families, nbhds, out);
    std::istringstream in(out.str());
    int center = 0, m = 0;
    double res = 0.0;
    in >> center >> m >> res;
    CHECK(center == nbhds[0].center);
    CHECK(m == nbhds[0].size());
    CHECK(res <= kWeightResidualTol);
}
