#include "nlmf/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>

#include "nlmf/quadrature.hpp"
#include "nlmf/solver.hpp"

namespace nlmf {

double l2_norm(const std::vector<double>& values) {
    if (values.empty()) throw std::invalid_argument("l2 norm of an empty value set");
    double acc = 0.0;
    for (const double v : values) acc += v * v;
    return std::sqrt(acc / static_cast<double>(values.size()));
}

double linf_norm(const std::vector<double>& values) {
    if (values.empty()) throw std::invalid_argument("linf norm of an empty value set");
    double acc = 0.0;
    for (const double v : values) acc = std::max(acc, std::abs(v));
    return acc;
}

ManufacturedCase case_example1() {
    ManufacturedCase c;
    c.name = "nonlocal-diffusion-consistency";
    c.mode = ReproducingMode::DiffusionScalar;
    c.kernel_order = 1.0;
    c.coefficient = {[](const Vec2& a, const Vec2& b) { return 5.0 + a.x + b.x; }};
    c.solution = [](const Vec2& p) {
        return std::pow(p.x, 6) + std::pow(p.y, 6);
    };
    // f = -L_delta[u]; closed form of the ball integral of the degree-6
    // solution against the normalized singular kernel (s = 1), built from the
    // even moments M_k = D0 delta^{k-2} T(k,0) / (k + 1) and verified against
    // a polar-quadrature oracle in the test suite
    c.load = [](const Vec2& p, double delta) {
        const double x = p.x, y = p.y;
        const double d2 = delta * delta;
        const double d4 = d2 * d2;
        const double action =
            (5.0 + 2.0 * x) * (30.0 * (std::pow(x, 4) + std::pow(y, 4)) +
                               13.5 * d2 * (x * x + y * y) + 15.0 / 14.0 * d4) +
            12.0 * std::pow(x, 5) + 18.0 * d2 * std::pow(x, 3) + 45.0 / 14.0 * d4 * x;
        return -action;
    };
    return c;
}

ManufacturedCase case_example2() {
    ManufacturedCase c;
    c.name = "diffusion-local-limit";
    c.mode = ReproducingMode::DiffusionScalar;
    c.kernel_order = 0.0;
    c.coefficient = harmonic_mean_coefficient(
        [](const Vec2& p) { return 2.0 + std::sin(p.x) * std::sin(p.y); });
    c.solution = [](const Vec2& p) { return std::cos(p.x) * std::cos(p.y); };
    c.load = [](const Vec2& p, double) {
        return 4.0 * std::cos(p.x) * std::cos(p.y) +
               4.0 * std::sin(p.x) * std::cos(p.x) * std::sin(p.y) * std::cos(p.y);
    };
    return c;
}

ManufacturedCase case_example3() {
    ManufacturedCase c;
    c.name = "peridynamic-local-limit";
    c.vector_valued = true;
    c.mode = ReproducingMode::PeridynamicTensor;
    c.kernel_order = 1.0;
    constexpr double nu = 0.25;
    constexpr double c1 = 1.0 / (2.0 * (1.0 + nu));
    c.coefficient = harmonic_mean_coefficient([](const Vec2& p) {
        const double young = 2.0 + std::sin(p.x) * std::sin(p.y);
        return bulk_modulus_from_young(young, nu);
    });
    c.solution_vec = [](const Vec2& p) {
        return Vec2{std::sin(p.x) * std::sin(p.y), -std::cos(p.x) * std::cos(p.y)};
    };
    // f = -L[u0] with L the conservative-form Navier action
    // C1 div(E (2 strain + tr(strain) I)), the local limit of the bond
    // operator with the harmonic-mean modulus
    c.load_vec = [](const Vec2& p, double) {
        const double sx = std::sin(p.x), cx = std::cos(p.x);
        const double sy = std::sin(p.y), cy = std::cos(p.y);
        const double ax =
            -12.0 * sx * sy - 6.0 * sx * sx * sy * sy + 4.0 * cx * cx * sy * sy +
            2.0 * sx * sx * cy * cy;
        const double ay = 12.0 * cx * cy + 12.0 * sx * cx * sy * cy;
        return Vec2{-c1 * ax, -c1 * ay};
    };
    return c;
}

std::vector<double> truncation_errors(const NonlocalOperator& op, const PointCloud& cloud,
                                      const std::function<double(const Vec2&)>& exact,
                                      const std::function<double(const Vec2&)>& action) {
    ScalarField u(cloud.size());
    for (int i = 0; i < cloud.size(); ++i) u[i] = exact(cloud.points[i]);
    const ScalarField lu = op.apply(u);
    std::vector<double> err;
    err.reserve(op.rows());
    for (int r = 0; r < op.rows(); ++r) {
        const int i = op.center(r);
        err.push_back(std::abs(action(cloud.points[i]) - lu[i]));
    }
    return err;
}

std::vector<double> truncation_errors(const NonlocalOperator& op, const PointCloud& cloud,
                                      const std::function<Vec2(const Vec2&)>& exact,
                                      const std::function<Vec2(const Vec2&)>& action) {
    VectorField2 u(cloud.size());
    for (int i = 0; i < cloud.size(); ++i) u[i] = exact(cloud.points[i]);
    const VectorField2 lu = op.apply(u);
    std::vector<double> err;
    err.reserve(op.rows());
    for (int r = 0; r < op.rows(); ++r) {
        const int i = op.center(r);
        err.push_back((action(cloud.points[i]) - lu[i]).norm());
    }
    return err;
}

double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("slope fit needs at least two (x, y) pairs");
    const int n = static_cast<int>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw std::invalid_argument("slope fit is degenerate");
    return (n * sxy - sx * sy) / denom;
}

SlopeSet ConvergenceReport::fitted_slopes() const {
    if (rows.size() < 3) throw std::invalid_argument("slope fit needs at least three rows");
    std::vector<double> x;
    x.reserve(rows.size());
    for (const StudyRow& r : rows)
        x.push_back(regime == StudyRegime::Kind::FixedRatio ? r.delta : r.h);
    auto column = [&](double StudyRow::*member) {
        std::vector<double> y;
        y.reserve(rows.size());
        for (const StudyRow& r : rows) y.push_back(r.*member);
        return fit_loglog_slope(x, y);
    };
    SlopeSet s;
    s.l2_sol = column(&StudyRow::l2_sol);
    s.linf_sol = column(&StudyRow::linf_sol);
    s.l2_trunc = column(&StudyRow::l2_trunc);
    s.linf_trunc = column(&StudyRow::linf_trunc);
    return s;
}

std::vector<ResolutionStats> ConvergenceReport::per_resolution(double StudyRow::*column) const {
    std::vector<ResolutionStats> out;
    for (const StudyRow& row : rows) {
        auto it = std::find_if(out.begin(), out.end(),
                               [&](const ResolutionStats& s) { return s.h == row.h; });
        if (it == out.end()) {
            out.push_back({row.h, 0.0, 0.0});
        }
    }
    for (ResolutionStats& s : out) {
        std::vector<double> vals;
        for (const StudyRow& row : rows)
            if (row.h == s.h) vals.push_back(row.*column);
        double mean = 0.0;
        for (const double v : vals) mean += v;
        mean /= static_cast<double>(vals.size());
        s.mean = mean;
        if (vals.size() > 1) {
            double var = 0.0;
            for (const double v : vals) var += (v - mean) * (v - mean);
            var /= static_cast<double>(vals.size() - 1);
            s.stderr_mean = std::sqrt(var / static_cast<double>(vals.size()));
        }
    }
    return out;
}

void ConvergenceReport::write_csv(std::ostream& out) const {
    out.precision(12);
    out << "h,delta,n,seed,l2_sol,linf_sol,l2_trunc,linf_trunc\n";
    for (const StudyRow& r : rows)
        out << r.h << "," << r.delta << "," << r.order << "," << r.seed << "," << r.l2_sol
            << "," << r.linf_sol << "," << r.l2_trunc << "," << r.linf_trunc << "\n";
    const SlopeSet s = fitted_slopes();
    out << "# slope l2_sol=" << s.l2_sol << " linf_sol=" << s.linf_sol
        << " l2_trunc=" << s.l2_trunc << " linf_trunc=" << s.linf_trunc << "\n";
}

StudyRow run_static_case(const ManufacturedCase& mcase, int resolution, double delta, int order,
                         const std::optional<PerturbationSpec>& perturbation,
                         StageTimings* timings) {
    using clock = std::chrono::steady_clock;
    const auto ms_since = [](clock::time_point t0) {
        return std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    };

    const double h = 1.0 / resolution;
    PointCloud cloud = build_uniform_grid(Rect{0.0, 0.0, 1.0, 1.0}, h, delta);
    if (perturbation && perturbation->ratio > 0.0) cloud = perturb_grid(cloud, *perturbation);
    const auto nbhds = build_neighborhoods(cloud, delta);
    const KernelSpec spec = KernelSpec::make(delta, mcase.kernel_order);
    const ReproducingSpace space = build_basis(order, spec, mcase.mode);
    auto t0 = clock::now();
    const auto weights = generate_all_weights(cloud, nbhds, space, spec);
    if (timings) timings->weights_ms = ms_since(t0);

    StudyRow row;
    row.h = h;
    row.delta = delta;
    row.order = order;
    row.seed = perturbation ? static_cast<long>(perturbation->seed) : -1;

    if (!mcase.vector_valued) {
        t0 = clock::now();
        const NonlocalOperator op =
            assemble_diffusion(cloud, nbhds, weights, mcase.coefficient, spec);
        if (timings) timings->assembly_ms = ms_since(t0);
        const auto f = [&](const Vec2& p) { return mcase.load(p, delta); };
        const auto bc = [&](const Vec2& p, double) { return mcase.solution(p); };
        t0 = clock::now();
        const ScalarField u = solve_static(op, cloud, f, bc);
        if (timings) timings->solve_ms = ms_since(t0);
        // solution error over all of chi_h; constrained points carry the
        // boundary data and contribute exact zeros
        std::vector<double> err(cloud.size(), 0.0);
        for (int i = 0; i < cloud.size(); ++i)
            if (cloud.is_interior(i)) err[i] = u[i] - mcase.solution(cloud.points[i]);
        row.l2_sol = l2_norm(err);
        row.linf_sol = linf_norm(err);
        const auto trunc = truncation_errors(op, cloud, mcase.solution,
                                             [&](const Vec2& p) { return -mcase.load(p, delta); });
        row.l2_trunc = l2_norm(trunc);
        row.linf_trunc = linf_norm(trunc);
        return row;
    }

    t0 = clock::now();
    const NonlocalOperator op =
        assemble_peridynamic(cloud, nbhds, weights, mcase.coefficient, spec);
    if (timings) timings->assembly_ms = ms_since(t0);
    const auto f = [&](const Vec2& p) { return mcase.load_vec(p, delta); };
    const auto bc = [&](const Vec2& p, double) { return mcase.solution_vec(p); };
    t0 = clock::now();
    const VectorField2 u = solve_static(op, cloud, f, bc);
    if (timings) timings->solve_ms = ms_since(t0);
    std::vector<double> err(cloud.size(), 0.0);
    for (int i = 0; i < cloud.size(); ++i)
        if (cloud.is_interior(i))
            err[i] = (u[i] - mcase.solution_vec(cloud.points[i])).norm();
    row.l2_sol = l2_norm(err);
    row.linf_sol = linf_norm(err);
    const auto trunc = truncation_errors(
        op, cloud, mcase.solution_vec,
        [&](const Vec2& p) { return -1.0 * mcase.load_vec(p, delta); });
    row.l2_trunc = l2_norm(trunc);
    row.linf_trunc = linf_norm(trunc);
    return row;
}

ConvergenceReport run_convergence_study(const ManufacturedCase& mcase, const StudyRegime& regime,
                                        const std::optional<StudyPerturbation>& perturbation) {
    if (regime.resolutions.size() < 3)
        throw std::invalid_argument("a convergence study needs at least three resolutions");
    for (std::size_t i = 1; i < regime.resolutions.size(); ++i)
        if (regime.resolutions[i] <= regime.resolutions[i - 1])
            throw std::invalid_argument("study resolutions must be strictly increasing");

    ConvergenceReport report;
    report.regime = regime.kind;
    for (const int n_side : regime.resolutions) {
        const double h = 1.0 / n_side;
        const double delta =
            regime.kind == StudyRegime::Kind::FixedRatio ? regime.dh_ratio * h : regime.delta;
        try {
            if (perturbation && perturbation->ratio > 0.0) {
                for (const std::uint64_t seed : perturbation->seeds)
                    report.rows.push_back(run_static_case(
                        mcase, n_side, delta, regime.order,
                        PerturbationSpec{perturbation->ratio, seed}));
            } else {
                report.rows.push_back(run_static_case(mcase, n_side, delta, regime.order));
            }
        } catch (const std::exception& e) {
            throw numerical_error("convergence study failed at resolution N=" +
                                  std::to_string(n_side) + ": " + e.what());
        }
    }
    return report;
}

}  // namespace nlmf
