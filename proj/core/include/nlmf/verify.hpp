#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nlmf/operators.hpp"

namespace nlmf {

/// Root-mean-square over the given per-point values (the l2 norm of the
/// figures); empty input is an error.
double l2_norm(const std::vector<double>& values);
double linf_norm(const std::vector<double>& values);

/// Manufactured verification case: coefficient field, exact solution,
/// consistent load and the continuous-operator action on the exact solution
/// (equal to -f by construction). Loads may depend on the horizon.
struct ManufacturedCase {
    std::string name;
    bool vector_valued = false;
    ReproducingMode mode = ReproducingMode::DiffusionScalar;
    double kernel_order = 0.0;  ///< singularity s used by this case

    TwoPointCoefficient coefficient;  ///< A (diffusion) or kappa (peridynamics)

    std::function<double(const Vec2&)> solution;
    std::function<double(const Vec2&, double)> load;  ///< f(x; delta)

    std::function<Vec2(const Vec2&)> solution_vec;
    std::function<Vec2(const Vec2&, double)> load_vec;
};

/// Nonlocal-consistency diffusion case on [0,1]^2: two-point coefficient
/// 5 + x1 + y1 and exact solution x^6 + y^6. The load is the closed-form
/// negative nonlocal action of the solution (horizon dependent), verified
/// against a ball-quadrature oracle in the test suite.
ManufacturedCase case_example1();

/// Asymptotically compatible diffusion case: local coefficient
/// 2 + sin x sin y (harmonic two-point mean), exact local solution
/// cos x cos y.
ManufacturedCase case_example2();

/// Asymptotically compatible bond-based peridynamics case: Young's modulus
/// 2 + sin x sin y with nu = 0.25, exact local solution
/// (sin x sin y, -cos x cos y). The load is the negative conservative-form
/// Navier action, verified against independent oracles in the test suite.
ManufacturedCase case_example3();

/// Per-interior-point truncation errors |L[u](x_i) - (L_h u)_i| for a scalar
/// exact field and its continuous action.
std::vector<double> truncation_errors(const NonlocalOperator& op, const PointCloud& cloud,
                                      const std::function<double(const Vec2&)>& exact,
                                      const std::function<double(const Vec2&)>& action);
/// Vector variant; errors are Euclidean magnitudes per point.
std::vector<double> truncation_errors(const NonlocalOperator& op, const PointCloud& cloud,
                                      const std::function<Vec2(const Vec2&)>& exact,
                                      const std::function<Vec2(const Vec2&)>& action);

struct StudyRegime {
    enum class Kind { FixedRatio, FixedDelta };
    Kind kind = Kind::FixedRatio;
    double dh_ratio = 3.5;   ///< FixedRatio: delta = ratio * h
    double delta = 0.4375;   ///< FixedDelta: horizon held fixed
    std::vector<int> resolutions;  ///< N per side; h = 1/N on the unit square
    int order = 2;
};

struct StudyPerturbation {
    double ratio = 0.0;
    std::vector<std::uint64_t> seeds;
};

struct StudyRow {
    double h = 0.0;
    double delta = 0.0;
    int order = 0;
    long seed = -1;  ///< -1 for unperturbed runs
    double l2_sol = 0.0, linf_sol = 0.0;
    double l2_trunc = 0.0, linf_trunc = 0.0;
};

struct SlopeSet {
    double l2_sol = 0.0, linf_sol = 0.0, l2_trunc = 0.0, linf_trunc = 0.0;
};

struct ResolutionStats {
    double h = 0.0;
    double mean = 0.0;
    double stderr_mean = 0.0;  ///< sample std / sqrt(#seeds); 0 for single runs
};

struct ConvergenceReport {
    std::vector<StudyRow> rows;
    StudyRegime::Kind regime = StudyRegime::Kind::FixedRatio;

    /// Unweighted least-squares slope on (log x, log error) over all rows,
    /// where x is delta for fixed-ratio studies and h for fixed-delta ones.
    SlopeSet fitted_slopes() const;
    /// Mean and standard error per resolution of one error column.
    std::vector<ResolutionStats> per_resolution(double StudyRow::*column) const;

    /// CSV: header `h,delta,n,seed,l2_sol,linf_sol,l2_trunc,linf_trunc`,
    /// rows, then `# slope ...` footer comment lines.
    void write_csv(std::ostream& out) const;
};

/// Least-squares slope of log(y) against log(x).
double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Runs the case over every resolution (and seed, when perturbed): build the
/// cloud, generate weights, assemble, solve, and record solution and
/// truncation error norms over the interior points.
ConvergenceReport run_convergence_study(const ManufacturedCase& mcase, const StudyRegime& regime,
                                        const std::optional<StudyPerturbation>& perturbation = {});

/// Wall-clock per pipeline stage, for run manifests.
struct StageTimings {
    double weights_ms = 0.0;
    double assembly_ms = 0.0;
    double solve_ms = 0.0;
};

/// Single-resolution run used by both the study and the CLI scenarios.
StudyRow run_static_case(const ManufacturedCase& mcase, int resolution, double delta, int order,
                         const std::optional<PerturbationSpec>& perturbation = {},
                         StageTimings* timings = nullptr);

}  // namespace nlmf
