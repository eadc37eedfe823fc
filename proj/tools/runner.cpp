#include <Eigen/Core>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "cli_config.hpp"
#include "nlmf/fracture.hpp"
#include "nlmf/solver.hpp"
#include "nlmf/verify.hpp"

namespace nlmf::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;
using clock_type = std::chrono::steady_clock;

namespace {

double ms_since(clock_type::time_point t0) {
    return std::chrono::duration<double, std::milli>(clock_type::now() - t0).count();
}

json config_json(const RunConfig& cfg) {
    json j;
    j["scenario"] = scenario_name(cfg.scenario);
    j["N"] = cfg.n_side;
    j["dhratio"] = cfg.dh_ratio;
    j["poly_order"] = cfg.order;
    j["case"] = cfg.case_index;
    j["dt"] = cfg.dt;
    j["steps"] = cfg.steps;
    j["perturbation"] = cfg.perturbation;
    j["seed"] = cfg.seed;
    j["output_dir"] = cfg.output_dir;
    if (cfg.scenario == Scenario::ConvergenceStudy) {
        j["regime"] = cfg.regime;
        j["delta"] = cfg.delta;
        j["resolutions"] = cfg.resolutions;
        j["study_seeds"] = cfg.seeds;
    }
    std::ostringstream cmd;
    for (const std::string& a : render(cfg)) cmd << a << " ";
    j["command_line"] = cmd.str();
    return j;
}

void write_manifest(const RunConfig& cfg, const StageTimings& timings, double total_ms,
                    int exit_status, const std::string& error) {
    json j;
    j["config"] = config_json(cfg);
    j["versions"]["nlmf"] = "0.1.0";
    j["versions"]["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." +
                             std::to_string(EIGEN_MAJOR_VERSION) + "." +
                             std::to_string(EIGEN_MINOR_VERSION);
    j["timings_ms"]["weights"] = timings.weights_ms;
    j["timings_ms"]["assembly"] = timings.assembly_ms;
    j["timings_ms"]["solve"] = timings.solve_ms;
    j["timings_ms"]["total"] = total_ms;
    j["exit_status"] = exit_status;
    if (!error.empty()) j["error"] = error;

    std::ofstream out(fs::path(cfg.output_dir) / "manifest.json");
    out << j.dump(2) << "\n";
}

ManufacturedCase select_case(int index) {
    switch (index) {
        case 0: return case_example1();
        case 1: return case_example2();
        case 2: return case_example3();
    }
    throw UsageError("unknown manufactured case " + std::to_string(index));
}

void write_error_table(const fs::path& path, const StudyRow& row) {
    std::ofstream out(path);
    out.precision(12);
    out << "h delta n l2_sol linf_sol l2_trunc linf_trunc\n";
    out << row.h << " " << row.delta << " " << row.order << " " << row.l2_sol << " "
        << row.linf_sol << " " << row.l2_trunc << " " << row.linf_trunc << "\n";
}

int run_diffusion_static(const RunConfig& cfg, StageTimings& timings) {
    const ManufacturedCase mcase = select_case(cfg.case_index);
    const double delta = cfg.dh_ratio / cfg.n_side;
    std::optional<PerturbationSpec> pert;
    if (cfg.perturbation > 0.0)
        pert = PerturbationSpec{cfg.perturbation, static_cast<std::uint64_t>(cfg.seed)};
    const StudyRow row = run_static_case(mcase, cfg.n_side, delta, cfg.order, pert, &timings);
    std::cout << "case=" << mcase.name << " h=" << row.h << " delta=" << row.delta
              << " n=" << row.order << "\n";
    std::cout << "l2_sol=" << row.l2_sol << " linf_sol=" << row.linf_sol
              << " l2_trunc=" << row.l2_trunc << " linf_trunc=" << row.linf_trunc << "\n";
    write_error_table(fs::path(cfg.output_dir) / "errors.txt", row);
    return kExitOk;
}

int run_pd_static(const RunConfig& cfg, StageTimings& timings) {
    const ManufacturedCase mcase = case_example3();
    const double delta = cfg.dh_ratio / cfg.n_side;
    std::optional<PerturbationSpec> pert;
    if (cfg.perturbation > 0.0)
        pert = PerturbationSpec{cfg.perturbation, static_cast<std::uint64_t>(cfg.seed)};
    const StudyRow row = run_static_case(mcase, cfg.n_side, delta, cfg.order, pert, &timings);
    std::cout << "case=" << mcase.name << " h=" << row.h << " delta=" << row.delta
              << " n=" << row.order << " r=" << cfg.perturbation << "\n";
    std::cout << "l2_sol=" << row.l2_sol << " linf_sol=" << row.linf_sol
              << " l2_trunc=" << row.l2_trunc << " linf_trunc=" << row.linf_trunc << "\n";
    write_error_table(fs::path(cfg.output_dir) / "errors.txt", row);
    return kExitOk;
}

/// Dynamic diffusion with the time-scaled degree-6 manufactured solution
/// u(x, t) = (x^6 + y^6)(1 + t); the load picks up the time derivative.
int run_diffusion_dynamic(const RunConfig& cfg, StageTimings& timings) {
    const ManufacturedCase base = select_case(cfg.case_index);
    const double h = 1.0 / cfg.n_side;
    const double delta = cfg.dh_ratio * h;
    constexpr double rho = 1.0;

    const auto exact = [&](const Vec2& p, double t) { return base.solution(p) * (1.0 + t); };
    const auto load = [&](const Vec2& p, double t) {
        return rho * base.solution(p) + (1.0 + t) * base.load(p, delta);
    };

    PointCloud cloud = build_uniform_grid(Rect{0.0, 0.0, 1.0, 1.0}, h, delta);
    const auto nbhds = build_neighborhoods(cloud, delta);
    const KernelSpec spec = KernelSpec::make(delta, base.kernel_order);
    const ReproducingSpace space = build_basis(cfg.order, spec, base.mode);
    auto t0 = clock_type::now();
    const auto weights = generate_all_weights(cloud, nbhds, space, spec);
    timings.weights_ms = ms_since(t0);
    t0 = clock_type::now();
    const NonlocalOperator op = assemble_diffusion(cloud, nbhds, weights, base.coefficient, spec);
    timings.assembly_ms = ms_since(t0);

    t0 = clock_type::now();
    DiffusionIntegrator integrator(op, cloud, cfg.dt, rho);
    TimeIntegratorState<ScalarField> state;
    state.u_curr.resize(cloud.size());
    for (int i = 0; i < cloud.size(); ++i) state.u_curr[i] = exact(cloud.points[i], 0.0);

    const fs::path staging = fs::path(cfg.output_dir) / ".snapshots-staging";
    fs::create_directories(staging);
    std::ofstream snap_stream(staging / "snapshots.txt");
    SnapshotWriter snapshots(snap_stream);

    for (int m = 1; m <= cfg.steps; ++m) {
        state = integrator.step(state, load, exact);
        if (cfg.snapshot_every > 0 && (m % cfg.snapshot_every == 0 || m == cfg.steps))
            snapshots.write(m, state.t, cloud, state.u_curr);
    }
    timings.solve_ms = ms_since(t0);

    std::vector<double> err;
    for (int i = 0; i < cloud.size(); ++i)
        if (cloud.is_interior(i))
            err.push_back(state.u_curr[i] - exact(cloud.points[i], state.t));
    std::cout << "t_final=" << state.t << " l2_sol=" << l2_norm(err)
              << " linf_sol=" << linf_norm(err) << "\n";

    snap_stream.close();
    fs::rename(staging / "snapshots.txt", fs::path(cfg.output_dir) / "snapshots.txt");
    fs::remove_all(staging);
    return kExitOk;
}

int run_kw(const RunConfig& cfg, StageTimings& timings) {
    KWConfig kw;
    kw.n_per_side = cfg.n_side;
    kw.dh_ratio = cfg.dh_ratio;
    kw.order = cfg.order;
    kw.dt = cfg.dt;
    kw.steps = cfg.steps;
    kw.snapshot_every = cfg.snapshot_every;

    const fs::path staging = fs::path(cfg.output_dir) / ".snapshots-staging";
    fs::create_directories(staging);
    std::ofstream snap_stream(staging / "snapshots.txt");
    SnapshotWriter snapshots(snap_stream);

    const KWResult result = run_kalthoff_winkler(kw, &snapshots);
    timings = result.timings;

    std::cout << "C_CFL=" << result.cfl << "\n";
    std::cout << "first_break_step=" << result.first_dynamic_break_step
              << " bonds_broken=" << result.bonds_broken_dynamic << "\n";
    std::cout << "crack_angle_left_deg=" << result.angle_left_deg
              << " crack_angle_right_deg=" << result.angle_right_deg << "\n";
    std::cout << "fragments=" << result.fragments << "\n";

    std::ofstream dmg(staging / "damage_final.txt");
    dmg.precision(12);
    dmg << "id x y damage\n";
    for (std::size_t r = 0; r < result.nbhds.size(); ++r) {
        const int i = result.nbhds[r].center;
        dmg << i << " " << result.cloud.points[i].x << " " << result.cloud.points[i].y << " "
            << result.damage_final.d[r] << "\n";
    }
    dmg.close();
    snap_stream.close();
    fs::rename(staging / "snapshots.txt", fs::path(cfg.output_dir) / "snapshots.txt");
    fs::rename(staging / "damage_final.txt", fs::path(cfg.output_dir) / "damage_final.txt");
    fs::remove_all(staging);
    return kExitOk;
}

int run_study(const RunConfig& cfg, StageTimings& timings) {
    const ManufacturedCase mcase = select_case(cfg.case_index);
    StudyRegime regime;
    regime.kind = cfg.regime == "fixed-delta" ? StudyRegime::Kind::FixedDelta
                                              : StudyRegime::Kind::FixedRatio;
    regime.dh_ratio = cfg.dh_ratio;
    regime.delta = cfg.delta;
    regime.order = cfg.order;
    regime.resolutions = cfg.resolutions;

    std::optional<StudyPerturbation> pert;
    if (cfg.perturbation > 0.0) {
        StudyPerturbation p;
        p.ratio = cfg.perturbation;
        if (cfg.seeds.empty())
            p.seeds = {static_cast<std::uint64_t>(cfg.seed)};
        else
            for (const long s : cfg.seeds) p.seeds.push_back(static_cast<std::uint64_t>(s));
        pert = p;
    }

    const auto t0 = clock_type::now();
    const ConvergenceReport report = run_convergence_study(mcase, regime, pert);
    timings.solve_ms = ms_since(t0);

    const SlopeSet slopes = report.fitted_slopes();
    std::cout << "case=" << mcase.name << " rows=" << report.rows.size() << "\n";
    std::cout << "slope_l2_sol=" << slopes.l2_sol << " slope_linf_sol=" << slopes.linf_sol
              << " slope_l2_trunc=" << slopes.l2_trunc
              << " slope_linf_trunc=" << slopes.linf_trunc << "\n";

    std::ofstream csv(fs::path(cfg.output_dir) / "study.csv");
    report.write_csv(csv);
    return kExitOk;
}

}  // namespace

int run(const RunConfig& config) {
    const auto t_start = clock_type::now();
    StageTimings timings;
    int status = kExitOk;
    std::string error;

    try {
        fs::create_directories(config.output_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: cannot create output directory: " << e.what() << "\n";
        return kExitIo;
    }

    try {
        switch (config.scenario) {
            case Scenario::DiffusionStatic: status = run_diffusion_static(config, timings); break;
            case Scenario::DiffusionDynamic:
                status = run_diffusion_dynamic(config, timings);
                break;
            case Scenario::PeridynamicStatic: status = run_pd_static(config, timings); break;
            case Scenario::KalthoffWinkler: status = run_kw(config, timings); break;
            case Scenario::ConvergenceStudy: status = run_study(config, timings); break;
        }
    } catch (const UsageError& e) {
        error = e.what();
        status = kExitUsage;
    } catch (const numerical_error& e) {
        error = e.what();
        status = kExitNumerical;
    } catch (const fs::filesystem_error& e) {
        error = e.what();
        status = kExitIo;
    } catch (const std::ios_base::failure& e) {
        error = e.what();
        status = kExitIo;
    } catch (const std::exception& e) {
        error = e.what();
        status = kExitNumerical;
    }

    // failed runs leave only the manifest behind
    if (status != kExitOk) {
        std::error_code ec;
        fs::remove_all(fs::path(config.output_dir) / ".snapshots-staging", ec);
        std::cerr << "error: " << error << "\n";
    }
    write_manifest(config, timings, ms_since(t_start), status, error);
    return status;
}

}  // namespace nlmf::cli
