#include "cli_config.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <sstream>

namespace nlmf::cli {

namespace {

std::string join_longs(const std::vector<long>& v) {
    std::ostringstream os;
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
    return os.str();
}

std::string join_ints(const std::vector<int>& v) {
    std::ostringstream os;
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
    return os.str();
}

void add_common(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--output-dir", cfg.output_dir, "Directory for run artifacts");
    cmd->add_option("--seed", cfg.seed, "Random seed for grid perturbation");
    cmd->add_option("--snapshot-every", cfg.snapshot_every,
                    "Snapshot stride for dynamic runs (0 disables)");
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
    return out;
}

std::vector<long> parse_long_list(const std::string& text) {
    std::vector<long> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stol(tok));
    return out;
}

/// key=value file; keys mirror the positional and flag names. Values from the
/// file become defaults that explicit arguments override.
void apply_config_file(const std::string& path, RunConfig& cfg) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config file: " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto last = line.find_last_not_of(" \t\r");
        line = line.substr(first, last - first + 1);
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw UsageError("config line " + std::to_string(lineno) + " is not key=value");
        const std::string key = line.substr(0, eq);
        const std::string value = line.substr(eq + 1);
        try {
            if (key == "N") cfg.n_side = std::stoi(value);
            else if (key == "dhratio") cfg.dh_ratio = std::stod(value);
            else if (key == "poly_order") cfg.order = std::stoi(value);
            else if (key == "case") cfg.case_index = std::stoi(value);
            else if (key == "dt") cfg.dt = std::stod(value);
            else if (key == "timesteps") cfg.steps = std::stoi(value);
            else if (key == "perturbation") cfg.perturbation = std::stod(value);
            else if (key == "seed") cfg.seed = std::stol(value);
            else if (key == "snapshot-every") cfg.snapshot_every = std::stoi(value);
            else if (key == "output-dir") cfg.output_dir = value;
            else if (key == "regime") cfg.regime = value;
            else if (key == "delta") cfg.delta = std::stod(value);
            else if (key == "resolutions") cfg.resolutions = parse_int_list(value);
            else if (key == "study-seeds") cfg.seeds = parse_long_list(value);
            else throw UsageError("unknown config key: " + key);
        } catch (const UsageError&) {
            throw;
        } catch (const std::exception&) {
            throw UsageError("bad value for config key " + key + ": " + value);
        }
    }
}

void validate(const RunConfig& cfg) {
    if (cfg.n_side < 4) throw UsageError("N must be at least 4");
    if (cfg.dh_ratio < 1.0) throw UsageError("delta/h ratio must be at least 1");
    if (cfg.order < 0) throw UsageError("polynomial order must be nonnegative");
    const bool dynamic =
        cfg.scenario == Scenario::DiffusionDynamic || cfg.scenario == Scenario::KalthoffWinkler;
    if (dynamic && !(cfg.dt > 0.0)) throw UsageError("time step dt must be positive");
    if (dynamic && cfg.steps < 1) throw UsageError("step count must be positive");
    if (cfg.perturbation < 0.0 || cfg.perturbation >= 1.0)
        throw UsageError("perturbation ratio must lie in [0, 1)");
    if (cfg.scenario == Scenario::ConvergenceStudy) {
        if (cfg.case_index < 0 || cfg.case_index > 2)
            throw UsageError("study case must be 0, 1 or 2");
        if (cfg.regime != "fixed-ratio" && cfg.regime != "fixed-delta")
            throw UsageError("regime must be fixed-ratio or fixed-delta");
        if (cfg.resolutions.size() < 3)
            throw UsageError("a study needs at least three resolutions");
    } else if (cfg.scenario == Scenario::DiffusionStatic ||
               cfg.scenario == Scenario::DiffusionDynamic) {
        if (cfg.case_index < 0 || cfg.case_index > 1)
            throw UsageError("diffusion case must be 0 or 1");
    }
}

}  // namespace

const char* scenario_name(Scenario s) {
    switch (s) {
        case Scenario::DiffusionStatic: return "nldiff";
        case Scenario::DiffusionDynamic: return "nldiff-dyn";
        case Scenario::PeridynamicStatic: return "pd-static";
        case Scenario::KalthoffWinkler: return "kw";
        case Scenario::ConvergenceStudy: return "study";
    }
    return "?";
}

std::string usage_text() {
    return "usage:\n"
           "  nlmf nldiff <N> <dhratio> <poly_order> <case>\n"
           "  nlmf nldiff-dyn <N> <dhratio> <poly_order> <dt> <timesteps>\n"
           "  nlmf pd-static <N> <dhratio> <poly_order> <perturbation>\n"
           "  nlmf kw <N> <dhratio> <poly_order> <dt> <timesteps>\n"
           "  nlmf study <case> --resolutions N1,N2,... [--regime fixed-ratio|fixed-delta]\n"
           "             [--dhratio R] [--delta D] [--order n] [--perturbation r]\n"
           "             [--study-seeds s1,s2,...]\n"
           "common options: --output-dir DIR --seed S --snapshot-every K --config FILE\n";
}

RunConfig parse_args(const std::vector<std::string>& args) {
    RunConfig cfg;

    // --config FILE supplies key=value defaults; any explicit arguments,
    // positional or flag, override them
    std::vector<std::string> remaining;
    bool have_config = false;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw UsageError("--config requires a file path");
            apply_config_file(args[++i], cfg);
            have_config = true;
        } else if (args[i].rfind("--config=", 0) == 0) {
            apply_config_file(args[i].substr(9), cfg);
            have_config = true;
        } else {
            remaining.push_back(args[i]);
        }
    }
    // positionals are mandatory on the command line unless the file covers them
    const auto pos = [&](CLI::Option* opt) {
        if (!have_config) opt->required();
        return opt;
    };

    CLI::App app{"meshfree nonlocal diffusion / peridynamics solver"};
    app.require_subcommand(1);

    auto* nldiff = app.add_subcommand("nldiff", "static nonlocal diffusion");
    pos(nldiff->add_option("N", cfg.n_side, "points per side"));
    pos(nldiff->add_option("dhratio", cfg.dh_ratio, "delta/h"));
    pos(nldiff->add_option("poly_order", cfg.order, "reproducing order"));
    pos(nldiff->add_option("case", cfg.case_index, "manufactured case (0 or 1)"));
    add_common(nldiff, cfg);

    auto* nldiffd = app.add_subcommand("nldiff-dyn", "dynamic nonlocal diffusion");
    pos(nldiffd->add_option("N", cfg.n_side));
    pos(nldiffd->add_option("dhratio", cfg.dh_ratio));
    pos(nldiffd->add_option("poly_order", cfg.order));
    pos(nldiffd->add_option("dt", cfg.dt));
    pos(nldiffd->add_option("timesteps", cfg.steps));
    nldiffd->add_option("--case", cfg.case_index, "manufactured case (0 or 1)");
    add_common(nldiffd, cfg);

    auto* pd = app.add_subcommand("pd-static", "static bond-based peridynamics");
    pos(pd->add_option("N", cfg.n_side));
    pos(pd->add_option("dhratio", cfg.dh_ratio));
    pos(pd->add_option("poly_order", cfg.order));
    pos(pd->add_option("perturbation", cfg.perturbation));
    add_common(pd, cfg);

    auto* kw = app.add_subcommand("kw", "Kalthoff-Winkler dynamic fracture");
    pos(kw->add_option("N", cfg.n_side));
    pos(kw->add_option("dhratio", cfg.dh_ratio));
    pos(kw->add_option("poly_order", cfg.order));
    pos(kw->add_option("dt", cfg.dt));
    pos(kw->add_option("timesteps", cfg.steps));
    add_common(kw, cfg);

    auto* study = app.add_subcommand("study", "convergence study harness");
    pos(study->add_option("case", cfg.case_index, "manufactured case (0, 1 or 2)"));
    study->add_option("--regime", cfg.regime, "fixed-ratio or fixed-delta");
    study->add_option("--dhratio", cfg.dh_ratio, "delta/h for fixed-ratio studies");
    study->add_option("--delta", cfg.delta, "horizon for fixed-delta studies");
    study->add_option("--order", cfg.order, "reproducing order");
    study->add_option("--resolutions", cfg.resolutions, "per-side point counts")
        ->delimiter(',');
    study->add_option("--perturbation", cfg.perturbation, "grid perturbation ratio");
    study->add_option("--study-seeds", cfg.seeds, "seeds for perturbed realizations")
        ->delimiter(',');
    add_common(study, cfg);

    std::vector<std::string> reversed(remaining.rbegin(), remaining.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }

    if (nldiff->parsed()) cfg.scenario = Scenario::DiffusionStatic;
    else if (nldiffd->parsed()) cfg.scenario = Scenario::DiffusionDynamic;
    else if (pd->parsed()) cfg.scenario = Scenario::PeridynamicStatic;
    else if (kw->parsed()) cfg.scenario = Scenario::KalthoffWinkler;
    else if (study->parsed()) cfg.scenario = Scenario::ConvergenceStudy;

    if (cfg.scenario == Scenario::PeridynamicStatic) cfg.case_index = 2;
    validate(cfg);
    return cfg;
}

std::vector<std::string> render(const RunConfig& cfg) {
    std::vector<std::string> args{scenario_name(cfg.scenario)};
    auto num = [](double v) {
        std::ostringstream os;
        os.precision(17);
        os << v;
        return os.str();
    };
    switch (cfg.scenario) {
        case Scenario::DiffusionStatic:
            args.insert(args.end(), {std::to_string(cfg.n_side), num(cfg.dh_ratio),
                                     std::to_string(cfg.order), std::to_string(cfg.case_index)});
            break;
        case Scenario::DiffusionDynamic:
            args.insert(args.end(), {std::to_string(cfg.n_side), num(cfg.dh_ratio),
                                     std::to_string(cfg.order), num(cfg.dt),
                                     std::to_string(cfg.steps)});
            if (cfg.case_index != 0) {
                args.push_back("--case");
                args.push_back(std::to_string(cfg.case_index));
            }
            break;
        case Scenario::PeridynamicStatic:
            args.insert(args.end(), {std::to_string(cfg.n_side), num(cfg.dh_ratio),
                                     std::to_string(cfg.order), num(cfg.perturbation)});
            break;
        case Scenario::KalthoffWinkler:
            args.insert(args.end(), {std::to_string(cfg.n_side), num(cfg.dh_ratio),
                                     std::to_string(cfg.order), num(cfg.dt),
                                     std::to_string(cfg.steps)});
            break;
        case Scenario::ConvergenceStudy:
            args.push_back(std::to_string(cfg.case_index));
            args.push_back("--regime");
            args.push_back(cfg.regime);
            args.push_back("--dhratio");
            args.push_back(num(cfg.dh_ratio));
            args.push_back("--delta");
            args.push_back(num(cfg.delta));
            args.push_back("--order");
            args.push_back(std::to_string(cfg.order));
            if (!cfg.resolutions.empty()) {
                args.push_back("--resolutions");
                args.push_back(join_ints(cfg.resolutions));
            }
            if (cfg.perturbation > 0.0) {
                args.push_back("--perturbation");
                args.push_back(num(cfg.perturbation));
            }
            if (!cfg.seeds.empty()) {
                args.push_back("--study-seeds");
                args.push_back(join_longs(cfg.seeds));
            }
            break;
    }
    args.push_back("--output-dir");
    args.push_back(cfg.output_dir);
    args.push_back("--seed");
    args.push_back(std::to_string(cfg.seed));
    args.push_back("--snapshot-every");
    args.push_back(std::to_string(cfg.snapshot_every));
    return args;
}

}  // namespace nlmf::cli
