#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace nlmf::cli {

enum class Scenario {
    DiffusionStatic,
    DiffusionDynamic,
    PeridynamicStatic,
    KalthoffWinkler,
    ConvergenceStudy,
};

/// Exit codes: 0 success, 2 usage, 3 numerical failure, 4 I/O failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitIo = 4;

class UsageError : public std::runtime_error {
public:
    explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

struct RunConfig {
    Scenario scenario = Scenario::DiffusionStatic;
    int n_side = 16;        ///< particles per side (y side for kw; x gets 2N)
    double dh_ratio = 3.5;
    int order = 2;
    int case_index = 0;     ///< manufactured case selector
    double dt = 0.0;
    int steps = 0;
    double perturbation = 0.0;
    long seed = 0;
    int snapshot_every = 10;
    std::string output_dir = "nlmf-out";

    // convergence-study extras
    std::string regime = "fixed-ratio";  ///< or "fixed-delta"
    double delta = 0.4375;               ///< horizon for fixed-delta studies
    std::vector<int> resolutions;
    std::vector<long> seeds;

    bool operator==(const RunConfig&) const = default;
};

std::string usage_text();

/// Parses subcommand-style arguments (without argv[0]); unknown flags and
/// invariant violations raise UsageError.
RunConfig parse_args(const std::vector<std::string>& args);

/// Command line that parses back to the same config.
std::vector<std::string> render(const RunConfig& config);

/// Executes the configured scenario end to end; writes the manifest in every
/// case and result artifacts only on success. Returns an exit code.
int run(const RunConfig& config);

const char* scenario_name(Scenario s);

}  // namespace nlmf::cli
