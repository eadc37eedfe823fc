#include <iostream>
#include <vector>

#include "cli_config.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    nlmf::cli::RunConfig config;
    try {
        config = nlmf::cli::parse_args(args);
    } catch (const nlmf::cli::UsageError& e) {
        std::cerr << "error: " << e.what() << "\n" << nlmf::cli::usage_text();
        return nlmf::cli::kExitUsage;
    }
    return nlmf::cli::run(config);
}
