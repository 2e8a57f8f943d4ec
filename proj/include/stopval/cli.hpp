#pragma once

#include <optional>
#include <string>

#include "stopval/config.hpp"

namespace stopval::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitSolver = 3;
inline constexpr int kExitAssertion = 4;

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<double> tol;
    std::optional<std::uint64_t> trials;
};

int cmd_solve(const std::string& config_path, const std::string& out_path,
              const Overrides& overrides = {});
int cmd_value_of_info(const std::string& config_path, const Overrides& overrides = {});
int cmd_compare(const std::string& config_s_path, const std::string& config_t_path,
                const std::string& out_path, const Overrides& overrides = {});
int cmd_stopping_time(const std::string& config_path, const std::string& out_path,
                      const Overrides& overrides = {});
int cmd_reproduce(const std::string& id, const std::string& out_dir);

/// Bundled reproduction scenarios: example1 (drifting state, postponement),
/// example2 (three-period benchmark), example4 (infinite-horizon random walk),
/// example5 (five-period threshold table). example5_t is the second structure
/// of the example5 pair.
ProblemConfig example_config(const std::string& id);
bool known_example(const std::string& id);

}  // namespace stopval::cli
