#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "gbsval/cli/config.hpp"

namespace gbsval::cli {

using Outputs = std::vector<std::filesystem::path>;

// Each command writes CSV or pattern files into config.out and returns their paths.
// Every file starts with `#` provenance lines; the `# created:` line is the
// only one that changes between identical runs.
Outputs cmd_simulate(const RunConfig& config);
Outputs cmd_fake(const RunConfig& config);
Outputs cmd_bin(const RunConfig& config);
Outputs cmd_compare(const RunConfig& config);
Outputs cmd_permtest(const RunConfig& config);
Outputs cmd_fit(const RunConfig& config);
Outputs cmd_oracle(const RunConfig& config);

Outputs run_command(const std::string& name, const RunConfig& config);
const std::vector<std::string>& command_names();

} // namespace gbsval::cli
