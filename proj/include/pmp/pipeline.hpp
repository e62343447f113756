#pragma once

#include <string>
#include <vector>

#include "pmp/config.hpp"

namespace pmp {

// Operator commands; each writes its artifacts under out.dir, records them in
// the manifest, and returns their paths.
std::vector<std::string> run_command(const std::string& command, const RunConfig& cfg);

const std::vector<std::string>& command_names();

}  // namespace pmp
