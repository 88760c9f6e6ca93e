// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sasa::cli {

/// Runs one command line (without the program name). Returns the process
/// exit status; diagnostics go to `err` as `sasa: <stage>: <message>`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sasa::cli
