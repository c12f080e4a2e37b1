#pragma once

#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "weftsched/ir.hpp"
#include "weftsched/jointsolve.hpp"

// Command-line front end. run_cli dispatches the subcommands
// (normalize | schedule | joint | codegen | sim | validate | viz) and maps
// failures to exit codes: 0 success, 1 domain error, 2 usage error.

namespace weftsched {

// Solution file contents: the schedule, the warp assignment, and the
// streaming depths. Issue and liveness tables are reconstructed.
struct ParsedSolution {
  ModuloSchedule schedule;
  std::vector<int> warp_start;
  std::map<std::string, std::int64_t> streaming_depths;
};

// {I, L, M, A, streaming_depths, search_report} rendering; M and A are keyed
// by node id. `attempts` fills search_report.
std::string solution_to_json(const JointSolution& sol, const DepGraph& g,
                             const std::vector<SearchAttempt>& attempts = {});

// Parses the same format. Unknown keys, missing nodes in M, or placements
// outside [0, L - eff] are rejected with std::invalid_argument.
ParsedSolution solution_from_json(const std::string& text, const DepGraph& g);

int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout,
            std::ostream& err = std::cerr);

}  // namespace weftsched
