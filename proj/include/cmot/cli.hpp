#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace cmot {

// Exit codes: 0 converged (or command succeeded), 2 iteration limit reached
// without convergence, 1 on any error or usage problem.
int cli_main(int argc, char** argv);
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cmot
