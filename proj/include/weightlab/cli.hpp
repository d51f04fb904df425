#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace weightlab {

// Entry point behind the `weightlab` binary; takes argv-style arguments
// without the program name. Exit codes: 0 success / all assertions passed,
// 1 experiment failure, 2 usage or configuration error.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace weightlab
