#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pmiembed::cli {

// Runs one pmi-embed invocation. args[0] is the program name. Returns 0 on
// success, 1 on a usage, configuration or data error, 2 on an internal error.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pmiembed::cli
