#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hyperchain::cli {

/// Exit codes: 0 success (findings such as BlowUp or NotPermanent included),
/// 1 internal error, 2 usage or input error. Errors print one line
/// "error: <Code>: <message>" to `err`. `args` includes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hyperchain::cli
