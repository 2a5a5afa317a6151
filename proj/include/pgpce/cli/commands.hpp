#pragma once

#include <iosfwd>

namespace pgpce::cli {

/// Entry point of the pgpce tool. Verbs: generate, train, predict, evaluate,
/// moments. Returns 0 on success, 1 on runtime failures and 2 on usage errors.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pgpce::cli
