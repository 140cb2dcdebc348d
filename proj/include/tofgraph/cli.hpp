#pragma once

#include <stdexcept>

// Command-line entry point, callable in-process by the tests. Exit codes:
// 0 ok, 2 parse error, 3 domain validation error, 4 missing input.

namespace tofgraph {

struct MissingInputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

int cli_main(int argc, const char* const* argv);

}  // namespace tofgraph
