// SPDX-License-Identifier: Apache-2.0
//
// Command-line entry point, callable in-process for tests.
//
// Subcommands: solve-kp, solve-tsp, solve-sp, accpm-demo, gen, bench.
// Machine-readable results go to `out` as key=value lines; human-readable
// diagnostics go to `err`.  Exit codes: 0 solved to optimality, 1 feasible
// but not proven, 2 infeasible or unbounded, 3 input error, 4 internal
// error.

#pragma once

#include <iosfwd>

namespace oracular::cli {

int run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err);

}  // namespace oracular::cli
