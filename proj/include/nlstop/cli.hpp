#pragma once

namespace nlstop {

// Entry point behind the nlstop binary. Exit codes: 0 success, 1 a requested
// check failed (axioms or verify), 2 configuration or usage error,
// 3 structural assumption violated while solving.
int run(int argc, char** argv);

}  // namespace nlstop
