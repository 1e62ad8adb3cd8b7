#pragma once

namespace lhv {

// Command-line driver. Exit codes: 0 success, 2 usage error, 3 invalid
// config or state description, 4 numeric failure during optimization,
// 5 validation or classification failure.
int run_cli(int argc, const char* const* argv);

}  // namespace lhv
