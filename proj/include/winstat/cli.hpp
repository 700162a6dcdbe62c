#pragma once

namespace winstat {

// Entry point shared by the winstat binary and the CLI tests.  Returns the
// process exit code: 0 on success, 2 on usage/configuration errors, 3 on
// runtime failures.
int run_cli(int argc, char** argv);

}  // namespace winstat
