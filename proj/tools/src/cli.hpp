#pragma once

namespace trajbench::tools {

// Entry point behind main(). Exit codes: 0 success, 1 runtime failure
// (message names the pipeline stage), 2 config/validation failure.
int run_cli(int argc, const char* const* argv);

}  // namespace trajbench::tools
