#pragma once

namespace reeftip::cli {

// parse argv, dispatch one subcommand, write outputs.
// returns 0 on success, 2 on validation/usage errors, 3 on numeric failure
int run(int argc, char** argv);

}  // namespace reeftip::cli
