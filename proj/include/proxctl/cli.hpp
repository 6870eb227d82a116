#pragma once

#include <string>
#include <vector>

namespace proxctl {

//! Batch front door. args excludes the program name; returns the process
//! exit status: 0 success, 1 usage or configuration error, 2 data error,
//! 3 numerical failure. Errors also emit a machine-readable record on
//! standard error.
int cli_main(std::vector<std::string> args);

}  // namespace proxctl
