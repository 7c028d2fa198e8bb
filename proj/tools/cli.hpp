#pragma once

namespace vrnmf::cli {

/// Process exit codes.
enum ExitCode : int {
    kOk = 0,
    kBadArguments = 2,
    kIoFailure = 3,
    kSolverError = 4,
    kAllCellsFailed = 5,
};

int run(int argc, char** argv);

}  // namespace vrnmf::cli
