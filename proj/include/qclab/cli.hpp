#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace qclab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitDegenerate = 3;
inline constexpr int kExitViolation = 4;

/// Runs one subcommand (distortion, fit, audit, reconstruct). `args` excludes
/// the program name. Results go to --out (or `out`), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qclab::cli
