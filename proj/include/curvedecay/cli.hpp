#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace curvedecay::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitStatistical = 3;

// Subcommands: theory, gq, fit, envelope, witness, airy, lemma51, lemma52.
// Exit codes: 0 success, 2 validation failure, 3 hypothesis check failed.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace curvedecay::cli
