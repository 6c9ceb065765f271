#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bboxlab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitCheckFailed = 3;

/// Entry point behind the `bboxlab` executable; args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Fixed-point with 12 decimals, trailing zeros trimmed ("1.333333333333", "0").
std::string format_eval_number(double value);

}  // namespace bboxlab::cli
