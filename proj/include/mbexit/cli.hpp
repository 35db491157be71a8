#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace mbexit::cli {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kSchema = "mbexit.report/1";

// Exit codes: 0 success, 1 hypothesis or check failure, 2 usage error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// argv without the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mbexit::cli
