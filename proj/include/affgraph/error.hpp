#pragma once

#include <stdexcept>
#include <string>

namespace affgraph {

/// Process exit codes used by the command line tool.
enum class ExitCode : int { Success = 0, Usage = 1, Data = 2, Numeric = 3 };

class Error : public std::runtime_error {
public:
  Error(ExitCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ExitCode code() const noexcept { return code_; }

private:
  ExitCode code_;
};

class UsageError : public Error {
public:
  explicit UsageError(const std::string& what) : Error(ExitCode::Usage, what) {}
};

/// Malformed input files or violated data invariants.
class DataError : public Error {
public:
  explicit DataError(const std::string& what) : Error(ExitCode::Data, what) {}
};

/// Numerical failures: undefined quantities, diverging optimization.
class NumericError : public Error {
public:
  explicit NumericError(const std::string& what) : Error(ExitCode::Numeric, what) {}
};

}  // namespace affgraph
