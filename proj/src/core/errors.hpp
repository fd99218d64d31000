#pragma once

#include <stdexcept>
#include <string>

namespace dro {

// Error categories; the numeric codes double as C-API return codes and CLI
// exit codes (0 = ok, 2 = I/O, 3 = parse, 4 = config, 5 = solver).
enum class ErrorCode : int {
  input = 1,
  io = 2,
  parse = 3,
  config = 4,
  solver = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

struct InputError : Error {
  explicit InputError(const std::string& what) : Error(ErrorCode::input, what) {}
};
struct IoError : Error {
  explicit IoError(const std::string& what) : Error(ErrorCode::io, what) {}
};
struct ParseError : Error {
  explicit ParseError(const std::string& what) : Error(ErrorCode::parse, what) {}
};
struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error(ErrorCode::config, what) {}
};
struct SolverError : Error {
  explicit SolverError(const std::string& what) : Error(ErrorCode::solver, what) {}
};

}  // namespace dro
