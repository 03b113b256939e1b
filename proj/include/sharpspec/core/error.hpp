#pragma once

#include <stdexcept>
#include <string>

namespace sharpspec {

enum class ErrorKind {
  dimension_mismatch,
  invalid_argument,
  precondition,
  size_limit,
  not_converged,
  parse,
  io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) throw Error(kind, what);
}

}  // namespace sharpspec
