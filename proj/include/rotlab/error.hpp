#pragma once

#include <stdexcept>
#include <string>

namespace rotlab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input or a violated operation precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// A size, bit or memory budget would be exceeded.
class BudgetError : public Error {
 public:
  using Error::Error;
};

// A certified error bound could not be guaranteed.
class PrecisionError : public Error {
 public:
  using Error::Error;
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw PreconditionError(what);
}

}  // namespace rotlab
