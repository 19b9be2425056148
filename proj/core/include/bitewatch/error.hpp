#pragma once

#include <stdexcept>
#include <string>

namespace bitewatch {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller broke an operation's precondition (unsorted input, time going
// backwards, bad parameter values).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

// Input data is malformed or inconsistent. The CLI maps this family to exit
// code 1.
class DataError : public Error {
 public:
  using Error::Error;
};

}  // namespace bitewatch
