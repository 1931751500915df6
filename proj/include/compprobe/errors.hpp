#pragma once

#include <stdexcept>
#include <string>

namespace compprobe {

// Input violates a documented invariant (bad rating, duplicate key, bad role mask).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller broke an operation's precondition.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Binary input is not a file we know how to read (magic, version).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Binary input is damaged: checksum mismatch, truncation, impossible field values.
class CorruptionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A required input file or directory is absent or unreadable.
class MissingInputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A correlation or average over an empty or degenerate sample.
class UndefinedStatisticError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace compprobe
