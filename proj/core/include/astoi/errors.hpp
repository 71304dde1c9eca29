// Copyright 2026 The astoi Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef ASTOI_ERRORS_HPP_
#define ASTOI_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace astoi {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller passed an argument outside an operation's contract.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// File system failure: missing input, unwritable output.
class IoError : public Error {
 public:
  using Error::Error;
};

/// A file exists but its content is not what we can decode.
class FormatError : public Error {
 public:
  enum class Kind { kMalformed, kUnsupported, kBadMagic, kBadVersion, kTruncated, kChecksum, kDimension };

  FormatError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// Zero-variance vector handed to a correlation (ELC is undefined there).
class DegenerateInput : public Error {
 public:
  using Error::Error;
};

/// The centered cross inner product in the ELC gradient denominator vanished.
class DegenerateGradient : public Error {
 public:
  using Error::Error;
};

/// Non-finite loss or parameter during training.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Writes "warning: <msg>" to stderr. Kept out of the headers so tests can
// silence it with SetWarningsEnabled(false).
void Warn(const std::string& msg);
void SetWarningsEnabled(bool enabled);

}  // namespace astoi

#endif  // ASTOI_ERRORS_HPP_
