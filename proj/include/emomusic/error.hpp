#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace emomusic {

enum class ErrorKind {
  ParseError,
  MissingFile,
  DuplicateTrial,
  InvalidManifest,
  UnknownChannel,
  ChannelCountMismatch,
  NonNumericSample,
  UnsupportedEncoding,
  CorruptHeader,
  EmptyStream,
  InvalidAnnotation,
  WindowLongerThanTrial,
  InvalidArgument,
  DegenerateSignal,
  TooShort,
  InvalidBand,
  TooFewFrames,
  SingleClass,
  MismatchedWindows,
  DimensionMismatch,
  EmptyInput,
  NotEnoughSubjects,
  Io,
};

std::string_view to_string(ErrorKind kind);

// All library failures are reported through this type; `kind()` is the
// stable, testable part, the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace emomusic
