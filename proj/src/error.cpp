#include "emomusic/error.hpp"

namespace emomusic {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::MissingFile: return "MissingFile";
    case ErrorKind::DuplicateTrial: return "DuplicateTrial";
    case ErrorKind::InvalidManifest: return "InvalidManifest";
    case ErrorKind::UnknownChannel: return "UnknownChannel";
    case ErrorKind::ChannelCountMismatch: return "ChannelCountMismatch";
    case ErrorKind::NonNumericSample: return "NonNumericSample";
    case ErrorKind::UnsupportedEncoding: return "UnsupportedEncoding";
    case ErrorKind::CorruptHeader: return "CorruptHeader";
    case ErrorKind::EmptyStream: return "EmptyStream";
    case ErrorKind::InvalidAnnotation: return "InvalidAnnotation";
    case ErrorKind::WindowLongerThanTrial: return "WindowLongerThanTrial";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::DegenerateSignal: return "DegenerateSignal";
    case ErrorKind::TooShort: return "TooShort";
    case ErrorKind::InvalidBand: return "InvalidBand";
    case ErrorKind::TooFewFrames: return "TooFewFrames";
    case ErrorKind::SingleClass: return "SingleClass";
    case ErrorKind::MismatchedWindows: return "MismatchedWindows";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::NotEnoughSubjects: return "NotEnoughSubjects";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace emomusic
