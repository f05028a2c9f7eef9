#ifndef MBORDERS_ERRORS_HPP
#define MBORDERS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mborders {

enum class ErrorCode {
  // lexer / parser
  UnterminatedString,
  IllegalCharacter,
  SyntaxError,
  DialectMismatch,
  TrailingTokens,
  // coding
  IndexOutOfRange,
  EmptySide,
  DimensionMismatch,
  // binary models
  UnknownFlag,
  MalformedValue,
  SingleClassInput,
  CorruptModel,
  TruncatedStream,
  // composer
  EmptySideData,
  ValidationFailed,
  // data i/o, generator, metrics
  IoError,
  RaggedRow,
  NonIntegerLabel,
  EmptyFile,
  ThresholdSpecInvalid,
  ClassStarvation,
  LengthMismatch,
  LabelOutOfRange,
};

inline const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnterminatedString: return "UnterminatedString";
    case ErrorCode::IllegalCharacter: return "IllegalCharacter";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::DialectMismatch: return "DialectMismatch";
    case ErrorCode::TrailingTokens: return "TrailingTokens";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::EmptySide: return "EmptySide";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::UnknownFlag: return "UnknownFlag";
    case ErrorCode::MalformedValue: return "MalformedValue";
    case ErrorCode::SingleClassInput: return "SingleClassInput";
    case ErrorCode::CorruptModel: return "CorruptModel";
    case ErrorCode::TruncatedStream: return "TruncatedStream";
    case ErrorCode::EmptySideData: return "EmptySideData";
    case ErrorCode::ValidationFailed: return "ValidationFailed";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::RaggedRow: return "RaggedRow";
    case ErrorCode::NonIntegerLabel: return "NonIntegerLabel";
    case ErrorCode::EmptyFile: return "EmptyFile";
    case ErrorCode::ThresholdSpecInvalid: return "ThresholdSpecInvalid";
    case ErrorCode::ClassStarvation: return "ClassStarvation";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::LabelOutOfRange: return "LabelOutOfRange";
  }
  return "UnknownError";
}

// Single exception type for the whole library. `line`/`column` are 1-based
// and 0 when the error has no source position.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& message, int line = 0, int column = 0)
      : std::runtime_error(format(code, message, line, column)),
        code_(code), line_(line), column_(column) {}

  ErrorCode code() const { return code_; }
  int line() const { return line_; }
  int column() const { return column_; }

private:
  static std::string format(ErrorCode code, const std::string& message,
                            int line, int column) {
    std::string out = error_code_name(code);
    if (line > 0) {
      out += " at line " + std::to_string(line);
      if (column > 0) out += ", column " + std::to_string(column);
    }
    out += ": ";
    out += message;
    return out;
  }

  ErrorCode code_;
  int line_;
  int column_;
};

}  // namespace mborders

#endif
