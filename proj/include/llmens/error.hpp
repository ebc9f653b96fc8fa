#pragma once

#include <stdexcept>
#include <string>

namespace llmens {

// Error taxonomy mapped to CLI exit codes: Validation -> 1, everything else -> 2.
enum class ErrorKind {
    Validation,  // bad config, bad flags, violated preconditions
    Data,        // malformed corpus / artifact files
    Transport,   // HTTP / network failures after retries
    Io,          // filesystem failures
};

class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

  private:
    ErrorKind kind_;
};

inline Error validation_error(const std::string& msg) { return Error(ErrorKind::Validation, msg); }
inline Error data_error(const std::string& msg) { return Error(ErrorKind::Data, msg); }
inline Error transport_error(const std::string& msg) { return Error(ErrorKind::Transport, msg); }
inline Error io_error(const std::string& msg) { return Error(ErrorKind::Io, msg); }

}  // namespace llmens
