#pragma once

#include <stdexcept>
#include <string>

namespace dqbn {

// Error categories map 1:1 onto the CLI's machine-parsable
// "ERROR:<category>:" prefix.
enum class ErrorCategory {
    Usage,
    Io,
    Json,
    Schema,
    Validation,
    Inference,
    Simulation,
    Internal,
};

inline const char* to_string(ErrorCategory c) {
    switch (c) {
        case ErrorCategory::Usage: return "usage";
        case ErrorCategory::Io: return "io";
        case ErrorCategory::Json: return "json";
        case ErrorCategory::Schema: return "schema";
        case ErrorCategory::Validation: return "validation";
        case ErrorCategory::Inference: return "inference";
        case ErrorCategory::Simulation: return "simulation";
        case ErrorCategory::Internal: return "internal";
    }
    return "internal";
}

class Error : public std::runtime_error {
  public:
    Error(ErrorCategory category, const std::string& message)
        : std::runtime_error(message), category_(category) {}

    ErrorCategory category() const { return category_; }

  private:
    ErrorCategory category_;
};

}  // namespace dqbn
