#pragma once

#include <stdexcept>
#include <string>

namespace magyc {

// Error classes map to the stable CLI exit codes: input errors exit 2,
// degenerate-data errors exit 3, numerical failures exit 4.
enum class ErrorClass { Input, DegenerateData, Numerical };

class Error : public std::runtime_error {
public:
    Error(ErrorClass cls, std::string kind, const std::string& message)
        : std::runtime_error(message), class_(cls), kind_(std::move(kind)) {}

    ErrorClass error_class() const noexcept { return class_; }

    /// Machine-readable kind, e.g. "degenerate-motion" or "parse-error".
    const std::string& kind() const noexcept { return kind_; }

    int exit_code() const noexcept {
        switch (class_) {
            case ErrorClass::Input: return 2;
            case ErrorClass::DegenerateData: return 3;
            case ErrorClass::Numerical: return 4;
        }
        return 1;
    }

private:
    ErrorClass class_;
    std::string kind_;
};

inline Error input_error(const std::string& kind, const std::string& msg) {
    return Error(ErrorClass::Input, kind, msg);
}
inline Error degenerate_error(const std::string& kind, const std::string& msg) {
    return Error(ErrorClass::DegenerateData, kind, msg);
}
inline Error numerical_error(const std::string& kind, const std::string& msg) {
    return Error(ErrorClass::Numerical, kind, msg);
}

}  // namespace magyc
