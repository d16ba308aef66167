#pragma once

#include <stdexcept>
#include <string>

namespace mrdc {

/// File-format failures carry a kind so callers can tell a truncated payload
/// from a bad header or an incompatible version.
class IoError : public std::runtime_error {
public:
    enum class Kind { MalformedHeader, TruncatedPayload, VersionMismatch, FileAccess };

    IoError(Kind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

}  // namespace mrdc
