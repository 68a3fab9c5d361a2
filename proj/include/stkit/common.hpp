#pragma once

#include <stdexcept>
#include <string>

namespace stkit {

/// Error category: validation errors come from bad inputs or configuration
/// (CLI exit code 1), runtime errors from failures during computation
/// (exit code 2).
enum class errc { validation, runtime };

class Error : public std::runtime_error {
public:
    Error(errc kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}

    errc kind() const { return kind_; }

    static Error validation(const std::string& msg) { return Error(errc::validation, msg); }
    static Error runtime(const std::string& msg) { return Error(errc::runtime, msg); }

private:
    errc kind_;
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw Error::validation(msg);
}

} // namespace stkit
