#pragma once

#include <stdexcept>
#include <string>

namespace mrt {

// Exit-code aligned error classes: validation failure, bad input, broken invariant.
enum class ErrorKind { validation = 1, input = 2, internal = 3 };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail_input(const std::string& msg) { throw Error(ErrorKind::input, msg); }
[[noreturn]] inline void fail_internal(const std::string& msg) { throw Error(ErrorKind::internal, msg); }
[[noreturn]] inline void fail_validation(const std::string& msg) { throw Error(ErrorKind::validation, msg); }

inline void check(bool cond, const std::string& msg) {
    if (!cond) fail_internal(msg);
}

}  // namespace mrt
