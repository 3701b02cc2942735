#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace remfiber {

enum class ErrorKind {
    Config,          // invalid input or configuration
    Domain,          // precondition violated by otherwise well-formed input
    Nonconvergence,  // a numeric procedure failed to converge
    Internal,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class ParseError : public Error {
public:
    ParseError(std::size_t position, const std::string& what)
        : Error(ErrorKind::Config,
                what + " at position " + std::to_string(position)),
          position_(position) {}

    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

inline Error domain_error(const std::string& what) {
    return Error(ErrorKind::Domain, what);
}

inline Error config_error(const std::string& what) {
    return Error(ErrorKind::Config, what);
}

inline Error nonconvergence_error(const std::string& what) {
    return Error(ErrorKind::Nonconvergence, what);
}

}  // namespace remfiber
