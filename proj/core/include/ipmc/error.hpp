#pragma once

#include <stdexcept>
#include <string>

namespace ipmc {

enum class ErrorKind {
    Domain,     // invalid parameter or configuration value
    Index,      // index outside its valid range
    Data,       // malformed or inconsistent data
    Numeric,    // numerical failure (singular solve, non-finite result)
    Estimation, // every estimation restart failed
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void throw_domain(const std::string& what) { throw Error(ErrorKind::Domain, what); }
[[noreturn]] inline void throw_data(const std::string& what) { throw Error(ErrorKind::Data, what); }
[[noreturn]] inline void throw_numeric(const std::string& what) { throw Error(ErrorKind::Numeric, what); }

/// Process exit code for an error kind: 2 config, 3 data, 4 numeric.
inline int exit_code_for(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::Domain:
    case ErrorKind::Index:
        return 2;
    case ErrorKind::Data:
        return 3;
    case ErrorKind::Numeric:
    case ErrorKind::Estimation:
        return 4;
    }
    return 4;
}

} // namespace ipmc
