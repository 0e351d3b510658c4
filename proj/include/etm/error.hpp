#pragma once

#include <stdexcept>
#include <string>

namespace etm {

enum class ErrorKind {
    not_found,   // unknown rule / vertex / name
    contract,    // precondition or invariant violated by the caller
    resource,    // configured budget exceeded
    validation,  // rule or input data fails structural checks
    numeric,     // iteration failed to converge, search failed, etc.
};

struct Error : std::runtime_error {
    ErrorKind kind;
    Error(ErrorKind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
};

[[noreturn]] inline void fail(ErrorKind k, const std::string& msg) { throw Error(k, msg); }

}  // namespace etm
