#pragma once

#include <stdexcept>
#include <string>

namespace pmp {

enum class ErrCode {
    Usage,       // bad command / bad invocation
    Config,      // invalid or missing config key
    Io,          // file not found / unreadable / unwritable
    Schema,      // CSV header missing a required column
    Track,       // malformed vehicle track (non-monotone frames)
    Lookup,      // vehicle/frame not present
    Boundary,    // insufficient history or future for a windowed operation
    Data,        // empty or degenerate dataset
    Shape,       // tensor / parameter dimension mismatch
    Domain,      // numeric argument outside its valid range
    Dependency,  // required checkpoint or model missing
    Protocol,    // API called out of order (e.g. step after done)
    Internal,
};

const char* err_code_name(ErrCode c);

class Error : public std::runtime_error {
public:
    Error(ErrCode code, const std::string& msg)
        : std::runtime_error(std::string(err_code_name(code)) + ": " + msg), code_(code) {}

    ErrCode code() const { return code_; }

private:
    ErrCode code_;
};

}  // namespace pmp
