#pragma once

#include <stdexcept>
#include <string>

namespace contrarian {

enum class ErrorKind {
    malformed_input,   // unparseable or out-of-domain CSV content
    duplicate_cell,
    empty_input,
    out_of_range,      // a window or slice outside the panel's month range
    invalid_argument,
    degenerate,        // zero-variance series with nonzero mean
    insufficient_data  // too few cohorts / observations for inference
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace contrarian
