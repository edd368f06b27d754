#pragma once

#include <stdexcept>
#include <string>

namespace dgp {

enum class ErrorCode {
    InvalidArgument,
    ShapeMismatch,
    NonFinite,
    BadMagic,
    BadVersion,
    BadDtype,
    Truncated,
    Io,
    SolverFailure,
    Divergence,
    CflViolation,
};

// Every failure inside the library is raised as dgp::Error; the C API maps the
// code onto its status enum.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

inline void require(bool cond, ErrorCode code, const std::string& msg)
{
    if (!cond) throw Error(code, msg);
}

inline void require(bool cond, const std::string& msg)
{
    if (!cond) throw Error(ErrorCode::InvalidArgument, msg);
}

} // namespace dgp
