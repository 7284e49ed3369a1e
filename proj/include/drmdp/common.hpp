#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace drmdp {

using numvec = std::vector<double>;

enum class ErrorKind {
    Structural,   // dimension mismatches, malformed input
    NotCompact,   // a set that must be bounded is not
    Validation,   // a model failed its validation checks
    Solver,       // an LP ended in a non-optimal status
    Parse,        // model file syntax or schema error
    Guard,        // a combinatorial/size guard refused the request
    Convergence,  // iterative method hit its cap
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& msg) { throw Error(kind, msg); }

inline void require(bool cond, ErrorKind kind, const std::string& msg) {
    if (!cond) fail(kind, msg);
}

} // namespace drmdp
