#ifndef CFIKIT_ERRORS_HPP
#define CFIKIT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace cfikit {

// Every failure the library raises deliberately carries one of these kinds so
// callers (in particular the CLI) can map it to an exit code without string
// matching.  verification = a checked mathematical claim failed to hold;
// budget = an explicit resource cap was exceeded; the rest are caller errors.
enum class ErrorKind {
    precondition,
    arity,
    domain,
    budget,
    generation,
    verification,
    query,
    unsupported,
    io,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string & message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

inline void require(bool cond, ErrorKind kind, const std::string & message) {
    if (! cond) throw Error(kind, message);
}

} // namespace cfikit

#endif
