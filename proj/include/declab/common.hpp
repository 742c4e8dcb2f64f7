#pragma once
#include <stdexcept>
#include <string>

namespace declab {

enum class ErrorKind { Domain, Precondition, Cap, Range, Config, Convergence };

class Error : public std::runtime_error {
public:
    Error(ErrorKind k, const std::string& what) : std::runtime_error(what), kind_(k) {}
    ErrorKind kind() const { return kind_; }
private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind k, const std::string& msg) { throw Error(k, msg); }

inline const char* kind_name(ErrorKind k) {
    switch (k) {
        case ErrorKind::Domain: return "domain";
        case ErrorKind::Precondition: return "precondition";
        case ErrorKind::Cap: return "cap";
        case ErrorKind::Range: return "range";
        case ErrorKind::Config: return "config";
        case ErrorKind::Convergence: return "convergence";
    }
    return "unknown";
}

}  // namespace declab
