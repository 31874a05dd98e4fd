#pragma once

#include <stdexcept>
#include <string>

namespace p2f {

// Every error carries a short machine-readable code used as the CLI prefix.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& what)
        : std::runtime_error(what), code_(std::move(code)) {}
    const std::string& code() const { return code_; }

private:
    std::string code_;
};

struct ContractError : Error {
    explicit ContractError(const std::string& w) : Error("contract", w) {}
};
struct ValidationError : Error {
    explicit ValidationError(const std::string& w) : Error("validation", w) {}
};
struct WindowError : Error {
    explicit WindowError(const std::string& w) : Error("window", w) {}
};
struct InfeasibleError : Error {
    explicit InfeasibleError(const std::string& w) : Error("infeasible", w) {}
};
struct InternalError : Error {
    explicit InternalError(const std::string& w) : Error("internal", w) {}
};

}  // namespace p2f
