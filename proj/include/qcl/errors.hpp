#pragma once

#include <stdexcept>
#include <string>

namespace qcl {

// Exit codes used by the CLI; every library error carries one.
enum class ErrorKind { Precondition = 2, Budget = 3, Verification = 4 };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const { return kind_; }
    int exit_code() const { return static_cast<int>(kind_); }

private:
    ErrorKind kind_;
};

struct PreconditionError : Error {
    explicit PreconditionError(const std::string& w) : Error(ErrorKind::Precondition, w) {}
};

struct BudgetError : Error {
    explicit BudgetError(const std::string& w) : Error(ErrorKind::Budget, w) {}
};

struct VerificationError : Error {
    explicit VerificationError(const std::string& w) : Error(ErrorKind::Verification, w) {}
};

inline void require(bool cond, const std::string& what) {
    if (!cond) throw PreconditionError(what);
}

}  // namespace qcl
