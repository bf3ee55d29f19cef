#ifndef QTM_ERRORS_HPP
#define QTM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace qtm {

// Base class for all qtm error conditions.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// A symbol required to be strictly positive evaluates to <= 0 on the grid.
class NonPositiveSymbol : public Error {
public:
    explicit NonPositiveSymbol(const std::string& msg) : Error(msg) {}
};

// An iterative process failed to meet its tolerance within the iteration cap.
class NoConvergence : public Error {
public:
    explicit NoConvergence(const std::string& msg) : Error(msg) {}
};

// The grid range of a symbol leaves the domain of the requested scalar function.
class DomainError : public Error {
public:
    explicit DomainError(const std::string& msg) : Error(msg) {}
};

// A positive-definiteness precondition check failed.
class NotPositiveDefinite : public Error {
public:
    explicit NotPositiveDefinite(const std::string& msg) : Error(msg) {}
};

// Finite QT arithmetic broke the m/4 bandwidth/support rule.
class SupportOverflow : public Error {
public:
    explicit SupportOverflow(const std::string& msg) : Error(msg) {}
};

} // namespace qtm

#endif
