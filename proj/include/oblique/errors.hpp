#pragma once

#include <stdexcept>
#include <string>

namespace oblique {

// Exit-code classes: usage problems map to 2, numerical problems to 1.
enum class ErrorClass { usage, numerical };

class Error : public std::runtime_error {
public:
    Error(ErrorClass cls, const std::string& what) : std::runtime_error(what), cls_(cls) {}
    ErrorClass error_class() const noexcept { return cls_; }

private:
    ErrorClass cls_;
};

struct ParameterError : Error {
    explicit ParameterError(const std::string& w) : Error(ErrorClass::usage, w) {}
};

struct ConfigurationError : Error {
    explicit ConfigurationError(const std::string& w) : Error(ErrorClass::usage, w) {}
};

struct DomainError : Error {
    explicit DomainError(const std::string& w) : Error(ErrorClass::numerical, w) {}
};

struct SingularityError : Error {
    explicit SingularityError(const std::string& w) : Error(ErrorClass::numerical, w) {}
};

struct ResolutionError : Error {
    explicit ResolutionError(const std::string& w) : Error(ErrorClass::numerical, w) {}
};

struct DivergenceError : Error {
    explicit DivergenceError(const std::string& w) : Error(ErrorClass::numerical, w) {}
};

struct NumericalInstabilityError : Error {
    explicit NumericalInstabilityError(const std::string& w) : Error(ErrorClass::numerical, w) {}
};

struct InconsistencyError : Error {
    explicit InconsistencyError(const std::string& w) : Error(ErrorClass::numerical, w) {}
};

struct PoleProximityError : Error {
    PoleProximityError(const std::string& w, double nearest)
        : Error(ErrorClass::numerical, w), nearest_eigenvalue(nearest) {}
    double nearest_eigenvalue;
};

}  // namespace oblique
