#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cone {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the domain of a function (r <= 0, invalid scale factor, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Energy above the escape threshold: the outer turning point does not exist.
class UnboundedError : public Error {
public:
    using Error::Error;
};

/// Energy below the minimum of the effective potential.
class ForbiddenError : public Error {
public:
    using Error::Error;
};

/// Circular orbit where a non-circular one is required, or a vanishing derivative.
class DegenerateError : public Error {
public:
    using Error::Error;
};

/// Operation not defined for this potential or configuration.
class StructuralError : public Error {
public:
    using Error::Error;
};

/// Scale factor has no rational form, so no single-valued global integral exists.
class IrrationalScaleError : public Error {
public:
    using Error::Error;
};

/// The integrator stepped into the cone tip.
class TipCollisionError : public Error {
public:
    TipCollisionError(const std::string& what, std::size_t step_index)
        : Error(what), step_index_(step_index) {}

    std::size_t step_index() const noexcept { return step_index_; }

private:
    std::size_t step_index_;
};

}  // namespace cone
