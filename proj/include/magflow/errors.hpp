#pragma once

#include <stdexcept>
#include <string>

namespace magflow {

/// Base of every precondition failure raised by the library. `kind()` is the
/// stable machine-readable tag the CLI puts in its error object.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define MAGFLOW_DEFINE_ERROR(Name)                                          \
    class Name : public Error {                                             \
    public:                                                                 \
        explicit Name(const std::string& what) : Error(#Name, what) {}      \
    }

MAGFLOW_DEFINE_ERROR(DomainError);
MAGFLOW_DEFINE_ERROR(IntegralityError);
MAGFLOW_DEFINE_ERROR(RegimeError);
MAGFLOW_DEFINE_ERROR(RangeError);
MAGFLOW_DEFINE_ERROR(IndexError);
MAGFLOW_DEFINE_ERROR(ReductionError);
MAGFLOW_DEFINE_ERROR(SamplingError);
MAGFLOW_DEFINE_ERROR(FitError);
MAGFLOW_DEFINE_ERROR(QuadratureError);
MAGFLOW_DEFINE_ERROR(StepOverflowError);
MAGFLOW_DEFINE_ERROR(OverflowError);
MAGFLOW_DEFINE_ERROR(ConfigError);

#undef MAGFLOW_DEFINE_ERROR

}  // namespace magflow
