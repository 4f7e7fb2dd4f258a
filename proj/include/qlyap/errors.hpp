#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qlyap {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define QLYAP_DEFINE_ERROR(Name)                        \
    class Name : public Error {                         \
    public:                                             \
        explicit Name(const std::string& what)          \
            : Error(#Name ": " + what) {}               \
    }

QLYAP_DEFINE_ERROR(NonHermitianInput);
QLYAP_DEFINE_ERROR(DomainError);
QLYAP_DEFINE_ERROR(DimensionMismatch);
QLYAP_DEFINE_ERROR(KernelComponent);
QLYAP_DEFINE_ERROR(SymbolError);
QLYAP_DEFINE_ERROR(DegreeOverflow);
QLYAP_DEFINE_ERROR(ParseError);
QLYAP_DEFINE_ERROR(MapDomainError);
QLYAP_DEFINE_ERROR(MissingTime);
QLYAP_DEFINE_ERROR(InvalidModel);
QLYAP_DEFINE_ERROR(InsufficientSamples);
QLYAP_DEFINE_ERROR(TangentVanished);
QLYAP_DEFINE_ERROR(DerivationVanishes);
QLYAP_DEFINE_ERROR(ConfigError);
QLYAP_DEFINE_ERROR(ConfigParse);

#undef QLYAP_DEFINE_ERROR

/// Errors tied to a particular step of an iteration carry the step index.
class StepError : public Error {
public:
    StepError(const std::string& what, std::size_t step) : Error(what), step_(step) {}
    [[nodiscard]] std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

class SpectrumOutOfDomain : public StepError {
public:
    explicit SpectrumOutOfDomain(const std::string& what, std::size_t step = 0)
        : StepError("SpectrumOutOfDomain: " + what + " (step " + std::to_string(step) + ")", step) {}
};

class DomainEscape : public StepError {
public:
    DomainEscape(const std::string& what, std::size_t step)
        : StepError("DomainEscape: " + what + " (step " + std::to_string(step) + ")", step) {}
};

class ZeroDerivativeOnOrbit : public StepError {
public:
    explicit ZeroDerivativeOnOrbit(std::size_t step)
        : StepError("ZeroDerivativeOnOrbit: derivative vanishes at step " + std::to_string(step), step) {}
};

}  // namespace qlyap
