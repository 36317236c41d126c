// Error taxonomy used across the library.

#pragma once

#include <stdexcept>
#include <string>

namespace rsvd {

struct SingularInput : std::runtime_error {
    explicit SingularInput(const std::string& what) : std::runtime_error(what) {}
};

struct BadWHat : std::runtime_error {
    explicit BadWHat(const std::string& what) : std::runtime_error(what) {}
};

struct NonRealTrace : std::runtime_error {
    explicit NonRealTrace(const std::string& what) : std::runtime_error(what) {}
};

struct StepTooLarge : std::runtime_error {
    explicit StepTooLarge(const std::string& what) : std::runtime_error(what) {}
};

struct BadMu : std::runtime_error {
    explicit BadMu(const std::string& what) : std::runtime_error(what) {}
};

struct NonGenericSpectrum : std::runtime_error {
    explicit NonGenericSpectrum(const std::string& what) : std::runtime_error(what) {}
};

struct DomainViolation : std::runtime_error {
    explicit DomainViolation(const std::string& what) : std::runtime_error(what) {}
};

struct SingularCauchy : std::runtime_error {
    explicit SingularCauchy(const std::string& what) : std::runtime_error(what) {}
};

struct OffSlice : std::runtime_error {
    explicit OffSlice(const std::string& what) : std::runtime_error(what) {}
};

struct DomainExit : std::runtime_error {
    DomainExit(double t, const std::string& what) : std::runtime_error(what), time(t) {}
    double time;
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace rsvd
