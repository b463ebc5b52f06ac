#pragma once

#include <stdexcept>
#include <string>

namespace hbc {

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define HBC_ERROR(Name)                                                   \
    class Name : public Error {                                           \
    public:                                                               \
        explicit Name(const std::string& msg) : Error(#Name ": " + msg) {} \
    }

HBC_ERROR(InvalidParams);
HBC_ERROR(ImaginarySaddle);
HBC_ERROR(NegativeMass);
HBC_ERROR(NoInstanton);
HBC_ERROR(GridTooSmall);
HBC_ERROR(InvalidWindow);
HBC_ERROR(IncompleteInput);
HBC_ERROR(NonPositivePropagator);
HBC_ERROR(SeparationFailure);
HBC_ERROR(NoCrossing);
HBC_ERROR(NonPositiveData);
HBC_ERROR(BreakdownError);
HBC_ERROR(EmptyInput);
HBC_ERROR(ValidationError);
HBC_ERROR(IoError);

#undef HBC_ERROR

// Carries the offending line and field so the driver can point at the config.
class ConfigParseError : public Error {
public:
    ConfigParseError(const std::string& msg, int line = 0, std::string field = {})
        : Error("ConfigParseError: " + msg), line_(line), field_(std::move(field)) {}
    int line() const { return line_; }
    const std::string& field() const { return field_; }

private:
    int line_;
    std::string field_;
};

}  // namespace hbc
