#pragma once

#include <stdexcept>
#include <string>

namespace slelax {

// Base for all library errors; `code()` is a stable machine-readable tag.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& what)
        : std::runtime_error(code + ": " + what), code_(std::move(code)) {}
    const std::string& code() const { return code_; }

private:
    std::string code_;
};

#define SLELAX_ERROR(NAME)                                        \
    class NAME : public Error {                                   \
    public:                                                       \
        explicit NAME(const std::string& what = "")               \
            : Error(#NAME, what) {}                               \
    }

SLELAX_ERROR(ZeroMatrix);
SLELAX_ERROR(NotDiagonalizable);
SLELAX_ERROR(InvalidSpec);
SLELAX_ERROR(Stopped);
SLELAX_ERROR(StepRejected);
SLELAX_ERROR(IndexOutOfRange);
SLELAX_ERROR(DegenerateConfig);
SLELAX_ERROR(PoleHit);
SLELAX_ERROR(ZeroBirkhoff);
SLELAX_ERROR(InvariantViolated);
SLELAX_ERROR(ContourTooClose);
SLELAX_ERROR(ZeroRate);
SLELAX_ERROR(IllConditioned);
SLELAX_ERROR(DegenerateFit);
SLELAX_ERROR(InvalidConfig);
SLELAX_ERROR(StencilTooCoarse);
SLELAX_ERROR(DegenerateInput);
SLELAX_ERROR(UnknownColumn);

#undef SLELAX_ERROR

} // namespace slelax
