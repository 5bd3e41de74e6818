#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace takens {

/// Base of every domain failure. `kind()` is the stable class name used in
/// CLI diagnostics and the exit-code table.
class Error : public std::runtime_error
{
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
    [[nodiscard]] virtual const char* kind() const noexcept = 0;
};

#define TAKENS_DEFINE_ERROR(Name)                                   \
    class Name : public Error                                       \
    {                                                               \
    public:                                                         \
        using Error::Error;                                         \
        [[nodiscard]] const char* kind() const noexcept override    \
        {                                                           \
            return #Name;                                           \
        }                                                           \
    };

TAKENS_DEFINE_ERROR(InvalidArgument)
TAKENS_DEFINE_ERROR(InsufficientData)
TAKENS_DEFINE_ERROR(DivergenceError)
TAKENS_DEFINE_ERROR(NoMaxima)
TAKENS_DEFINE_ERROR(NoScalingRegion)
TAKENS_DEFINE_ERROR(BadProjection)
TAKENS_DEFINE_ERROR(EmptyInput)
TAKENS_DEFINE_ERROR(IoError)

#undef TAKENS_DEFINE_ERROR

/// Ingestion failure pinned to a 1-based line of the input file.
class ParseError : public Error
{
public:
    ParseError(std::size_t line, const std::string& detail)
        : Error("line " + std::to_string(line) + ": " + detail), line_(line)
    {
    }
    [[nodiscard]] const char* kind() const noexcept override { return "ParseError"; }
    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

} // namespace takens
