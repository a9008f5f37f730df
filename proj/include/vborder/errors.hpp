#pragma once

#include <stdexcept>
#include <string>

namespace vborder {

/// Base class of every error raised by the library. `name()` is the stable,
/// machine-readable error identifier reported by the CLI and the live service.
class Error : public std::runtime_error
{
public:
    Error(std::string name, const std::string& detail)
        : std::runtime_error(detail), name_(std::move(name)) { }

    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

#define VBORDER_DEFINE_ERROR(Type)                                  \
    class Type : public Error                                       \
    {                                                               \
    public:                                                         \
        explicit Type(const std::string& detail)                    \
            : Error(#Type, detail) { }                              \
    };

VBORDER_DEFINE_ERROR(OutOfBounds)
VBORDER_DEFINE_ERROR(SpecMismatch)
VBORDER_DEFINE_ERROR(ParseError)
VBORDER_DEFINE_ERROR(ValueError)
VBORDER_DEFINE_ERROR(GeometryError)
VBORDER_DEFINE_ERROR(DegenerateBorder)
VBORDER_DEFINE_ERROR(InvalidTransition)
VBORDER_DEFINE_ERROR(MissingMarker)
VBORDER_DEFINE_ERROR(CollisionError)
VBORDER_DEFINE_ERROR(ScenarioTimeout)
VBORDER_DEFINE_ERROR(SessionCancelled)

#undef VBORDER_DEFINE_ERROR

} // namespace vborder
