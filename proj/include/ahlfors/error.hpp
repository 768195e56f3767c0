#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ahlfors {

enum class Errc {
    invalid_argument,
    resolution_too_coarse,
    construction_degenerate,
    space_not_connected,
};

[[nodiscard]] constexpr std::string_view to_string(Errc code) noexcept
{
    switch (code) {
    case Errc::invalid_argument: return "invalid-argument";
    case Errc::resolution_too_coarse: return "resolution-too-coarse";
    case Errc::construction_degenerate: return "construction-degenerate";
    case Errc::space_not_connected: return "space-not-connected";
    }
    return "unknown";
}

// Every failure raised by the library carries one of the codes above; the
// message is prefixed with the code name so CLI output stays greppable.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what)
        , code_(code)
    {
    }

    [[nodiscard]] Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

namespace detail {

    inline void require(bool condition, Errc code, const std::string& what)
    {
        if (!condition)
            throw Error(code, what);
    }

} // namespace detail

} // namespace ahlfors
