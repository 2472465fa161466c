#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nsar {

enum class Errc {
    mean_out_of_range,
    ambiguous_top_m,
    bad_dimensions,
    bad_shape_params,
    bad_arm_index,
    bad_exponent,
    budget_too_small,
    not_single_arm,
    degenerate_m,
    bad_setup_id,
    bad_counts,
    bad_config,
    io_error,
};

inline constexpr std::string_view to_string(Errc code) {
    switch (code) {
    case Errc::mean_out_of_range: return "MeanOutOfRange";
    case Errc::ambiguous_top_m: return "AmbiguousTopM";
    case Errc::bad_dimensions: return "BadDimensions";
    case Errc::bad_shape_params: return "BadShapeParams";
    case Errc::bad_arm_index: return "BadArmIndex";
    case Errc::bad_exponent: return "BadExponent";
    case Errc::budget_too_small: return "BudgetTooSmall";
    case Errc::not_single_arm: return "NotSingleArm";
    case Errc::degenerate_m: return "DegenerateM";
    case Errc::bad_setup_id: return "BadSetupId";
    case Errc::bad_counts: return "BadCounts";
    case Errc::bad_config: return "BadConfig";
    case Errc::io_error: return "IoError";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

} // namespace nsar
