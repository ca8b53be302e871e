#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace matfun {

enum class Errc {
    singular_matrix,
    rank_deficient,
    not_converged,
    shape_mismatch,
    unsupported_order,
    step_too_large,
    insufficient_data,
    generation_failed,
    invalid_argument,
    parse_error,
};

inline const char* errc_name(Errc c)
{
    switch (c) {
    case Errc::singular_matrix: return "SingularMatrix";
    case Errc::rank_deficient: return "RankDeficient";
    case Errc::not_converged: return "NotConverged";
    case Errc::shape_mismatch: return "ShapeMismatch";
    case Errc::unsupported_order: return "UnsupportedOrder";
    case Errc::step_too_large: return "StepTooLarge";
    case Errc::insufficient_data: return "InsufficientData";
    case Errc::generation_failed: return "GenerationFailed";
    case Errc::invalid_argument: return "InvalidArgument";
    case Errc::parse_error: return "ParseError";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what, std::optional<int> step = std::nullopt)
        : std::runtime_error(what), code_(code), step_(step) {}

    Errc code() const noexcept { return code_; }
    // iteration index at which a solve failed, when known
    std::optional<int> step() const noexcept { return step_; }

private:
    Errc code_;
    std::optional<int> step_;
};

} // namespace matfun
