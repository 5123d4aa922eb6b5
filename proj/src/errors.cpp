#include "gradstorm/errors.hpp"

namespace gradstorm {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::Config: return "ConfigError";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::DivergentIntegral: return "DivergentIntegral";
        case ErrorKind::NonConvergent: return "NonConvergent";
        case ErrorKind::LimitNotReached: return "LimitNotReached";
        case ErrorKind::Pole: return "PoleError";
        case ErrorKind::SingularTime: return "SingularTime";
        case ErrorKind::MultiRoot: return "MultiRoot";
        case ErrorKind::NoRoot: return "NoRoot";
        case ErrorKind::EnvelopeViolation: return "EnvelopeViolation";
    }
    return "Error";
}

}  // namespace gradstorm
