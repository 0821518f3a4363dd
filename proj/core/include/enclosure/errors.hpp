#pragma once

#include <stdexcept>
#include <string>

namespace enclosure {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Scene validation.
class OverlapError : public Error { using Error::Error; };
class StabilityError : public Error { using Error::Error; };
class EmptyTauGrid : public Error { using Error::Error; };
class ConfigError : public Error { using Error::Error; };

// Kernels.
class DomainError : public Error { using Error::Error; };

// Solver.
class BoxTooSmall : public Error { using Error::Error; };

// Indicator.
class TimeWindowError : public Error { using Error::Error; };
class EmptyPatch : public Error { using Error::Error; };
class MissingAccumulator : public Error { using Error::Error; };

// Recovery.
class NoWindow : public Error { using Error::Error; };

// I/O.
class FormatError : public Error { using Error::Error; };

}  // namespace enclosure
