#pragma once

#include <stdexcept>
#include <string>

namespace lavp {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Scenario / map validation.
class InvalidMap : public Error { using Error::Error; };
class SpotOutOfBounds : public Error { using Error::Error; };
class SpotOnObstacle : public Error { using Error::Error; };
class DuplicateSpot : public Error { using Error::Error; };
class EmptyUserList : public Error { using Error::Error; };

// Episode dynamics.
class NonAdjacentCells : public Error { using Error::Error; };
class EpisodeAlreadyDone : public Error { using Error::Error; };

// Search.
class Unreachable : public Error { using Error::Error; };
class MissingPairPath : public Error { using Error::Error; };
class TooManyUsers : public Error { using Error::Error; };

// Learning.
class ShapeMismatch : public Error { using Error::Error; };
class InsufficientExperience : public Error { using Error::Error; };

// I/O.
class ParseError : public Error { using Error::Error; };

} // namespace lavp
