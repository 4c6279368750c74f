#pragma once

#include <stdexcept>
#include <string>

namespace foldcont {

/// Base class of every numerical failure raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SingularMatrix : public Error {
public:
    using Error::Error;
};

class NotSymmetric : public Error {
public:
    using Error::Error;
};

class NoConvergence : public Error {
public:
    using Error::Error;
};

/// Raised by morse_index when a coordinate sits on a switching hyperplane.
class OnCriticalBoundary : public Error {
public:
    using Error::Error;
};

/// gamma'(t) lies (numerically) in Ran DF(u); the fold tangent is undefined.
class TransversalityFailure : public Error {
public:
    using Error::Error;
};

/// The continuation step shrank to step_min without an accepted correction.
class NoProgress : public Error {
public:
    using Error::Error;
};

class EmptyDomain : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace foldcont
