#pragma once

#include <stdexcept>
#include <string>

namespace raceline {

// A numerical routine could not produce a usable result (failed
// factorization, non-finite objective, diverged iteration). The message
// carries the diagnostics collected at the failure point.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// A proposed curriculum violates changepoint ordering or the epoch range.
class CurriculumError : public std::runtime_error {
public:
    explicit CurriculumError(const std::string& what) : std::runtime_error(what) {}
};

// Operation applied to an object in the wrong state, e.g. stepping a
// terminated episode.
class StateError : public std::logic_error {
public:
    explicit StateError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace raceline
