#pragma once

#include <stdexcept>
#include <string>

namespace kirchhoff {

// Mesh mismatch, missing snapshot data, malformed inputs.
class StructuralError : public std::invalid_argument {
public:
    explicit StructuralError(const std::string& what) : std::invalid_argument(what) {}
};

// Zero field where a ray is required, undefined fiber root, and similar.
class DegenerateInputError : public std::invalid_argument {
public:
    explicit DegenerateInputError(const std::string& what) : std::invalid_argument(what) {}
};

// Solver breakdown, non-convergence past all fallbacks. Carries diagnostics in what().
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace kirchhoff
