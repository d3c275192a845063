#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace zipform {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input text (PDB records, JSON documents, CLI values).
struct ParseError : Error { using Error::Error; };

// Inconsistent arguments or configuration.
struct ArgumentError : Error { using Error::Error; };

// Molecular model violates a structural requirement (duplicate atoms,
// missing backbone, missing core chain, ...).
struct StructureError : Error { using Error::Error; };

// Addressed chain/residue/atom does not exist.
struct LookupError : Error { using Error::Error; };

// Function input outside the mathematical domain (r <= 0, w = 0, ...).
struct DomainError : Error { using Error::Error; };

// Objective could not be evaluated (coincident atoms, non-finite result).
struct EvaluationError : Error { using Error::Error; };

// Optimizer failed in a way that has no useful result.
struct OptimizeError : Error { using Error::Error; };

// Optimizer hit a non-finite value; carries the last good iterate.
struct DivergenceError : OptimizeError {
    DivergenceError(const std::string& what, std::vector<double> x, double f)
        : OptimizeError(what), last_x(std::move(x)), last_f(f) {}
    std::vector<double> last_x;
    double last_f;
};

// Filesystem / output formatting failures.
struct IoError : Error { using Error::Error; };
struct FormatError : IoError { using IoError::IoError; };

// Template fetch failures.
struct NetworkError : Error { using Error::Error; };

}  // namespace zipform
