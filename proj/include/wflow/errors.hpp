#pragma once

#include <stdexcept>
#include <string>

namespace wflow {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed input file; carries the file path and 1-based line number.
struct ParseError : Error {
    ParseError(const std::string& path, int line, const std::string& what)
        : Error(path + ":" + std::to_string(line) + ": " + what), path(path), line(line) {}
    std::string path;
    int line;
};

/// A node has no in-service path to the slack.
struct ConnectivityError : Error {
    ConnectivityError(int node, const std::string& what) : Error(what), node(node) {}
    int node;
};

struct UnknownTieError : Error {
    using Error::Error;
};

struct DimensionError : Error {
    using Error::Error;
};

/// |v_k| fell below the short-circuit floor during assembly or residual evaluation.
struct ShortCircuitError : Error {
    ShortCircuitError(int node, const std::string& what) : Error(what), node(node) {}
    int node;
};

/// LU factorization hit a structurally or numerically singular pivot.
struct SingularMatrixError : Error {
    SingularMatrixError(int pivot, const std::string& what) : Error(what), pivot(pivot) {}
    int pivot;  // column of the offending pivot, -1 if unknown
};

/// A linear solve succeeded formally but the back-substituted residual was too large.
struct NumericalQualityError : Error {
    NumericalQualityError(double residual, const std::string& what)
        : Error(what), residual(residual) {}
    double residual;
};

/// Newton iteration failed hard (e.g. singular Jacobian); carries the iteration index.
struct SolverError : Error {
    SolverError(int iteration, const std::string& what) : Error(what), iteration(iteration) {}
    int iteration;
};

/// Two-bus load beyond the maximum power transfer point: no voltage solution exists.
struct InfeasibleLoadError : Error {
    using Error::Error;
};

struct OracleDivergenceError : Error {
    using Error::Error;
};

struct NonFiniteError : Error {
    using Error::Error;
};

}  // namespace wflow
