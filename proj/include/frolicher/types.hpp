#pragma once

#include <Eigen/Dense>
#include <complex>
#include <compare>
#include <map>
#include <stdexcept>
#include <string>

namespace frolicher {

using Cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RealMat = Eigen::MatrixXd;
using RealVec = Eigen::VectorXd;

/// Default numerical thresholds. Rank and kernel cutoffs are relative to the
/// largest singular value / eigenvalue; residual checks are scaled by the
/// operator norms involved.
struct Tolerances {
    double rank = 1e-9;      // singular values below rank * sigma_max count as zero
    double zero = 1e-10;     // identity residuals, scaled by (1 + operator norm)
    double subspace = 1e-8;  // projector Frobenius distance for subspace equality
};

inline Tolerances& tolerances() {
    static Tolerances t;
    return t;
}

struct Bidegree {
    int p = 0;
    int q = 0;
    auto operator<=>(const Bidegree&) const = default;
};

inline std::string to_string(Bidegree pq) {
    return "(" + std::to_string(pq.p) + "," + std::to_string(pq.q) + ")";
}

// ---------------------------------------------------------------------------
// Error hierarchy
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Shape or wiring inconsistency in the input data.
struct StructuralError : Error {
    using Error::Error;
};

/// Argument outside the operation's domain.
struct DomainError : Error {
    using Error::Error;
};

/// A stated precondition fails (reported with the offending residual).
struct PreconditionError : Error {
    using Error::Error;
};

/// The input lacks a capability the operation needs (e.g. conjugation).
struct CapabilityError : Error {
    using Error::Error;
};

struct ParseError : Error {
    int line = 0;
    int column = 0;
    ParseError(const std::string& msg, int line_, int column_)
        : Error("parse error at line " + std::to_string(line_) + ", column " +
                std::to_string(column_) + ": " + msg),
          line(line_),
          column(column_) {}
};

}  // namespace frolicher
