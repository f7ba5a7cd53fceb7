#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <utility>

namespace splitsys {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

// A call broke its contract: wrong dimensions, parameter outside its range.
class ContractViolation : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// NaN or Inf showed up where a finite value is required.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// An iterative projection ran out of sweeps. Carries the last iterate and the
// final per-sweep displacement for post-mortems.
class ConvergenceFailure : public std::runtime_error {
public:
    ConvergenceFailure(const std::string& what, Vector last_iterate,
                       double last_displacement, long sweeps)
        : std::runtime_error(what),
          last_iterate(std::move(last_iterate)),
          last_displacement(last_displacement),
          sweeps(sweeps) {}

    Vector last_iterate;
    double last_displacement;
    long sweeps;
};

// The Armijo inner loop exceeded j_max. Theory guarantees a finite j, so this
// signals an operator-contract violation or a misconfigured tolerance.
class LineSearchFailure : public std::runtime_error {
public:
    LineSearchFailure(const std::string& what, int j_max)
        : std::runtime_error(what), j_max(j_max) {}

    int j_max;
};

inline void require(bool cond, const char* msg) {
    if (!cond) throw ContractViolation(msg);
}

inline void require_finite(const Vector& v, const char* where) {
    if (!v.allFinite())
        throw NumericError(std::string(where) + ": non-finite entry");
}

inline void require_finite_matrix(const Matrix& m, const char* where) {
    if (!m.allFinite())
        throw ContractViolation(std::string(where) + ": entries must be finite");
}

inline void require_dim(const Vector& v, Index n, const char* where) {
    if (v.size() != n)
        throw ContractViolation(std::string(where) + ": dimension mismatch");
}

}  // namespace splitsys
