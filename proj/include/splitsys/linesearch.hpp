#pragma once

#include <cmath>
#include <limits>
#include <utility>

#include "splitsys/core.hpp"
#include "splitsys/types.hpp"

namespace splitsys {

// Outcome of one Armijo search. alpha = theta^j exactly (running product),
// xbar = alpha*J + (1-alpha)*x, ubar the bounded selection at xbar, and
// a_at_xbar = A(xbar) from the accepted trial so callers can build the
// separating halfspace without re-evaluating A.
struct LineSearchResult {
    double alpha = 1.0;
    int j = 0;
    Vector xbar;
    Vector ubar;
    Vector a_at_xbar;
    long a_evals = 0;  // trials consumed, = j + 1

    // Accepted trial's inequality sides, and the sides of trial j-1 (NaN when
    // j == 0). Tests assert acceptance and minimality from these.
    double accepted_lhs = 0.0;
    double accepted_rhs = 0.0;
    double rejected_lhs = std::numeric_limits<double>::quiet_NaN();
    double rejected_rhs = std::numeric_limits<double>::quiet_NaN();
};

// Backtracking search over trial points y_j = theta^j J + (1 - theta^j) x:
// accepts the smallest j in {0..j_max} with
//     <A(y_j) + u_j, x - J>  >=  (delta / beta) ||x - J||^2,
// where u_j = B.select_bounded(y_j, R). Every trial consumes one A
// evaluation and one bounded selection.
inline LineSearchResult armijo_search(const SingleValuedOperator& A,
                                      const SetValuedOperator& B,
                                      const Vector& x, const Vector& J,
                                      double beta, double theta, double delta,
                                      double R, int j_max,
                                      EvalCounters& counters) {
    require(x.size() == J.size(), "armijo_search: dimension mismatch");
    require(std::isfinite(beta) && beta > 0.0, "armijo_search: beta must be positive");
    require(theta > 0.0 && theta < 1.0, "armijo_search: theta must lie in (0,1)");
    require(delta > 0.0 && delta < 1.0, "armijo_search: delta must lie in (0,1)");
    require(std::isfinite(R) && R > 0.0, "armijo_search: R must be positive");
    require(j_max >= 0, "armijo_search: j_max must be nonnegative");
    require_finite(x, "armijo_search x");
    require_finite(J, "armijo_search J");

    const Vector d = x - J;
    const double dist_sq = d.squaredNorm();
    require(dist_sq > 0.0, "armijo_search: x equals J (caller excludes solved components)");
    const double rhs = (delta / beta) * dist_sq;

    double alpha = 1.0;
    double prev_lhs = std::numeric_limits<double>::quiet_NaN();
    double prev_rhs = std::numeric_limits<double>::quiet_NaN();

    for (int j = 0; j <= j_max; ++j) {
        Vector y = alpha * J + (1.0 - alpha) * x;
        Vector u = B.select_bounded(y, R);
        require_dim(u, x.size(), "armijo_search: selection");
        require_finite(u, "armijo_search: selection");
        if (u.norm() > R * (1.0 + 1e-12))
            throw ContractViolation("armijo_search: selection exceeds the R ball");

        Vector a = A.eval(y);
        counters.a_evals.fetch_add(1, std::memory_order_relaxed);
        require_dim(a, x.size(), "armijo_search: A(y)");
        require_finite(a, "armijo_search: A(y)");

        const double lhs = (a + u).dot(d);
        if (lhs >= rhs) {
            LineSearchResult res;
            res.alpha = alpha;
            res.j = j;
            res.xbar = std::move(y);
            res.ubar = std::move(u);
            res.a_at_xbar = std::move(a);
            res.a_evals = j + 1;
            res.accepted_lhs = lhs;
            res.accepted_rhs = rhs;
            res.rejected_lhs = prev_lhs;
            res.rejected_rhs = prev_rhs;
            return res;
        }
        prev_lhs = lhs;
        prev_rhs = rhs;
        alpha *= theta;
    }
    throw LineSearchFailure("armijo_search: no trial accepted within j_max", j_max);
}

}  // namespace splitsys
