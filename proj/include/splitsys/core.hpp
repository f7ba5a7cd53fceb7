#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "splitsys/geometry.hpp"
#include "splitsys/types.hpp"

namespace splitsys {

// Tallies of the expensive oracle calls; nT = a_evals + resolvent_evals.
// Atomic so the components of one iteration may be evaluated concurrently.
struct EvalCounters {
    std::atomic<std::int64_t> a_evals{0};
    std::atomic<std::int64_t> resolvent_evals{0};

    std::int64_t total() const {
        return a_evals.load(std::memory_order_relaxed) +
               resolvent_evals.load(std::memory_order_relaxed);
    }
};

// Point-to-point maximal monotone operator A. Monotonicity is assumed, not
// enforced; tests spot-check it on sampled pairs. Implementations must be
// deterministic and safe for concurrent read-only use.
class SingleValuedOperator {
public:
    virtual ~SingleValuedOperator() = default;
    virtual Vector eval(const Vector& x) const = 0;
    virtual Index dimension() const = 0;
};

// Point-to-set maximal monotone operator B, exposed through its resolvent
// (I + beta B)^{-1} and a bounded selection from B(y) (some u in B(y)
// with ||u|| <= R must exist). Both must be deterministic.
class SetValuedOperator {
public:
    virtual ~SetValuedOperator() = default;
    virtual Vector resolvent(const Vector& z, double beta) const = 0;
    virtual Vector select_bounded(const Vector& y, double R) const = 0;
    virtual Index dimension() const = 0;
};

struct OperatorPair {
    std::shared_ptr<const SingleValuedOperator> A;
    std::shared_ptr<const SetValuedOperator> B;
};

// The m pairs (A_i, B_i) sharing one ambient dimension, plus the projection
// set X (nonempty by the polyhedron's witness).
class InclusionSystem {
public:
    InclusionSystem(std::vector<OperatorPair> pairs, Polyhedron X)
        : pairs_(std::move(pairs)), X_(std::move(X)) {
        require(!pairs_.empty(), "InclusionSystem: need at least one pair");
        for (const OperatorPair& p : pairs_) {
            require(p.A != nullptr && p.B != nullptr,
                    "InclusionSystem: null operator");
            require(p.A->dimension() == n() && p.B->dimension() == n(),
                    "InclusionSystem: operator dimension mismatch");
        }
    }

    Index n() const { return X_.dimension(); }
    int m() const { return static_cast<int>(pairs_.size()); }

    const OperatorPair& pair(int i) const {
        require(i >= 0 && i < m(), "InclusionSystem: component index out of range");
        return pairs_[static_cast<std::size_t>(i)];
    }

    const Polyhedron& X() const { return X_; }

private:
    std::vector<OperatorPair> pairs_;
    Polyhedron X_;
};

// Forward-backward map J_i(x, beta) = (I + beta B_i)^{-1}(x - beta A_i(x)).
// Costs exactly one A evaluation and one resolvent application. a_out, when
// given, receives A_i(x) so callers can reuse it without a second evaluation.
inline Vector forward_backward(const InclusionSystem& sys, int i,
                               const Vector& x, double beta,
                               EvalCounters& counters,
                               Vector* a_out = nullptr) {
    require(i >= 0 && i < sys.m(), "forward_backward: component index out of range");
    require(std::isfinite(beta) && beta > 0.0, "forward_backward: beta must be positive");
    require_dim(x, sys.n(), "forward_backward");
    require_finite(x, "forward_backward input");

    const OperatorPair& p = sys.pair(i);
    Vector a = p.A->eval(x);
    counters.a_evals.fetch_add(1, std::memory_order_relaxed);
    require_dim(a, sys.n(), "forward_backward: A(x)");
    require_finite(a, "forward_backward: A(x)");

    Vector J = p.B->resolvent(x - beta * a, beta);
    counters.resolvent_evals.fetch_add(1, std::memory_order_relaxed);
    require_dim(J, sys.n(), "forward_backward: resolvent");
    require_finite(J, "forward_backward: resolvent");

    if (a_out != nullptr) *a_out = std::move(a);
    return J;
}

inline Vector forward_backward(const InclusionSystem& sys, int i,
                               const Vector& x, double beta) {
    EvalCounters scratch;
    return forward_backward(sys, i, x, beta, scratch);
}

// Componentwise fixed-point residuals ||x - J_i(x, beta)||, i = 0..m-1.
// x solves the system exactly when all entries vanish.
inline Vector residual(const InclusionSystem& sys, const Vector& x, double beta,
                       EvalCounters& counters) {
    Vector r(sys.m());
    for (int i = 0; i < sys.m(); ++i)
        r[i] = (x - forward_backward(sys, i, x, beta, counters)).norm();
    return r;
}

inline Vector residual(const InclusionSystem& sys, const Vector& x, double beta) {
    EvalCounters scratch;
    return residual(sys, x, beta, scratch);
}

// True iff max_i ||x - J_i(x, beta)|| <= tol. tol must be finite and positive.
inline bool verify_solution(const InclusionSystem& sys, const Vector& x,
                            double beta, double tol, EvalCounters& counters) {
    require(std::isfinite(tol) && tol > 0.0, "verify_solution: tol must be positive and finite");
    return residual(sys, x, beta, counters).maxCoeff() <= tol;
}

inline bool verify_solution(const InclusionSystem& sys, const Vector& x,
                            double beta, double tol) {
    EvalCounters scratch;
    return verify_solution(sys, x, beta, tol, scratch);
}

}  // namespace splitsys
