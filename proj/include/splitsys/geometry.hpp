#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include "splitsys/types.hpp"

namespace splitsys {

// Normals at or below this length make a halfspace degenerate (all of R^n).
inline constexpr double kDegenerateNormalTol = 1e-14;

// {y : <normal, y - anchor> <= 0}. Anchored form; the offset representation
// <normal, y> <= <normal, anchor> is produced only inside the QP kernel so
// that separation tests stay exact at the anchor.
struct Halfspace {
    Vector normal;
    Vector anchor;
    bool degenerate = false;
};

// Halfspace with normal a_val + u anchored at xbar.
inline Halfspace build_halfspace(const Vector& a_val, const Vector& u,
                                 const Vector& xbar) {
    require(a_val.size() == u.size() && u.size() == xbar.size(),
            "build_halfspace: dimension mismatch");
    Halfspace h;
    h.normal = a_val + u;
    h.anchor = xbar;
    h.degenerate = h.normal.norm() <= kDegenerateNormalTol;
    return h;
}

// <normal, y - anchor>; nonpositive inside the halfspace.
inline double halfspace_slack(const Halfspace& h, const Vector& y) {
    return h.normal.dot(y - h.anchor);
}

// Closed-form projection: x - max(0, <g, x - anchor>) / ||g||^2 * g.
inline Vector project_halfspace(const Vector& x, const Halfspace& h) {
    require(x.size() == h.anchor.size(), "project_halfspace: dimension mismatch");
    if (h.degenerate) return x;
    const double viol = h.normal.dot(x - h.anchor);
    if (viol <= 0.0) return x;
    return x - (viol / h.normal.squaredNorm()) * h.normal;
}

// {x : A x <= b}, nonemptiness certified by a stored witness point.
class Polyhedron {
public:
    static constexpr double kWitnessTol = 1e-10;

    Polyhedron(Matrix A, Vector b, Vector witness)
        : A_(std::move(A)), b_(std::move(b)), witness_(std::move(witness)) {
        validate();
    }

    // Uses the origin as witness; throws if it is infeasible.
    Polyhedron(Matrix A, Vector b) : A_(std::move(A)), b_(std::move(b)) {
        witness_ = Vector::Zero(A_.cols());
        validate();
    }

    // One vacuous row 0^T x <= 1: the whole space as a polyhedron.
    static Polyhedron whole_space(Index n) {
        return Polyhedron(Matrix::Zero(1, n), Vector::Ones(1));
    }

    // |x_i| <= radius componentwise, as 2n rows.
    static Polyhedron centered_box(Index n, double radius) {
        require(radius > 0.0, "Polyhedron::centered_box: radius must be positive");
        Matrix A(2 * n, n);
        A << Matrix::Identity(n, n), -Matrix::Identity(n, n);
        return Polyhedron(std::move(A), Vector::Constant(2 * n, radius));
    }

    const Matrix& lhs() const { return A_; }
    const Vector& rhs() const { return b_; }
    const Vector& witness() const { return witness_; }
    Index dimension() const { return A_.cols(); }
    Index rows() const { return A_.rows(); }

    double max_violation(const Vector& y) const {
        return (A_ * y - b_).maxCoeff();
    }

    bool contains(const Vector& y, double tol) const {
        return max_violation(y) <= tol;
    }

private:
    void validate() const {
        require(A_.rows() >= 1, "Polyhedron: need at least one row");
        require(A_.rows() == b_.size(), "Polyhedron: row count mismatch");
        require(witness_.size() == A_.cols(), "Polyhedron: witness dimension mismatch");
        if (!A_.allFinite() || !b_.allFinite())
            throw NumericError("Polyhedron: non-finite data");
        if (max_violation(witness_) > kWitnessTol)
            throw ContractViolation("Polyhedron: witness point is infeasible");
    }

    Matrix A_;
    Vector b_;
    Vector witness_;
};

namespace detail {

// Hildreth dual coordinate ascent for the least-distance problem
//     min ||y - x||  s.t.  A y <= b.
// Maintains y = x - A^T lambda with lambda >= 0, sweeping rows cyclically.
// Stops once the per-sweep displacement falls to tol/10 and the iterate is
// feasible within tol. Vacuous (zero) rows are skipped.
inline Vector hildreth_least_distance(const Vector& x, const Matrix& A,
                                      const Vector& b, double tol,
                                      long max_sweeps) {
    require(std::isfinite(tol) && tol > 0.0, "projection: tol must be positive");
    require(max_sweeps >= 1, "projection: max_sweeps must be >= 1");
    require(A.cols() == x.size() && A.rows() == b.size(),
            "projection: dimension mismatch");
    require_finite(x, "projection input");

    const Index l = A.rows();
    Vector row_sq(l);
    for (Index i = 0; i < l; ++i) row_sq[i] = A.row(i).squaredNorm();

    Vector y = x;
    Vector y_before(x.size());
    Vector lambda = Vector::Zero(l);
    const double disp_tol = tol / 10.0;
    double disp = std::numeric_limits<double>::infinity();

    for (long sweep = 0; sweep < max_sweeps; ++sweep) {
        y_before = y;
        for (Index i = 0; i < l; ++i) {
            if (row_sq[i] <= kDegenerateNormalTol * kDegenerateNormalTol) continue;
            const double slack = A.row(i).dot(y) - b[i];
            const double next = std::max(0.0, lambda[i] + slack / row_sq[i]);
            const double delta = next - lambda[i];
            if (delta != 0.0) {
                y.noalias() -= delta * A.row(i).transpose();
                lambda[i] = next;
            }
        }
        disp = (y - y_before).norm();
        if (disp <= disp_tol && (A * y - b).maxCoeff() <= tol) {
            require_finite(y, "projection output");
            return y;
        }
    }
    throw ConvergenceFailure("projection: sweep limit exceeded", y, disp,
                             max_sweeps);
}

}  // namespace detail

// Euclidean projection onto the polyhedron, within tol.
inline Vector project_polyhedron(const Vector& x, const Polyhedron& P,
                                 double tol = 1e-8, long max_sweeps = 100000) {
    require(x.size() == P.dimension(), "project_polyhedron: dimension mismatch");
    return detail::hildreth_least_distance(x, P.lhs(), P.rhs(), tol, max_sweeps);
}

// Euclidean projection onto the intersection of the halfspaces. Degenerate
// members are dropped; an empty list projects to x itself; a single halfspace
// takes the closed form, so it matches project_halfspace exactly.
inline Vector project_intersection(const Vector& x,
                                   const std::vector<Halfspace>& halfspaces,
                                   double tol = 1e-8, long max_sweeps = 100000) {
    std::vector<const Halfspace*> live;
    live.reserve(halfspaces.size());
    for (const Halfspace& h : halfspaces) {
        if (h.degenerate) continue;
        require(h.normal.size() == x.size(),
                "project_intersection: dimension mismatch");
        live.push_back(&h);
    }
    if (live.empty()) return x;
    if (live.size() == 1) return project_halfspace(x, *live.front());

    const Index rows = static_cast<Index>(live.size());
    Matrix A(rows, x.size());
    Vector b(rows);
    for (Index j = 0; j < rows; ++j) {
        A.row(j) = live[static_cast<std::size_t>(j)]->normal.transpose();
        b[j] = live[static_cast<std::size_t>(j)]->normal.dot(
            live[static_cast<std::size_t>(j)]->anchor);
    }
    return detail::hildreth_least_distance(x, A, b, tol, max_sweeps);
}

}  // namespace splitsys
