#pragma once

// Brute-force reference for Euclidean projection onto {y : Ay <= b}, kept
// deliberately independent of the library's Hildreth solver. Every subset of
// rows is treated as a candidate active set: project x onto the affine set
// where those rows hold with equality, discard candidates that are infeasible
// or whose equality system is inconsistent, and keep the closest survivor.
// The true projection's active set is among the subsets, so the minimum is
// exact. Only usable for small row counts.

#include <Eigen/Dense>
#include <limits>
#include <optional>
#include <vector>

namespace oracle {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline std::optional<Vector> project_enumerate(const Vector& x, const Matrix& A,
                                               const Vector& b,
                                               double feas_tol = 1e-9) {
    const int rows = static_cast<int>(A.rows());
    std::optional<Vector> best;
    double best_dist = std::numeric_limits<double>::infinity();
    for (unsigned mask = 0; mask < (1u << rows); ++mask) {
        std::vector<int> active;
        for (int r = 0; r < rows; ++r)
            if (mask & (1u << r)) active.push_back(r);

        Vector y;
        if (active.empty()) {
            y = x;
        } else {
            Matrix as(static_cast<Eigen::Index>(active.size()), A.cols());
            Vector bs(static_cast<Eigen::Index>(active.size()));
            for (std::size_t q = 0; q < active.size(); ++q) {
                as.row(static_cast<Eigen::Index>(q)) = A.row(active[q]);
                bs[static_cast<Eigen::Index>(q)] = b[active[q]];
            }
            // min ||y - x|| s.t. as*y = bs: y = x - as^T lam with
            // (as*as^T) lam = as*x - bs; COD handles rank deficiency.
            Eigen::CompleteOrthogonalDecomposition<Matrix> cod(as * as.transpose());
            const Vector lam = cod.solve(as * x - bs);
            y = x - as.transpose() * lam;
            if ((as * y - bs).lpNorm<Eigen::Infinity>() > 1e-8) continue;
        }
        if ((A * y - b).maxCoeff() > feas_tol) continue;
        const double dist = (y - x).norm();
        if (dist < best_dist) {
            best_dist = dist;
            best = y;
        }
    }
    return best;
}

}  // namespace oracle
