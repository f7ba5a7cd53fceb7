#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <future>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "splitsys/core.hpp"
#include "splitsys/geometry.hpp"
#include "splitsys/linesearch.hpp"
#include "splitsys/types.hpp"

namespace splitsys {

enum class Outcome { Converged, FixedPoint, MaxIterations, Error };

inline const char* to_string(Outcome o) {
    switch (o) {
        case Outcome::Converged: return "Converged";
        case Outcome::FixedPoint: return "FixedPoint";
        case Outcome::MaxIterations: return "MaxIterations";
        case Outcome::Error: return "Error";
    }
    return "Unknown";
}

struct SolverConfig {
    double delta = 0.1;
    double theta = 0.5;

    // beta_k stays in [beta_lo, beta_hi]; an empty schedule means the
    // constant beta_lo. beta_at throws if a user schedule leaves the band.
    double beta_lo = 1.0;
    double beta_hi = 1.0;
    std::function<double(long)> beta_schedule;

    double R = 1.0;
    double eps_res = 1e-10;   // residual stop: every ||x - J_i|| <= eps_res
    double eps_fix = 0.0;     // fixed-point stop: ||x_next - x|| <= eps_fix
    double eps_proj = 1e-10;  // projection tolerance inside the solve
    long proj_max_sweeps = 100000;
    int j_max = 100;
    long k_max = 100000;

    // Known solution: stop once ||x^k - target|| <= target_radius. Used for
    // benchmark parity; library use defaults to the residual criteria.
    std::optional<Vector> target;
    double target_radius = 1e-3;

    long trace_stride = 1;  // record every stride-th iteration (terminal ones always)
    bool concurrent = false;

    double beta_at(long k) const {
        const double b = beta_schedule ? beta_schedule(k) : beta_lo;
        if (!(std::isfinite(b) && b >= beta_lo && b <= beta_hi))
            throw ContractViolation("SolverConfig: beta schedule left [beta_lo, beta_hi]");
        return b;
    }

    void validate(Index n) const {
        require(delta > 0.0 && delta < 1.0, "SolverConfig: delta must lie in (0,1)");
        require(theta > 0.0 && theta < 1.0, "SolverConfig: theta must lie in (0,1)");
        require(std::isfinite(beta_lo) && std::isfinite(beta_hi) &&
                    beta_lo > 0.0 && beta_lo <= beta_hi,
                "SolverConfig: need 0 < beta_lo <= beta_hi < inf");
        require(std::isfinite(R) && R > 0.0, "SolverConfig: R must be positive");
        require(std::isfinite(eps_res) && eps_res > 0.0, "SolverConfig: eps_res must be positive");
        require(std::isfinite(eps_fix) && eps_fix >= 0.0, "SolverConfig: eps_fix must be nonnegative");
        require(std::isfinite(eps_proj) && eps_proj > 0.0, "SolverConfig: eps_proj must be positive");
        require(proj_max_sweeps >= 1, "SolverConfig: proj_max_sweeps must be >= 1");
        require(j_max >= 0, "SolverConfig: j_max must be nonnegative");
        require(k_max >= 1, "SolverConfig: k_max must be >= 1");
        require(trace_stride >= 1, "SolverConfig: trace_stride must be >= 1");
        if (target) {
            require(target->size() == n, "SolverConfig: target dimension mismatch");
            require(std::isfinite(target_radius) && target_radius > 0.0,
                    "SolverConfig: target_radius must be positive");
        }
    }
};

// Cyclic component selector (1-based): rem(k, m) when nonzero, else m.
inline int rho(long k, int m) {
    require(m >= 1, "rho: m must be positive");
    require(k >= 0, "rho: k must be nonnegative");
    const long r = k % m;
    return r == 0 ? m : static_cast<int>(r);
}

// Line-search and halfspace diagnostics for one processed component.
struct ComponentDiag {
    int index = -1;  // 0-based component
    int j = -1;
    double alpha = std::numeric_limits<double>::quiet_NaN();
    double accepted_lhs = std::numeric_limits<double>::quiet_NaN();
    double accepted_rhs = std::numeric_limits<double>::quiet_NaN();
    double rejected_lhs = std::numeric_limits<double>::quiet_NaN();
    double rejected_rhs = std::numeric_limits<double>::quiet_NaN();
    double ubar_norm = std::numeric_limits<double>::quiet_NaN();
    Halfspace halfspace;  // normal A(xbar) + ubar anchored at xbar
};

struct IterationRecord {
    long k = 0;
    Vector x;          // iterate at the start of iteration k
    Vector residuals;  // ||x - J_i||; NaN where not computed this iteration
    std::vector<int> active_set;  // components currently at their fixed point
    std::vector<ComponentDiag> searches;
    std::int64_t a_evals = 0;          // consumed since the previous recorded row
    std::int64_t resolvent_evals = 0;  // consumed since the previous recorded row
    double step_norm = 0.0;            // ||x^{k+1} - x^k||
    double fejer_dist = std::numeric_limits<double>::quiet_NaN();  // ||x^k - target||

    std::vector<double> alphas() const {
        std::vector<double> out;
        out.reserve(searches.size());
        for (const ComponentDiag& d : searches) out.push_back(d.alpha);
        return out;
    }
};

struct TraceTotals {
    long iterations = 0;  // k at which the stop fired (k_max when capped)
    std::int64_t a_evals = 0;
    std::int64_t resolvent_evals = 0;
    std::int64_t nT = 0;  // a_evals + resolvent_evals
    double wall_seconds = 0.0;
};

struct IterationTrace {
    std::vector<IterationRecord> records;
    Outcome outcome = Outcome::Error;
    Vector final_x;
    TraceTotals totals;
    std::vector<std::string> warnings;
    std::string error_message;
    long error_k = -1;
};

namespace detail {

// Runs fn(i) for i = 0..count-1, optionally on separate threads. Slots are
// written per index, so results do not depend on scheduling.
template <typename Fn>
inline void for_each_component(bool concurrent, int count, Fn&& fn) {
    if (!concurrent || count <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::future<void>> futures;
    futures.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
        futures.push_back(std::async(std::launch::async, [&fn, i] { fn(i); }));
    for (std::future<void>& f : futures) f.get();
}

struct SolveState {
    Vector x;
    EvalCounters counters;
    IterationTrace trace;
    std::int64_t a_mark = 0;
    std::int64_t r_mark = 0;
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

    // Appends rec when the stride selects it or the iteration is terminal.
    // Deltas cover everything since the previous recorded row, so prefix sums
    // over the (possibly thinned) trace reproduce the running totals.
    void commit(IterationRecord&& rec, long stride, bool terminal) {
        if (!(terminal || rec.k % stride == 0)) return;
        const std::int64_t a = counters.a_evals.load(std::memory_order_relaxed);
        const std::int64_t r = counters.resolvent_evals.load(std::memory_order_relaxed);
        rec.a_evals = a - a_mark;
        rec.resolvent_evals = r - r_mark;
        a_mark = a;
        r_mark = r;
        trace.records.push_back(std::move(rec));
    }

    IterationTrace finish(Outcome outcome, long k_stop) {
        trace.outcome = outcome;
        trace.final_x = x;
        trace.totals.iterations = k_stop;
        trace.totals.a_evals = counters.a_evals.load(std::memory_order_relaxed);
        trace.totals.resolvent_evals = counters.resolvent_evals.load(std::memory_order_relaxed);
        trace.totals.nT = trace.totals.a_evals + trace.totals.resolvent_evals;
        trace.totals.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return std::move(trace);
    }
};

// Move the start point into X if it arrived outside (with a warning note).
// Runs inside the solve's try block: a projection failure here is reported
// through the trace like any later one.
inline void ensure_start_in_region(SolveState& st, const InclusionSystem& sys,
                                   const SolverConfig& cfg) {
    if (sys.X().contains(st.x, cfg.eps_proj)) return;
    st.x = project_polyhedron(st.x, sys.X(), cfg.eps_proj, cfg.proj_max_sweeps);
    st.trace.warnings.push_back("x0 outside X; projected onto X before iterating");
}

inline ComponentDiag make_diag(int i, const LineSearchResult& ls) {
    ComponentDiag d;
    d.index = i;
    d.j = ls.j;
    d.alpha = ls.alpha;
    d.accepted_lhs = ls.accepted_lhs;
    d.accepted_rhs = ls.accepted_rhs;
    d.rejected_lhs = ls.rejected_lhs;
    d.rejected_rhs = ls.rejected_rhs;
    d.ubar_norm = ls.ubar.norm();
    d.halfspace = build_halfspace(ls.a_at_xbar, ls.ubar, ls.xbar);
    return d;
}

}  // namespace detail

// Algorithm with parallel halfspaces: each iteration evaluates every
// component's forward-backward map, line-searches the unsolved ones, and
// projects onto the intersection of their separating halfspaces, then onto X.
inline IterationTrace solve_parallel(const InclusionSystem& sys, const Vector& x0,
                                     const SolverConfig& cfg) {
    cfg.validate(sys.n());
    require_dim(x0, sys.n(), "solve_parallel: x0");
    require_finite(x0, "solve_parallel: x0");
    detail::SolveState st;
    st.x = x0;

    const int m = sys.m();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    long k = 0;
    try {
        detail::ensure_start_in_region(st, sys, cfg);
        for (k = 0; k < cfg.k_max; ++k) {
            IterationRecord rec;
            rec.k = k;
            rec.x = st.x;
            rec.residuals = Vector::Constant(m, nan);

            if (cfg.target) {
                rec.fejer_dist = (st.x - *cfg.target).norm();
                if (rec.fejer_dist <= cfg.target_radius) {
                    st.commit(std::move(rec), cfg.trace_stride, true);
                    return st.finish(Outcome::Converged, k);
                }
            }

            const double beta = cfg.beta_at(k);

            // All forward-backward maps (independent across i).
            std::vector<Vector> J(static_cast<std::size_t>(m));
            detail::for_each_component(cfg.concurrent, m, [&](int i) {
                J[static_cast<std::size_t>(i)] =
                    forward_backward(sys, i, st.x, beta, st.counters);
            });
            for (int i = 0; i < m; ++i)
                rec.residuals[i] = (st.x - J[static_cast<std::size_t>(i)]).norm();

            // Components already at their fixed point; all solved => done.
            for (int i = 0; i < m; ++i)
                if (rec.residuals[i] <= cfg.eps_res) rec.active_set.push_back(i);
            if (static_cast<int>(rec.active_set.size()) == m) {
                st.commit(std::move(rec), cfg.trace_stride, true);
                return st.finish(Outcome::Converged, k);
            }

            // Line searches for the unsolved components. Solved components
            // would contribute the whole space (their cut degenerates to
            // normal A_i(x) - A_i(x) = 0), so they are excluded from the
            // intersection outright.
            std::vector<char> solved(static_cast<std::size_t>(m), 0);
            for (int i : rec.active_set) solved[static_cast<std::size_t>(i)] = 1;
            std::vector<std::optional<ComponentDiag>> diag(static_cast<std::size_t>(m));
            detail::for_each_component(cfg.concurrent, m, [&](int i) {
                if (solved[static_cast<std::size_t>(i)]) return;
                const OperatorPair& p = sys.pair(i);
                LineSearchResult ls = armijo_search(
                    *p.A, *p.B, st.x, J[static_cast<std::size_t>(i)], beta,
                    cfg.theta, cfg.delta, cfg.R, cfg.j_max, st.counters);
                diag[static_cast<std::size_t>(i)] = detail::make_diag(i, ls);
            });

            std::vector<Halfspace> cuts;
            cuts.reserve(static_cast<std::size_t>(m));
            for (int i = 0; i < m; ++i) {
                if (!diag[static_cast<std::size_t>(i)]) continue;
                rec.searches.push_back(*diag[static_cast<std::size_t>(i)]);
                cuts.push_back(rec.searches.back().halfspace);
            }

            // x^{k+1} = P_X(P_{H_k}(x^k)), H_k the intersection of the cuts.
            Vector x_next = project_polyhedron(
                project_intersection(st.x, cuts, cfg.eps_proj, cfg.proj_max_sweeps),
                sys.X(), cfg.eps_proj, cfg.proj_max_sweeps);
            rec.step_norm = (x_next - st.x).norm();

            const bool fixed = rec.step_norm <= cfg.eps_fix;
            st.commit(std::move(rec), cfg.trace_stride, fixed || k + 1 == cfg.k_max);
            st.x = std::move(x_next);
            if (fixed) return st.finish(Outcome::FixedPoint, k);
        }
    } catch (const ConvergenceFailure& e) {
        st.trace.error_message = e.what();
        st.trace.error_k = k;
        return st.finish(Outcome::Error, k);
    } catch (const LineSearchFailure& e) {
        st.trace.error_message = e.what();
        st.trace.error_k = k;
        return st.finish(Outcome::Error, k);
    } catch (const NumericError& e) {
        st.trace.error_message = e.what();
        st.trace.error_k = k;
        return st.finish(Outcome::Error, k);
    }
    return st.finish(Outcome::MaxIterations, cfg.k_max);
}

// Alternating variant: iteration k processes only component rho(k). A solved
// component joins the satisfied set and the iterate stands still; any
// projection step clears the set. Converged once the set reaches all of I.
inline IterationTrace solve_cyclic(const InclusionSystem& sys, const Vector& x0,
                                   const SolverConfig& cfg) {
    cfg.validate(sys.n());
    require_dim(x0, sys.n(), "solve_cyclic: x0");
    require_finite(x0, "solve_cyclic: x0");
    detail::SolveState st;
    st.x = x0;

    const int m = sys.m();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<char> satisfied(static_cast<std::size_t>(m), 0);
    int satisfied_count = 0;
    long k = 0;
    try {
        detail::ensure_start_in_region(st, sys, cfg);
        for (k = 0; k < cfg.k_max; ++k) {
            IterationRecord rec;
            rec.k = k;
            rec.x = st.x;
            rec.residuals = Vector::Constant(m, nan);

            if (cfg.target) {
                rec.fejer_dist = (st.x - *cfg.target).norm();
                if (rec.fejer_dist <= cfg.target_radius) {
                    st.commit(std::move(rec), cfg.trace_stride, true);
                    return st.finish(Outcome::Converged, k);
                }
            }

            const double beta = cfg.beta_at(k);
            const int i = rho(k, m) - 1;
            Vector J = forward_backward(sys, i, st.x, beta, st.counters);
            rec.residuals[i] = (st.x - J).norm();

            if (rec.residuals[i] <= cfg.eps_res) {
                // Component at its fixed point: mark it, move to the next index.
                if (!satisfied[static_cast<std::size_t>(i)]) {
                    satisfied[static_cast<std::size_t>(i)] = 1;
                    ++satisfied_count;
                }
                for (int q = 0; q < m; ++q)
                    if (satisfied[static_cast<std::size_t>(q)]) rec.active_set.push_back(q);
                const bool done = satisfied_count == m;
                st.commit(std::move(rec), cfg.trace_stride, done || k + 1 == cfg.k_max);
                if (done) return st.finish(Outcome::Converged, k);
                continue;
            }

            const OperatorPair& p = sys.pair(i);
            LineSearchResult ls = armijo_search(*p.A, *p.B, st.x, J, beta,
                                                cfg.theta, cfg.delta, cfg.R,
                                                cfg.j_max, st.counters);
            rec.searches.push_back(detail::make_diag(i, ls));

            // Single-halfspace projection, then onto X; the satisfied set
            // empties on every projection step.
            Vector x_next = project_polyhedron(
                project_halfspace(st.x, rec.searches.back().halfspace), sys.X(),
                cfg.eps_proj, cfg.proj_max_sweeps);
            rec.step_norm = (x_next - st.x).norm();
            std::fill(satisfied.begin(), satisfied.end(), 0);
            satisfied_count = 0;

            st.commit(std::move(rec), cfg.trace_stride, k + 1 == cfg.k_max);
            st.x = std::move(x_next);
        }
    } catch (const ConvergenceFailure& e) {
        st.trace.error_message = e.what();
        st.trace.error_k = k;
        return st.finish(Outcome::Error, k);
    } catch (const LineSearchFailure& e) {
        st.trace.error_message = e.what();
        st.trace.error_k = k;
        return st.finish(Outcome::Error, k);
    } catch (const NumericError& e) {
        st.trace.error_message = e.what();
        st.trace.error_k = k;
        return st.finish(Outcome::Error, k);
    }
    return st.finish(Outcome::MaxIterations, cfg.k_max);
}

}  // namespace splitsys
