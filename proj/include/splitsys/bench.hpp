#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "splitsys/problems.hpp"
#include "splitsys/solver.hpp"
#include "splitsys/types.hpp"

namespace splitsys {

enum class AlgoChoice { Parallel, Cyclic, Both };

inline AlgoChoice parse_algo(const std::string& name) {
    if (name == "parallel") return AlgoChoice::Parallel;
    if (name == "cyclic") return AlgoChoice::Cyclic;
    if (name == "both") return AlgoChoice::Both;
    throw ContractViolation("algorithm must be one of: parallel, cyclic, both");
}

struct RunConfig {
    int example = 1;
    AlgoChoice algorithm = AlgoChoice::Both;
    Index n = 2;
    int m = 10;
    Index l = 20;
    std::uint64_t seed = 0;
    double delta = 0.1;
    double theta = 0.5;
    double beta = 1.0;
    double R = 1.0;
    double tol_dist = 0.001;  // stop at ||x^k - 0|| <= tol_dist (known solution)
    long k_max = 100000;
    int j_max = 100;
    long trace_stride = 1;
    bool concurrent = false;

    RandomSpec instance_spec() const { return RandomSpec{n, m, l, seed, 1.0}; }

    SolverConfig solver_config() const {
        SolverConfig cfg;
        cfg.delta = delta;
        cfg.theta = theta;
        cfg.beta_lo = beta;
        cfg.beta_hi = beta;
        cfg.R = R;
        cfg.k_max = k_max;
        cfg.j_max = j_max;
        cfg.trace_stride = trace_stride;
        cfg.concurrent = concurrent;
        cfg.target = Vector::Zero(n);
        cfg.target_radius = tol_dist;
        return cfg;
    }

    void validate() const {
        require(example == 1 || example == 2, "RunConfig: example must be 1 or 2");
        instance_spec().validate();
        solver_config().validate(n);
    }
};

struct BenchRow {
    std::string algorithm;
    Index n = 0;
    int m = 0;
    long iter = 0;
    std::int64_t nT = 0;
    double wall_seconds = 0.0;
    Outcome outcome = Outcome::Error;
};

struct AlgoRun {
    std::string algorithm;
    BenchRow row;
    IterationTrace trace;
};

// Runs the requested algorithm(s) on one seeded instance from x0 = (1,...,1).
// "both" shares the instance so the two rows are directly comparable.
inline std::vector<AlgoRun> run_benchmark(const RunConfig& cfg) {
    cfg.validate();
    const RandomInstance inst = gen_example(cfg.example, cfg.instance_spec());
    const SolverConfig solver_cfg = cfg.solver_config();
    const Vector x0 = Vector::Ones(cfg.n);

    std::vector<AlgoRun> runs;
    auto push = [&](const char* name, IterationTrace&& trace) {
        BenchRow row{name,
                     cfg.n,
                     cfg.m,
                     trace.totals.iterations,
                     trace.totals.nT,
                     trace.totals.wall_seconds,
                     trace.outcome};
        runs.push_back(AlgoRun{name, std::move(row), std::move(trace)});
    };
    if (cfg.algorithm != AlgoChoice::Cyclic)
        push("parallel", solve_parallel(inst.system, x0, solver_cfg));
    if (cfg.algorithm != AlgoChoice::Parallel)
        push("cyclic", solve_cyclic(inst.system, x0, solver_cfg));
    return runs;
}

struct TraceCsvRow {
    long k = 0;
    double res_max = 0.0;
    double step_norm = 0.0;
    double fejer_dist = 0.0;
    double alphas_min = 0.0;
    std::int64_t nT_cum = 0;
};

namespace detail {

// Shortest round-trippable decimal; covers nan/inf the way strtod reads back.
inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline double max_defined_residual(const Vector& residuals) {
    double best = std::numeric_limits<double>::quiet_NaN();
    for (Index i = 0; i < residuals.size(); ++i) {
        const double r = residuals[i];
        if (std::isnan(r)) continue;
        if (std::isnan(best) || r > best) best = r;
    }
    return best;
}

}  // namespace detail

inline std::vector<TraceCsvRow> trace_csv_rows(const IterationTrace& trace) {
    std::vector<TraceCsvRow> rows;
    rows.reserve(trace.records.size());
    std::int64_t nt = 0;
    for (const IterationRecord& rec : trace.records) {
        nt += rec.a_evals + rec.resolvent_evals;
        double alpha_min = std::numeric_limits<double>::quiet_NaN();
        for (const ComponentDiag& d : rec.searches)
            if (std::isnan(alpha_min) || d.alpha < alpha_min) alpha_min = d.alpha;
        rows.push_back(TraceCsvRow{rec.k, detail::max_defined_residual(rec.residuals),
                                   rec.step_norm, rec.fejer_dist, alpha_min, nt});
    }
    return rows;
}

inline constexpr const char* kTraceCsvHeader = "k,res_max,step_norm,fejer_dist,alphas_min,nT_cum";

inline void emit_trace(const IterationTrace& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw NumericError("emit_trace: cannot open " + path);
    out << kTraceCsvHeader << '\n';
    for (const TraceCsvRow& row : trace_csv_rows(trace)) {
        out << row.k << ',' << detail::fmt_double(row.res_max) << ','
            << detail::fmt_double(row.step_norm) << ','
            << detail::fmt_double(row.fejer_dist) << ','
            << detail::fmt_double(row.alphas_min) << ',' << row.nT_cum << '\n';
    }
    if (!out.flush()) throw NumericError("emit_trace: write failed for " + path);
}

inline std::vector<TraceCsvRow> read_trace_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw NumericError("read_trace_csv: cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line != kTraceCsvHeader)
        throw NumericError("read_trace_csv: bad header in " + path);
    std::vector<TraceCsvRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() != 6)
            throw NumericError("read_trace_csv: bad row in " + path + ": " + line);
        TraceCsvRow row;
        row.k = std::stol(cells[0]);
        row.res_max = std::strtod(cells[1].c_str(), nullptr);
        row.step_norm = std::strtod(cells[2].c_str(), nullptr);
        row.fejer_dist = std::strtod(cells[3].c_str(), nullptr);
        row.alphas_min = std::strtod(cells[4].c_str(), nullptr);
        row.nT_cum = std::stoll(cells[5]);
        rows.push_back(row);
    }
    return rows;
}

inline std::string format_report(const std::vector<BenchRow>& rows) {
    std::string out;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-10s %6s %6s %8s %10s %12s %-14s\n",
                  "algorithm", "n", "m", "iter", "nT", "wall_s", "outcome");
    out += buf;
    for (const BenchRow& r : rows) {
        std::snprintf(buf, sizeof(buf), "%-10s %6lld %6d %8ld %10lld %12.4f %-14s\n",
                      r.algorithm.c_str(), static_cast<long long>(r.n), r.m, r.iter,
                      static_cast<long long>(r.nT), r.wall_seconds, to_string(r.outcome));
        out += buf;
    }
    return out;
}

inline void write_report_csv(const std::vector<BenchRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw NumericError("write_report_csv: cannot open " + path);
    out << "algorithm,n,m,iter,nT,wall_seconds,outcome\n";
    for (const BenchRow& r : rows)
        out << r.algorithm << ',' << r.n << ',' << r.m << ',' << r.iter << ','
            << r.nT << ',' << detail::fmt_double(r.wall_seconds) << ','
            << to_string(r.outcome) << '\n';
    if (!out.flush()) throw NumericError("write_report_csv: write failed for " + path);
}

}  // namespace splitsys
