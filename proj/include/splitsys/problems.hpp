#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "splitsys/core.hpp"
#include "splitsys/geometry.hpp"
#include "splitsys/types.hpp"

namespace splitsys {

// Deterministic 64-bit generator (splitmix64). Chosen over <random> engines
// for the instance streams because its output is bit-exact everywhere and
// trivially re-implementable when cross-checking instances from other tools.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with 53 random bits.
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

  private:
    std::uint64_t state_;
};

struct RandomSpec {
    Index n = 0;
    int m = 0;
    Index l = 20;  // rows of the shared constraint block
    std::uint64_t seed = 0;
    double scale = 1.0;

    void validate() const {
        require(n >= 1, "RandomSpec: n must be >= 1");
        require(m >= 1, "RandomSpec: m must be >= 1");
        require(l >= 1, "RandomSpec: l must be >= 1");
        require(std::isfinite(scale) && scale > 0.0, "RandomSpec: scale must be positive");
    }
};

// Normal cone N_C of a polyhedron C. Resolvent of beta*N_C is the metric
// projection onto C for every beta > 0; the bounded selection at interior or
// boundary points is 0 in Gr(N_C), which is all the outer algorithms need.
class NormalConeOperator final : public SetValuedOperator {
  public:
    explicit NormalConeOperator(Polyhedron region, double proj_tol = 1e-10,
                                long max_sweeps = 100000)
        : region_(std::move(region)), proj_tol_(proj_tol), max_sweeps_(max_sweeps) {
        require(std::isfinite(proj_tol_) && proj_tol_ > 0.0,
                "NormalConeOperator: proj_tol must be positive");
        require(max_sweeps_ >= 1, "NormalConeOperator: max_sweeps must be >= 1");
    }

    Vector resolvent(const Vector& z, double beta) const override {
        require(std::isfinite(beta) && beta > 0.0, "NormalConeOperator: beta must be positive");
        require_dim(z, region_.dimension(), "NormalConeOperator::resolvent");
        return project_polyhedron(z, region_, proj_tol_, max_sweeps_);
    }

    Vector select_bounded(const Vector& y, double R) const override {
        require(std::isfinite(R) && R > 0.0, "NormalConeOperator: R must be positive");
        require_dim(y, region_.dimension(), "NormalConeOperator::select_bounded");
        if (!region_.contains(y, kMembershipTol))
            throw ContractViolation("NormalConeOperator: point outside the operator's domain");
        return Vector::Zero(region_.dimension());
    }

    Index dimension() const override { return region_.dimension(); }
    const Polyhedron& region() const { return region_; }

    static constexpr double kMembershipTol = 1e-8;

  private:
    Polyhedron region_;
    double proj_tol_;
    long max_sweeps_;
};

class LinearOperator final : public SingleValuedOperator {
  public:
    explicit LinearOperator(Matrix coeff) : coeff_(std::move(coeff)) {
        require(coeff_.rows() == coeff_.cols() && coeff_.rows() >= 1,
                "LinearOperator: matrix must be square and nonempty");
        require_finite_matrix(coeff_, "LinearOperator: matrix");
    }

    Vector eval(const Vector& x) const override {
        require_dim(x, coeff_.cols(), "LinearOperator::eval");
        return coeff_ * x;
    }

    Index dimension() const override { return coeff_.cols(); }
    const Matrix& coeff() const { return coeff_; }

  private:
    Matrix coeff_;
};

// x -> Mx + x.^3 (componentwise cube). The cubic term has no global Lipschitz
// or cocoercivity constant, which is the regime the line search exists for.
class LinearCubicOperator final : public SingleValuedOperator {
  public:
    explicit LinearCubicOperator(Matrix coeff) : coeff_(std::move(coeff)) {
        require(coeff_.rows() == coeff_.cols() && coeff_.rows() >= 1,
                "LinearCubicOperator: matrix must be square and nonempty");
        require_finite_matrix(coeff_, "LinearCubicOperator: matrix");
    }

    Vector eval(const Vector& x) const override {
        require_dim(x, coeff_.cols(), "LinearCubicOperator::eval");
        return coeff_ * x + x.array().cube().matrix();
    }

    Index dimension() const override { return coeff_.cols(); }
    const Matrix& coeff() const { return coeff_; }

  private:
    Matrix coeff_;
};

struct RandomInstance {
    RandomSpec spec;
    int example = 1;
    std::vector<Matrix> gram;  // M_i = Q_i^T Q_i
    Matrix lhs;                // shared constraint block, l x n
    Vector rhs;                // nonnegative, so 0 in C and C is nonempty
    InclusionSystem system;
};

namespace detail {

// Stream order is part of the format: for each i the n*n entries of Q_i
// (row-major), then the l*n entries of the constraint block (row-major),
// then the l right-hand sides.
inline void fill_row_major(SplitMix64& rng, double scale, Matrix& out) {
    for (Index r = 0; r < out.rows(); ++r)
        for (Index c = 0; c < out.cols(); ++c)
            out(r, c) = scale * rng.next_unit();
}

inline RandomInstance make_instance(const RandomSpec& spec, int example) {
    spec.validate();
    require(example == 1 || example == 2, "make_instance: example must be 1 or 2");

    SplitMix64 rng(spec.seed);
    std::vector<Matrix> gram;
    gram.reserve(static_cast<std::size_t>(spec.m));
    for (int i = 0; i < spec.m; ++i) {
        Matrix q(spec.n, spec.n);
        fill_row_major(rng, spec.scale, q);
        gram.push_back(q.transpose() * q);
    }

    Matrix lhs(spec.l, spec.n);
    fill_row_major(rng, spec.scale, lhs);
    Vector rhs(spec.l);
    for (Index r = 0; r < spec.l; ++r) rhs[r] = spec.scale * rng.next_unit();

    Polyhedron region(lhs, rhs);  // b >= 0, so the origin certifies C != {}
    auto cone = std::make_shared<const NormalConeOperator>(region);

    std::vector<OperatorPair> pairs;
    pairs.reserve(gram.size());
    for (const Matrix& mi : gram) {
        std::shared_ptr<const SingleValuedOperator> a;
        if (example == 1)
            a = std::make_shared<const LinearOperator>(mi);
        else
            a = std::make_shared<const LinearCubicOperator>(mi);
        pairs.push_back(OperatorPair{std::move(a), cone});
    }

    RandomInstance inst{spec, example, std::move(gram), lhs, rhs,
                        InclusionSystem(std::move(pairs), region)};
    return inst;
}

}  // namespace detail

// Affine monotone system: A_i(x) = M_i x with M_i = Q_i^T Q_i, B_i = N_C for
// a shared random polyhedron C, X = C.
inline RandomInstance gen_example1(const RandomSpec& spec) {
    return detail::make_instance(spec, 1);
}

// Same geometry with A_i(x) = M_i x + x.^3, monotone but not Lipschitz.
inline RandomInstance gen_example2(const RandomSpec& spec) {
    return detail::make_instance(spec, 2);
}

inline RandomInstance gen_example(int example, const RandomSpec& spec) {
    return detail::make_instance(spec, example);
}

namespace detail {

inline nlohmann::json matrix_to_json(const Matrix& mat) {
    nlohmann::json rows = nlohmann::json::array();
    for (Index r = 0; r < mat.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Index c = 0; c < mat.cols(); ++c) row.push_back(mat(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Matrix matrix_from_json(const nlohmann::json& rows, const char* what) {
    require(rows.is_array() && !rows.empty(), what);
    const std::size_t cols = rows.front().size();
    require(cols >= 1, what);
    Matrix mat(static_cast<Index>(rows.size()), static_cast<Index>(cols));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const nlohmann::json& row = rows[r];
        require(row.is_array() && row.size() == cols, what);
        for (std::size_t c = 0; c < cols; ++c)
            mat(static_cast<Index>(r), static_cast<Index>(c)) = row[c].get<double>();
    }
    return mat;
}

}  // namespace detail

inline nlohmann::json instance_to_json(const RandomInstance& inst,
                                       bool with_matrices = false) {
    nlohmann::json doc{{"n", inst.spec.n},
                       {"m", inst.spec.m},
                       {"l", inst.spec.l},
                       {"seed", inst.spec.seed},
                       {"scale", inst.spec.scale},
                       {"example", inst.example}};
    if (with_matrices) {
        nlohmann::json grams = nlohmann::json::array();
        for (const Matrix& g : inst.gram) grams.push_back(detail::matrix_to_json(g));
        nlohmann::json b = nlohmann::json::array();
        for (Index r = 0; r < inst.rhs.size(); ++r) b.push_back(inst.rhs[r]);
        doc["matrices"] = {{"gram", std::move(grams)},
                           {"constraint_lhs", detail::matrix_to_json(inst.lhs)},
                           {"constraint_rhs", std::move(b)}};
    }
    return doc;
}

// Rebuilds the instance from {n, m, l, seed, example[, scale]} and, when an
// embedded "matrices" block is present, checks it against the regenerated
// data instead of trusting it.
inline RandomInstance instance_from_json(const nlohmann::json& doc) {
    require(doc.contains("n") && doc.contains("m") && doc.contains("seed") &&
                doc.contains("example"),
            "instance_from_json: need n, m, seed, example");
    RandomSpec spec;
    spec.n = doc.at("n").get<Index>();
    spec.m = doc.at("m").get<int>();
    spec.l = doc.value("l", Index{20});
    spec.seed = doc.at("seed").get<std::uint64_t>();
    spec.scale = doc.value("scale", 1.0);
    RandomInstance inst = detail::make_instance(spec, doc.at("example").get<int>());

    if (doc.contains("matrices")) {
        const nlohmann::json& mats = doc.at("matrices");
        const Matrix lhs =
            detail::matrix_from_json(mats.at("constraint_lhs"),
                                     "instance_from_json: malformed constraint_lhs");
        require(lhs.rows() == inst.lhs.rows() && lhs.cols() == inst.lhs.cols() &&
                    lhs.isApprox(inst.lhs, 1e-12),
                "instance_from_json: embedded constraint block disagrees with the seed");
        const nlohmann::json& grams = mats.at("gram");
        require(grams.is_array() && static_cast<int>(grams.size()) == spec.m,
                "instance_from_json: wrong number of embedded matrices");
        for (int i = 0; i < spec.m; ++i) {
            const Matrix g = detail::matrix_from_json(
                grams[static_cast<std::size_t>(i)],
                "instance_from_json: malformed gram matrix");
            require(g.rows() == spec.n && g.cols() == spec.n &&
                        g.isApprox(inst.gram[static_cast<std::size_t>(i)], 1e-12),
                    "instance_from_json: embedded matrix disagrees with the seed");
        }
    }
    return inst;
}

}  // namespace splitsys
