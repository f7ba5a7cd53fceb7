#include <catch2/catch_amalgamated.hpp>

#include <splitsys/core.hpp>
#include <splitsys/problems.hpp>

#include "oracle.hpp"

using namespace splitsys;

namespace {

class ZeroOperator final : public SingleValuedOperator {
  public:
    explicit ZeroOperator(Index n) : n_(n) {}
    Vector eval(const Vector&) const override { return Vector::Zero(n_); }
    Index dimension() const override { return n_; }

  private:
    Index n_;
};

class WrongDimOperator final : public SingleValuedOperator {
  public:
    explicit WrongDimOperator(Index n) : n_(n) {}
    Vector eval(const Vector&) const override { return Vector::Zero(n_ + 1); }
    Index dimension() const override { return n_; }

  private:
    Index n_;
};

class NanOperator final : public SingleValuedOperator {
  public:
    explicit NanOperator(Index n) : n_(n) {}
    Vector eval(const Vector&) const override {
        return Vector::Constant(n_, std::numeric_limits<double>::quiet_NaN());
    }
    Index dimension() const override { return n_; }

  private:
    Index n_;
};

InclusionSystem single_pair(std::shared_ptr<const SingleValuedOperator> a,
                            Polyhedron region) {
    auto cone = std::make_shared<const NormalConeOperator>(region);
    return InclusionSystem({OperatorPair{std::move(a), std::move(cone)}},
                           std::move(region));
}

}  // namespace

TEST_CASE("inclusion system validates its pieces") {
    auto a2 = std::make_shared<const LinearOperator>(Matrix::Identity(2, 2));
    auto a3 = std::make_shared<const LinearOperator>(Matrix::Identity(3, 3));
    auto b2 = std::make_shared<const NormalConeOperator>(Polyhedron::whole_space(2));

    REQUIRE_THROWS_AS(InclusionSystem({}, Polyhedron::whole_space(2)),
                      ContractViolation);
    REQUIRE_THROWS_AS(InclusionSystem({OperatorPair{nullptr, b2}},
                                      Polyhedron::whole_space(2)),
                      ContractViolation);
    REQUIRE_THROWS_AS(InclusionSystem({OperatorPair{a3, b2}},
                                      Polyhedron::whole_space(2)),
                      ContractViolation);

    InclusionSystem sys({OperatorPair{a2, b2}, OperatorPair{a2, b2}},
                        Polyhedron::whole_space(2));
    REQUIRE(sys.n() == 2);
    REQUIRE(sys.m() == 2);
    REQUIRE_THROWS_AS(sys.pair(2), ContractViolation);
    REQUIRE_THROWS_AS(sys.pair(-1), ContractViolation);
}

TEST_CASE("forward_backward composes the two oracle calls") {
    auto a = std::make_shared<const LinearOperator>(Matrix::Identity(2, 2));
    InclusionSystem sys = single_pair(a, Polyhedron::whole_space(2));
    Vector x(2);
    x << 2, 3;

    EvalCounters counters;
    Vector a_val;
    Vector J = forward_backward(sys, 0, x, 1.0, counters, &a_val);
    REQUIRE(J == Vector::Zero(2));  // x - 1*x = 0; projection onto R^2 keeps it
    REQUIRE(a_val == x);
    REQUIRE(counters.a_evals.load() == 1);
    REQUIRE(counters.resolvent_evals.load() == 1);
    REQUIRE(counters.total() == 2);

    SECTION("zero A reduces to a plain projection") {
        Matrix row(1, 2);
        row << 1, 0;
        InclusionSystem proj =
            single_pair(std::make_shared<const ZeroOperator>(2),
                        Polyhedron(row, Vector::Zero(1)));
        Vector p = forward_backward(proj, 0, Vector::Ones(2), 1.0);
        REQUIRE(p.isApprox(Vector::Unit(2, 1), 1e-8));
    }

    SECTION("seeded instance matches the projection oracle") {
        RandomInstance inst = gen_example1(RandomSpec{3, 1, 4, 99});
        Vector x0 = Vector::Ones(3);
        Vector J0 = forward_backward(inst.system, 0, x0, 1.0);
        auto want = oracle::project_enumerate(x0 - inst.gram[0] * x0, inst.lhs,
                                              inst.rhs);
        REQUIRE(want.has_value());
        REQUIRE((J0 - *want).norm() <= 1e-6);
    }

    SECTION("argument validation") {
        REQUIRE_THROWS_AS(forward_backward(sys, 1, x, 1.0), ContractViolation);
        REQUIRE_THROWS_AS(forward_backward(sys, -1, x, 1.0), ContractViolation);
        REQUIRE_THROWS_AS(forward_backward(sys, 0, x, 0.0), ContractViolation);
        REQUIRE_THROWS_AS(forward_backward(sys, 0, x, -1.0), ContractViolation);
        REQUIRE_THROWS_AS(forward_backward(sys, 0, Vector::Ones(3), 1.0),
                          ContractViolation);
        Vector bad = x;
        bad[0] = std::numeric_limits<double>::infinity();
        REQUIRE_THROWS_AS(forward_backward(sys, 0, bad, 1.0), NumericError);
    }

    SECTION("operator contract breaches surface as typed errors") {
        InclusionSystem wrong =
            single_pair(std::make_shared<const WrongDimOperator>(2),
                        Polyhedron::whole_space(2));
        REQUIRE_THROWS_AS(forward_backward(wrong, 0, x, 1.0), ContractViolation);

        InclusionSystem nan = single_pair(std::make_shared<const NanOperator>(2),
                                          Polyhedron::whole_space(2));
        REQUIRE_THROWS_AS(forward_backward(nan, 0, x, 1.0), NumericError);
    }
}

TEST_CASE("residual and verify_solution at known points") {
    RandomInstance inst = gen_example1(RandomSpec{3, 4, 6, 5});
    const Vector origin = Vector::Zero(3);

    Vector r0 = residual(inst.system, origin, 1.0);
    REQUIRE(r0.size() == 4);
    REQUIRE(r0.maxCoeff() <= 1e-12);

    Vector r1 = residual(inst.system, Vector::Ones(3), 1.0);
    REQUIRE(r1.minCoeff() > 1e-6);

    REQUIRE(verify_solution(inst.system, origin, 1.0, 1e-9));
    REQUIRE_FALSE(verify_solution(inst.system, Vector::Ones(3), 1.0, 1e-9));

    REQUIRE_THROWS_AS(verify_solution(inst.system, origin, 1.0,
                                      std::numeric_limits<double>::infinity()),
                      ContractViolation);
    REQUIRE_THROWS_AS(verify_solution(inst.system, origin, 1.0, 0.0),
                      ContractViolation);

    SECTION("constructed fixed point across beta values") {
        // A == 0 and C containing x*: every J_i(x*) = P_C(x*) = x*.
        Matrix row(1, 2);
        row << 1, 1;
        InclusionSystem sys =
            single_pair(std::make_shared<const ZeroOperator>(2),
                        Polyhedron(row, Vector::Ones(1)));
        Vector star(2);
        star << 0.25, 0.25;
        for (double beta : {0.1, 1.0, 10.0})
            REQUIRE(residual(sys, star, beta).maxCoeff() <= 1e-9);
    }

    SECTION("counters tally one A evaluation and one resolvent per component") {
        EvalCounters counters;
        residual(inst.system, origin, 1.0, counters);
        REQUIRE(counters.a_evals.load() == inst.system.m());
        REQUIRE(counters.resolvent_evals.load() == inst.system.m());
    }
}

TEST_CASE("example operators are monotone on sampled pairs") {
    RandomInstance lin = gen_example1(RandomSpec{4, 2, 5, 11});
    RandomInstance cub = gen_example2(RandomSpec{4, 2, 5, 11});
    SplitMix64 rng(123);
    auto sample = [&]() {
        Vector v(4);
        for (Index i = 0; i < 4; ++i) v[i] = 4.0 * rng.next_unit() - 2.0;
        return v;
    };
    for (int t = 0; t < 100; ++t) {
        Vector x = sample(), y = sample();
        for (const RandomInstance* inst : {&lin, &cub}) {
            const SingleValuedOperator& A = *inst->system.pair(t % 2).A;
            REQUIRE((A.eval(x) - A.eval(y)).dot(x - y) >= -1e-10);
        }
    }
}
