#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "copsel/cop.hpp"
#include "copsel/errors.hpp"
#include "copsel/rng.hpp"

using namespace copsel;

namespace {

COPInstance sphere_box(int d) {
    COPInstance inst;
    inst.id = "t";
    inst.objective = Objective::Sphere;
    inst.space.dimension = d;
    inst.space.lower.assign(d, -5.0);
    inst.space.upper.assign(d, 5.0);
    return inst;
}

} // namespace

TEST_CASE("objective values at the known optimum are zero") {
    for (auto o : {Objective::Sphere, Objective::Ackley, Objective::Rosenbrock}) {
        COPInstance inst = sphere_box(4);
        inst.objective = o;
        const auto x = inst.optimum();
        CHECK(std::abs(evaluate_objective(inst, x)) < 1e-12);
    }
}

TEST_CASE("objective spot values") {
    COPInstance inst = sphere_box(3);
    std::vector<double> x{1.0, 2.0, 3.0};
    CHECK(evaluate_objective(inst, x) == doctest::Approx(14.0));

    inst.objective = Objective::Rosenbrock;
    // sum over i of 100*(x_{i+1}-x_i^2)^2 + (1-x_i)^2
    const double expect = 100.0 * (2.0 - 1.0) * (2.0 - 1.0) + 0.0 +
                          100.0 * (3.0 - 4.0) * (3.0 - 4.0) + 1.0;
    CHECK(evaluate_objective(inst, x) == doctest::Approx(expect));

    inst.objective = Objective::Ackley;
    // Ackley away from the origin is strictly positive
    CHECK(evaluate_objective(inst, x) > 1.0);
}

TEST_CASE("violation semantics with epsilon relaxation") {
    COPInstance inst = sphere_box(2);
    Constraint g;
    g.kind = ConstraintKind::LinearInequality;
    g.quad.assign(2, 0.0);
    g.lin = {1.0, 0.0};
    g.offset = -1.0; // x1 <= 1
    Constraint h;
    h.kind = ConstraintKind::Equality;
    h.quad.assign(2, 0.0);
    h.lin = {0.0, 1.0};
    h.offset = 0.0; // x2 = 0
    inst.constraints = {g, h};

    std::vector<double> feasible{0.5, 5e-5}; // |h| = 5e-5 < epsilon
    auto v = violation(inst, feasible);
    CHECK(v.phi == 0.0);
    CHECK(v.per_constraint.size() == 2);

    std::vector<double> infeasible{2.0, 1.0};
    v = violation(inst, infeasible);
    CHECK(v.per_constraint[0] == doctest::Approx(1.0));
    CHECK(v.per_constraint[1] == doctest::Approx(1.0 - inst.epsilon));
    CHECK(v.phi == doctest::Approx(v.per_constraint[0] + v.per_constraint[1]));
}

TEST_CASE("constraint gradient") {
    Constraint c;
    c.kind = ConstraintKind::QuadraticInequality;
    c.quad = {2.0, 0.0};
    c.lin = {1.0, -3.0};
    c.offset = 4.0;
    std::vector<double> x{1.5, 2.0};
    const auto grad = c.gradient(x);
    CHECK(grad[0] == doctest::Approx(2.0 * 2.0 * 1.5 + 1.0));
    CHECK(grad[1] == doctest::Approx(-3.0));
    CHECK(c.value(x) == doctest::Approx(2.0 * 2.25 + 1.5 - 6.0 + 4.0));
}

TEST_CASE("epsilon_compare basics and limits") {
    const double eps = 0.1;
    // both below the level: ordered by f
    CHECK(epsilon_compare({1.0, 0.05}, {2.0, 0.0}, eps) == Ordering::Less);
    // one above: ordered by phi
    CHECK(epsilon_compare({1.0, 0.5}, {100.0, 0.0}, eps) == Ordering::Greater);
    // equal violations above the level: ordered by f
    CHECK(epsilon_compare({1.0, 0.5}, {2.0, 0.5}, eps) == Ordering::Less);
    // eps_level = 0 reduces to lexicographic (phi, f)
    CHECK(epsilon_compare({100.0, 0.0}, {0.0, 1e-9}, 0.0) == Ordering::Less);
    // eps_level = infinity reduces to plain f comparison
    const double inf = std::numeric_limits<double>::infinity();
    CHECK(epsilon_compare({1.0, 99.0}, {2.0, 0.0}, inf) == Ordering::Less);
    CHECK(epsilon_compare({1.0, 0.3}, {1.0, 0.3}, 0.0) == Ordering::Equal);
}

TEST_CASE("epsilon_compare rejects NaN") {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(epsilon_compare({nan, 0.0}, {1.0, 0.0}, 0.1), ContractError);
    CHECK_THROWS_AS(epsilon_compare({1.0, 0.0}, {1.0, nan}, 0.1), ContractError);
}

TEST_CASE("epsilon_compare total-preorder laws over random triples") {
    Rng rng(derive_seed(42, {"cop", "order-laws"}));
    auto rnd_fphi = [&] {
        return FPhi{uniform(rng, -10.0, 10.0),
                    uniform(rng, 0.0, 1.0) < 0.3 ? 0.0 : uniform(rng, 0.0, 2.0)};
    };
    auto flip = [](Ordering o) {
        return o == Ordering::Less ? Ordering::Greater
                                   : (o == Ordering::Greater ? Ordering::Less : Ordering::Equal);
    };
    int violations = 0;
    for (int i = 0; i < 1000; ++i) {
        const double eps = uniform(rng, 0.0, 1.0) < 0.2 ? 0.0 : uniform(rng, 0.0, 1.0);
        const FPhi a = rnd_fphi(), b = rnd_fphi(), c = rnd_fphi();
        if (epsilon_compare(a, a, eps) != Ordering::Equal) ++violations;   // reflexive
        if (epsilon_compare(a, b, eps) != flip(epsilon_compare(b, a, eps))) ++violations;
        // transitivity of "not worse"
        if (epsilon_compare(a, b, eps) != Ordering::Greater &&
            epsilon_compare(b, c, eps) != Ordering::Greater &&
            epsilon_compare(a, c, eps) == Ordering::Greater)
            ++violations;
    }
    CHECK(violations == 0);
}

TEST_CASE("generator respects the optimum-feasibility flag and determinism") {
    GeneratorSpec spec;
    spec.n_linear = 2;
    spec.n_quadratic = 1;
    spec.n_equality = 1;
    for (std::uint64_t s = 1; s <= 20; ++s) {
        const auto inst = random_instance(spec, s);
        CHECK(inst.constraints.size() == 4);
        const auto v = violation(inst, inst.optimum());
        CHECK(v.phi == 0.0);
        CHECK(inst == random_instance(spec, s));
    }
    GeneratorSpec infeasible = spec;
    infeasible.optimum_feasible = false;
    infeasible.n_equality = 0;
    const auto inst = random_instance(infeasible, 3);
    CHECK(violation(inst, inst.optimum()).phi > 0.0);
}

TEST_CASE("generator raises after exhausting retries") {
    GeneratorSpec spec;
    spec.n_linear = 1;
    spec.optimum_feasible = false;
    // offsets can only be >= 4.9 while coefficients stay tiny: a feasible
    // origin is nearly certain, so requiring an infeasible optimum fails
    spec.coeff_min = -1e-6;
    spec.coeff_max = 1e-6;
    spec.offset_min = -5.0;
    spec.offset_max = -4.9;
    spec.max_retries = 5;
    CHECK_THROWS_AS(random_instance(spec, 1), GenerationError);
}

TEST_CASE("serialize round-trips 100 random instances") {
    GeneratorSpec spec;
    spec.n_linear = 1;
    spec.n_quadratic = 1;
    for (std::uint64_t s = 0; s < 100; ++s) {
        const auto inst = random_instance(spec, derive_seed(7, {"roundtrip", std::to_string(s)}));
        CHECK(deserialize(serialize(inst)) == inst);
    }
}

TEST_CASE("serialization is byte-stable") {
    GeneratorSpec spec;
    const auto inst = random_instance(spec, 11);
    CHECK(serialize(inst) == serialize(inst));
}

TEST_CASE("deserialize errors name the missing field") {
    GeneratorSpec spec;
    auto text = serialize(random_instance(spec, 5));
    const auto pos = text.find("\"epsilon\"");
    REQUIRE(pos != std::string::npos);
    auto broken = text;
    broken.erase(pos, text.find('\n', pos) - pos + 1);
    try {
        deserialize(broken);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("epsilon") != std::string::npos);
    }
}

TEST_CASE("deserialize reports unknown fields as warnings") {
    GeneratorSpec spec;
    auto text = serialize(random_instance(spec, 5));
    text.insert(text.find("\"id\""), "\"extra_field\": 1,\n  ");
    std::vector<std::string> warnings;
    deserialize(text, &warnings);
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].find("extra_field") != std::string::npos);
}

TEST_CASE("search space validation and helpers") {
    SearchSpace s;
    s.dimension = 2;
    s.lower = {-1.0, -2.0};
    s.upper = {1.0, 2.0};
    s.validate();
    CHECK(s.mean_width() == doctest::Approx(3.0));
    std::vector<double> x{5.0, -9.0};
    s.clamp(x);
    CHECK(x[0] == 1.0);
    CHECK(x[1] == -2.0);
    CHECK(s.contains(x));

    s.upper[0] = -2.0;
    CHECK_THROWS_AS(s.validate(), ContractError);
}
