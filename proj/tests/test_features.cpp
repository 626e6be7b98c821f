#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "copsel/cop.hpp"
#include "copsel/errors.hpp"
#include "copsel/features.hpp"

using namespace copsel;

namespace {

COPInstance box_instance(int d, double lo = -1.0, double hi = 1.0) {
    COPInstance inst;
    inst.id = "f";
    inst.space.dimension = d;
    inst.space.lower.assign(d, lo);
    inst.space.upper.assign(d, hi);
    return inst;
}

Constraint axis_halfspace(int d, int axis, double offset = 0.0) {
    Constraint c;
    c.kind = ConstraintKind::LinearInequality;
    c.quad.assign(d, 0.0);
    c.lin.assign(d, 0.0);
    c.lin[axis] = 1.0;
    c.offset = offset;
    return c;
}

} // namespace

TEST_CASE("half-box constraint gives a global feasibility ratio near 0.5") {
    auto inst = box_instance(4);
    inst.constraints = {axis_halfspace(4, 0)}; // x1 <= 0
    FeatureSettings settings;
    settings.n_samples = 100000;
    const auto fv = extract_features(inst, settings, 123);
    CHECK(fv.feasibility_ratio_global == doctest::Approx(0.5).epsilon(0.02));
    CHECK(std::abs(fv.feasibility_ratio_global - 0.5) <= 0.01);
}

TEST_CASE("unconstrained instance is fully feasible everywhere") {
    const auto inst = box_instance(3);
    FeatureSettings settings;
    settings.n_samples = 500;
    const auto fv = extract_features(inst, settings, 5);
    CHECK(fv.feasibility_ratio_global == 1.0);
    CHECK(fv.feasibility_ratio_near_optimum == 1.0);
    CHECK(fv.optimum_feasible);
    CHECK_FALSE(fv.angle_valid);
    CHECK(fv.n_linear == 0);
}

TEST_CASE("orthogonal constraint gradients give a right angle at the optimum") {
    auto inst = box_instance(5, -5.0, 5.0);
    inst.constraints = {axis_halfspace(5, 0), axis_halfspace(5, 1)};
    FeatureSettings settings;
    settings.n_samples = 200;
    const auto fv = extract_features(inst, settings, 2);
    CHECK(fv.angle_valid);
    CHECK(fv.angle_mean == doctest::Approx(M_PI / 2).epsilon(1e-12));
    CHECK(fv.angle_min == fv.angle_max);
    CHECK(fv.n_linear == 2);
}

TEST_CASE("opposing gradients give angle pi, identical give 0") {
    auto inst = box_instance(3, -5.0, 5.0);
    auto a = axis_halfspace(3, 0);
    auto b = axis_halfspace(3, 0);
    b.lin[0] = -1.0;
    inst.constraints = {a, b};
    FeatureSettings settings;
    settings.n_samples = 100;
    auto fv = extract_features(inst, settings, 3);
    CHECK(fv.angle_mean == doctest::Approx(M_PI).epsilon(1e-12));

    inst.constraints = {a, a};
    fv = extract_features(inst, settings, 3);
    CHECK(fv.angle_mean == doctest::Approx(0.0));
}

TEST_CASE("vicinity ratio reflects a constraint cutting through the optimum") {
    auto inst = box_instance(6, -5.0, 5.0);
    inst.constraints = {axis_halfspace(6, 0)}; // boundary passes through origin
    FeatureSettings settings;
    settings.n_samples = 50000;
    const auto fv = extract_features(inst, settings, 17);
    CHECK(fv.feasibility_ratio_near_optimum == doctest::Approx(0.5).epsilon(0.05));
    // a far-away constraint leaves the vicinity fully feasible
    inst.constraints = {axis_halfspace(6, 0, 4.0)}; // x1 <= -4
    const auto fv2 = extract_features(inst, settings, 17);
    CHECK(fv2.feasibility_ratio_near_optimum == 0.0); // optimum ball at origin infeasible
    CHECK_FALSE(fv2.optimum_feasible);
}

TEST_CASE("features are deterministic for a fixed seed") {
    GeneratorSpec spec;
    spec.n_linear = 2;
    spec.n_quadratic = 1;
    const auto inst = random_instance(spec, 21);
    FeatureSettings settings;
    settings.n_samples = 2000;
    const auto a = extract_features(inst, settings, 9);
    const auto b = extract_features(inst, settings, 9);
    CHECK(a.encode() == b.encode());
    const auto c = extract_features(inst, settings, 10);
    CHECK(a.encode() != c.encode());
}

TEST_CASE("encode has the documented fixed length") {
    const auto inst = box_instance(3);
    FeatureSettings settings;
    settings.n_samples = 50;
    const auto fv = extract_features(inst, settings, 1);
    CHECK(fv.encode().size() == FeatureVector::kLength);
    CHECK(FeatureVector::field_names().size() == FeatureVector::kLength);
}

TEST_CASE("normalization round-trips and zeroes constant fields") {
    std::vector<std::vector<double>> data = {{1.0, 5.0}, {2.0, 5.0}, {4.0, 5.0}};
    const auto norm = fit_normalization(data);
    CHECK(norm.std_dev[1] == 0.0);
    const auto z = norm.apply({2.0, 5.0});
    CHECK(z[1] == 0.0);
    const auto back = norm.invert(norm.apply({4.0, 5.0}));
    CHECK(back[0] == doctest::Approx(4.0));
    CHECK(back[1] == doctest::Approx(5.0));
    // z-scored data has mean ~0, sd ~1 per varying field
    double m = 0.0;
    for (const auto& row : data) m += norm.apply(row)[0];
    CHECK(std::abs(m / 3.0) < 1e-12);
}

TEST_CASE("feature table csv has the exact header and one row per instance") {
    const auto inst = box_instance(2);
    FeatureSettings settings;
    settings.n_samples = 50;
    const auto fv = extract_features(inst, settings, 1);
    const auto csv = feature_table_csv({"one", "two"}, {fv, fv});
    std::string header = "instance_id";
    for (const auto& name : FeatureVector::field_names()) header += "," + name;
    CHECK(csv.substr(0, csv.find('\n')) == header);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}
