#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace copsel {

/// Box-constrained search space: lower[i] <= x[i] <= upper[i].
struct SearchSpace {
    int dimension = 0;
    std::vector<double> lower;
    std::vector<double> upper;

    /// Throws ContractError if bounds are malformed.
    void validate() const;
    double mean_width() const;
    void clamp(std::span<double> x) const;
    bool contains(std::span<const double> x) const;

    bool operator==(const SearchSpace&) const = default;
};

enum class Objective { Sphere, Ackley, Rosenbrock };

std::string objective_name(Objective o);
Objective parse_objective(const std::string& name);

/// All three objectives have a known optimum with value 0: the origin for
/// Sphere and Ackley, the all-ones point for Rosenbrock.
std::vector<double> known_optimum(Objective o, int dimension);
constexpr double known_optimum_value(Objective) { return 0.0; }

enum class ConstraintKind { LinearInequality, QuadraticInequality, Equality };

std::string constraint_kind_name(ConstraintKind k);
ConstraintKind parse_constraint_kind(const std::string& name);

/// Diagonal-quadratic constraint
///   g(x) = sum_i quad[i]*x_i^2 + sum_i lin[i]*x_i + offset,
/// read as g(x) <= 0 for inequalities and g(x) = 0 for equalities.
struct Constraint {
    ConstraintKind kind = ConstraintKind::LinearInequality;
    std::vector<double> quad;
    std::vector<double> lin;
    double offset = 0.0;

    double value(std::span<const double> x) const;
    /// grad g = 2*quad.*x + lin
    std::vector<double> gradient(std::span<const double> x) const;
    void validate(int dimension) const;

    bool operator==(const Constraint&) const = default;
};

/// A constrained continuous optimization problem: objective tag, constraint
/// set, box bounds, and the equality tolerance epsilon.
struct COPInstance {
    std::string id;
    Objective objective = Objective::Sphere;
    std::vector<Constraint> constraints;
    SearchSpace space;
    double epsilon = 1e-4;

    void validate() const;
    std::vector<double> optimum() const { return known_optimum(objective, space.dimension); }

    bool operator==(const COPInstance&) const = default;
};

struct Violation {
    double phi = 0.0;
    std::vector<double> per_constraint;
};

double evaluate_objective(const COPInstance& inst, std::span<const double> x);

/// per_constraint[i] = max(0, g_i(x)) for inequalities,
/// max(0, |h_j(x)| - epsilon) for equalities; phi is their sum.
Violation violation(const COPInstance& inst, std::span<const double> x);

/// Objective value paired with total constraint violation.
struct FPhi {
    double f = 0.0;
    double phi = 0.0;
};

enum class Ordering { Less, Equal, Greater };

/// Epsilon-level comparison. If both violations are at or below eps_level,
/// or the violations are equal, candidates are ordered by f; otherwise by
/// phi. Less means "a is better". NaN anywhere throws ContractError.
Ordering epsilon_compare(FPhi a, FPhi b, double eps_level);

inline bool better(FPhi a, FPhi b, double eps_level) {
    return epsilon_compare(a, b, eps_level) == Ordering::Less;
}

/// Recipe for random instances: constraint counts, coefficient ranges, and
/// whether the known optimum must stay feasible (or become infeasible).
struct GeneratorSpec {
    Objective objective = Objective::Sphere;
    int dimension = 5;
    int n_linear = 1;
    int n_quadratic = 0;
    int n_equality = 0;
    double box_lower = -5.0;
    double box_upper = 5.0;
    double coeff_min = -2.0;
    double coeff_max = 2.0;
    double offset_min = -5.0;
    double offset_max = 5.0;
    double epsilon = 1e-4;
    /// Probability for each inequality constraint to be shifted so it is
    /// exactly active at the known optimum. Active constraints are what makes
    /// an instance genuinely constrained; with 0 the optimum is almost surely
    /// interior and all solvers behave as if unconstrained.
    double active_probability = 0.3;
    bool optimum_feasible = true;
    int max_retries = 100;
    std::string id_prefix = "inst";

    int n_constraints() const { return n_linear + n_quadratic + n_equality; }
};

/// Deterministic for a fixed seed. Throws GenerationError if the
/// optimum-feasibility flag cannot be satisfied within max_retries.
COPInstance random_instance(const GeneratorSpec& spec, std::uint64_t seed);

/// Canonical text document, byte-stable for a given instance.
std::string serialize(const COPInstance& inst);

/// Unknown fields are accepted; their names are appended to *warnings when
/// given. Missing or ill-typed fields throw ParseError naming the field.
COPInstance deserialize(const std::string& text, std::vector<std::string>* warnings = nullptr);

void save_instance(const COPInstance& inst, const std::string& path);
COPInstance load_instance(const std::string& path, std::vector<std::string>* warnings = nullptr);

} // namespace copsel
