#include "copsel/cop.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

#include "copsel/errors.hpp"
#include "copsel/rng.hpp"

namespace copsel {

using ordered_json = nlohmann::ordered_json;

void SearchSpace::validate() const {
    if (dimension < 1) throw ContractError("SearchSpace: dimension must be >= 1");
    if (static_cast<int>(lower.size()) != dimension || static_cast<int>(upper.size()) != dimension)
        throw ContractError("SearchSpace: bound vectors must have length dimension");
    for (int i = 0; i < dimension; ++i)
        if (!(lower[i] < upper[i]))
            throw ContractError("SearchSpace: lower[" + std::to_string(i) + "] must be < upper");
}

double SearchSpace::mean_width() const {
    double s = 0.0;
    for (int i = 0; i < dimension; ++i) s += upper[i] - lower[i];
    return s / dimension;
}

void SearchSpace::clamp(std::span<double> x) const {
    for (int i = 0; i < dimension; ++i) x[i] = std::clamp(x[i], lower[i], upper[i]);
}

bool SearchSpace::contains(std::span<const double> x) const {
    for (int i = 0; i < dimension; ++i)
        if (x[i] < lower[i] || x[i] > upper[i]) return false;
    return true;
}

std::string objective_name(Objective o) {
    switch (o) {
        case Objective::Sphere: return "sphere";
        case Objective::Ackley: return "ackley";
        case Objective::Rosenbrock: return "rosenbrock";
    }
    throw ContractError("objective_name: bad tag");
}

Objective parse_objective(const std::string& name) {
    if (name == "sphere") return Objective::Sphere;
    if (name == "ackley") return Objective::Ackley;
    if (name == "rosenbrock") return Objective::Rosenbrock;
    throw ParseError("objective", "unknown objective '" + name + "'");
}

std::vector<double> known_optimum(Objective o, int dimension) {
    return std::vector<double>(dimension, o == Objective::Rosenbrock ? 1.0 : 0.0);
}

std::string constraint_kind_name(ConstraintKind k) {
    switch (k) {
        case ConstraintKind::LinearInequality: return "linear_inequality";
        case ConstraintKind::QuadraticInequality: return "quadratic_inequality";
        case ConstraintKind::Equality: return "equality";
    }
    throw ContractError("constraint_kind_name: bad tag");
}

ConstraintKind parse_constraint_kind(const std::string& name) {
    if (name == "linear_inequality") return ConstraintKind::LinearInequality;
    if (name == "quadratic_inequality") return ConstraintKind::QuadraticInequality;
    if (name == "equality") return ConstraintKind::Equality;
    throw ParseError("kind", "unknown constraint kind '" + name + "'");
}

double Constraint::value(std::span<const double> x) const {
    double g = offset;
    for (std::size_t i = 0; i < x.size(); ++i) g += quad[i] * x[i] * x[i] + lin[i] * x[i];
    return g;
}

std::vector<double> Constraint::gradient(std::span<const double> x) const {
    std::vector<double> grad(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) grad[i] = 2.0 * quad[i] * x[i] + lin[i];
    return grad;
}

namespace {
bool all_zero(const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double c) { return c == 0.0; });
}
} // namespace

void Constraint::validate(int dimension) const {
    if (static_cast<int>(quad.size()) != dimension || static_cast<int>(lin.size()) != dimension)
        throw ContractError("Constraint: coefficient vectors must have length dimension");
    if (kind == ConstraintKind::LinearInequality) {
        if (!all_zero(quad))
            throw ContractError("Constraint: linear inequality must have zero quadratic part");
        if (all_zero(lin))
            throw ContractError("Constraint: linear inequality needs a nonzero linear part");
    }
    if (kind == ConstraintKind::QuadraticInequality && all_zero(quad))
        throw ContractError("Constraint: quadratic inequality needs a nonzero quadratic part");
}

void COPInstance::validate() const {
    space.validate();
    if (!(epsilon > 0.0)) throw ContractError("COPInstance: epsilon must be positive");
    for (const auto& c : constraints) c.validate(space.dimension);
    if (objective == Objective::Rosenbrock && space.dimension < 2)
        throw ContractError("COPInstance: Rosenbrock needs dimension >= 2");
    if (!space.contains(optimum()))
        throw ContractError("COPInstance: known optimum outside the search space");
}

double evaluate_objective(const COPInstance& inst, std::span<const double> x) {
    const int d = inst.space.dimension;
    if (static_cast<int>(x.size()) != d)
        throw ContractError("evaluate_objective: dimension mismatch");
    switch (inst.objective) {
        case Objective::Sphere: {
            double s = 0.0;
            for (double xi : x) s += xi * xi;
            return s;
        }
        case Objective::Ackley: {
            double sq = 0.0, cs = 0.0;
            for (double xi : x) {
                sq += xi * xi;
                cs += std::cos(2.0 * std::numbers::pi * xi);
            }
            return -20.0 * std::exp(-0.2 * std::sqrt(sq / d)) - std::exp(cs / d) + 20.0 +
                   std::numbers::e;
        }
        case Objective::Rosenbrock: {
            double s = 0.0;
            for (int i = 0; i + 1 < d; ++i) {
                const double a = x[i + 1] - x[i] * x[i];
                const double b = 1.0 - x[i];
                s += 100.0 * a * a + b * b;
            }
            return s;
        }
    }
    throw ContractError("evaluate_objective: bad objective tag");
}

Violation violation(const COPInstance& inst, std::span<const double> x) {
    if (static_cast<int>(x.size()) != inst.space.dimension)
        throw ContractError("violation: dimension mismatch");
    Violation v;
    v.per_constraint.reserve(inst.constraints.size());
    for (const auto& c : inst.constraints) {
        const double g = c.value(x);
        double amount;
        if (c.kind == ConstraintKind::Equality)
            amount = std::max(0.0, std::abs(g) - inst.epsilon);
        else
            amount = std::max(0.0, g);
        v.per_constraint.push_back(amount);
        v.phi += amount;
    }
    return v;
}

Ordering epsilon_compare(FPhi a, FPhi b, double eps_level) {
    if (std::isnan(a.f) || std::isnan(a.phi) || std::isnan(b.f) || std::isnan(b.phi) ||
        std::isnan(eps_level))
        throw ContractError("epsilon_compare: NaN operand");
    const bool by_f = (a.phi <= eps_level && b.phi <= eps_level) || a.phi == b.phi;
    const double lhs = by_f ? a.f : a.phi;
    const double rhs = by_f ? b.f : b.phi;
    if (lhs < rhs) return Ordering::Less;
    if (lhs > rhs) return Ordering::Greater;
    return Ordering::Equal;
}

namespace {

std::vector<double> draw_vector(Rng& rng, int d, double lo, double hi) {
    std::vector<double> v(d);
    for (auto& c : v) c = uniform(rng, lo, hi);
    return v;
}

Constraint draw_constraint(Rng& rng, const GeneratorSpec& spec, ConstraintKind kind) {
    const int d = spec.dimension;
    Constraint c;
    c.kind = kind;
    c.lin = draw_vector(rng, d, spec.coeff_min, spec.coeff_max);
    if (kind == ConstraintKind::LinearInequality) {
        c.quad.assign(d, 0.0);
        while (all_zero(c.lin)) c.lin = draw_vector(rng, d, spec.coeff_min, spec.coeff_max);
    } else {
        c.quad = draw_vector(rng, d, spec.coeff_min, spec.coeff_max);
        while (all_zero(c.quad)) c.quad = draw_vector(rng, d, spec.coeff_min, spec.coeff_max);
    }
    c.offset = uniform(rng, spec.offset_min, spec.offset_max);
    return c;
}

} // namespace

COPInstance random_instance(const GeneratorSpec& spec, std::uint64_t seed) {
    if (spec.dimension < 1) throw ContractError("random_instance: dimension must be >= 1");
    Rng rng(seed);

    COPInstance inst;
    inst.objective = spec.objective;
    inst.epsilon = spec.epsilon;
    inst.space.dimension = spec.dimension;
    inst.space.lower.assign(spec.dimension, spec.box_lower);
    inst.space.upper.assign(spec.dimension, spec.box_upper);
    inst.id = spec.id_prefix + "-" + objective_name(spec.objective) + "-" + std::to_string(seed);

    const auto opt = known_optimum(spec.objective, spec.dimension);

    // pins the boundary to the optimum: g(opt) becomes exactly 0
    auto maybe_activate = [&](Constraint c) {
        if (spec.optimum_feasible && uniform(rng, 0.0, 1.0) < spec.active_probability)
            c.offset -= c.value(opt);
        return c;
    };

    for (int attempt = 0; attempt <= spec.max_retries; ++attempt) {
        inst.constraints.clear();
        for (int i = 0; i < spec.n_linear; ++i)
            inst.constraints.push_back(
                maybe_activate(draw_constraint(rng, spec, ConstraintKind::LinearInequality)));
        for (int i = 0; i < spec.n_quadratic; ++i)
            inst.constraints.push_back(
                maybe_activate(draw_constraint(rng, spec, ConstraintKind::QuadraticInequality)));
        for (int i = 0; i < spec.n_equality; ++i) {
            auto c = draw_constraint(rng, spec, ConstraintKind::Equality);
            if (spec.optimum_feasible) {
                // pin the offset so h(optimum) = 0 exactly
                c.offset = 0.0;
                c.offset = -c.value(opt);
            }
            inst.constraints.push_back(c);
        }
        const bool feasible = violation(inst, opt).phi == 0.0;
        if (feasible == spec.optimum_feasible) {
            inst.validate();
            return inst;
        }
    }
    throw GenerationError("random_instance: could not satisfy optimum_feasible=" +
                              std::string(spec.optimum_feasible ? "true" : "false"),
                          spec.max_retries);
}

std::string serialize(const COPInstance& inst) {
    ordered_json j;
    j["id"] = inst.id;
    j["objective"] = objective_name(inst.objective);
    j["dimension"] = inst.space.dimension;
    j["lower"] = inst.space.lower;
    j["upper"] = inst.space.upper;
    j["epsilon"] = inst.epsilon;
    ordered_json cs = ordered_json::array();
    for (const auto& c : inst.constraints) {
        ordered_json jc;
        jc["kind"] = constraint_kind_name(c.kind);
        jc["quad"] = c.quad;
        jc["lin"] = c.lin;
        jc["offset"] = c.offset;
        cs.push_back(std::move(jc));
    }
    j["constraints"] = std::move(cs);
    return j.dump(2) + "\n";
}

namespace {

const ordered_json& require_field(const ordered_json& j, const std::string& name) {
    auto it = j.find(name);
    if (it == j.end()) throw ParseError(name, "missing field");
    return *it;
}

std::vector<double> parse_number_array(const ordered_json& j, const std::string& name) {
    if (!j.is_array()) throw ParseError(name, "expected an array of numbers");
    std::vector<double> v;
    v.reserve(j.size());
    for (const auto& e : j) {
        if (!e.is_number()) throw ParseError(name, "expected an array of numbers");
        v.push_back(e.get<double>());
    }
    return v;
}

void note_unknown_fields(const ordered_json& j, std::initializer_list<const char*> known,
                         const std::string& where, std::vector<std::string>* warnings) {
    if (!warnings) return;
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool found = false;
        for (const char* k : known)
            if (it.key() == k) { found = true; break; }
        if (!found) warnings->push_back("unknown field '" + where + it.key() + "' ignored");
    }
}

} // namespace

COPInstance deserialize(const std::string& text, std::vector<std::string>* warnings) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("document", e.what());
    }
    if (!j.is_object()) throw ParseError("document", "expected a JSON object");

    COPInstance inst;
    inst.id = require_field(j, "id").get<std::string>();
    inst.objective = parse_objective(require_field(j, "objective").get<std::string>());
    const auto& jd = require_field(j, "dimension");
    if (!jd.is_number_integer()) throw ParseError("dimension", "expected an integer");
    inst.space.dimension = jd.get<int>();
    inst.space.lower = parse_number_array(require_field(j, "lower"), "lower");
    inst.space.upper = parse_number_array(require_field(j, "upper"), "upper");
    const auto& je = require_field(j, "epsilon");
    if (!je.is_number()) throw ParseError("epsilon", "expected a number");
    inst.epsilon = je.get<double>();

    const auto& jcs = require_field(j, "constraints");
    if (!jcs.is_array()) throw ParseError("constraints", "expected an array");
    for (std::size_t i = 0; i < jcs.size(); ++i) {
        const auto& jc = jcs[i];
        const std::string where = "constraints[" + std::to_string(i) + "].";
        if (!jc.is_object()) throw ParseError(where, "expected an object");
        Constraint c;
        c.kind = parse_constraint_kind(require_field(jc, "kind").get<std::string>());
        c.quad = parse_number_array(require_field(jc, "quad"), where + "quad");
        c.lin = parse_number_array(require_field(jc, "lin"), where + "lin");
        const auto& jo = require_field(jc, "offset");
        if (!jo.is_number()) throw ParseError(where + "offset", "expected a number");
        c.offset = jo.get<double>();
        note_unknown_fields(jc, {"kind", "quad", "lin", "offset"}, where, warnings);
        inst.constraints.push_back(std::move(c));
    }
    note_unknown_fields(
        j, {"id", "objective", "dimension", "lower", "upper", "epsilon", "constraints"}, "",
        warnings);

    inst.validate();
    return inst;
}

void save_instance(const COPInstance& inst, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    out << serialize(inst);
}

COPInstance load_instance(const std::string& path, std::vector<std::string>* warnings) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return deserialize(ss.str(), warnings);
}

} // namespace copsel
