#include "copsel/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "copsel/errors.hpp"
#include "copsel/format.hpp"

namespace copsel {

std::string solver_name(SolverKind k) {
    switch (k) {
        case SolverKind::DE: return "DE";
        case SolverKind::ES: return "ES";
        case SolverKind::PSO: return "PSO";
    }
    throw ContractError("solver_name: bad tag");
}

SolverKind parse_solver(const std::string& name) {
    if (name == "DE") return SolverKind::DE;
    if (name == "ES") return SolverKind::ES;
    if (name == "PSO") return SolverKind::PSO;
    throw ParseError("solver", "unknown solver '" + name + "'");
}

SolverConfig SolverConfig::defaults(SolverKind k) {
    SolverConfig c;
    c.kind = k;
    if (k == SolverKind::ES) c.population_size = 1;
    return c;
}

std::vector<double> SolverConfig::encode() const {
    const bool de = kind == SolverKind::DE;
    const bool es = kind == SolverKind::ES;
    const bool pso = kind == SolverKind::PSO;
    return {
        static_cast<double>(population_size),
        de ? de_scale : 0.0,
        de ? de_crossover : 0.0,
        de ? eps_level_initial : 0.0,
        de ? eps_level_decay_exponent : 0.0,
        de ? static_cast<double>(eps_level_cutoff_generation) : 0.0,
        de ? static_cast<double>(archive_size) : 0.0,
        de ? gradient_repair_prob : 0.0,
        es ? es_initial_step : 0.0,
        es ? es_covariance_learning : 0.0,
        pso ? static_cast<double>(pso_subswarm_count) : 0.0,
        pso ? static_cast<double>(pso_subswarm_size) : 0.0,
        pso ? pso_inertia : 0.0,
        pso ? pso_c1 : 0.0,
        pso ? pso_c2 : 0.0,
        pso ? static_cast<double>(pso_reshuffle_period) : 0.0,
    };
}

void SolverConfig::validate() const {
    if (population_size < 1) throw ConfigError("SolverConfig: population_size must be >= 1");
    if (kind == SolverKind::DE) {
        if (!(de_scale > 0.0 && de_scale <= 2.0))
            throw ConfigError("SolverConfig: de_scale must be in (0,2]");
        if (de_crossover < 0.0 || de_crossover > 1.0)
            throw ConfigError("SolverConfig: de_crossover must be in [0,1]");
        if (eps_level_initial < 0.0)
            throw ConfigError("SolverConfig: eps_level_initial must be non-negative");
        if (archive_size < 0) throw ConfigError("SolverConfig: archive_size must be >= 0");
        if (eps_level_cutoff_generation < 1)
            throw ConfigError("SolverConfig: eps_level_cutoff_generation must be >= 1");
        if (gradient_repair_prob < 0.0 || gradient_repair_prob > 1.0)
            throw ConfigError("SolverConfig: gradient_repair_prob must be in [0,1]");
    }
    if (kind == SolverKind::ES) {
        if (!(es_initial_step > 0.0))
            throw ConfigError("SolverConfig: es_initial_step must be positive");
        if (!(es_covariance_learning > 0.0 && es_covariance_learning < 1.0))
            throw ConfigError("SolverConfig: es_covariance_learning must be in (0,1)");
    }
    if (kind == SolverKind::PSO) {
        if (pso_subswarm_count < 1 || pso_subswarm_size < 1)
            throw ConfigError("SolverConfig: sub-swarm shape must be positive");
        if (pso_subswarm_count * pso_subswarm_size != population_size)
            throw ConfigError(
                "SolverConfig: pso_subswarm_count * pso_subswarm_size must equal population_size");
        if (pso_reshuffle_period < 1)
            throw ConfigError("SolverConfig: pso_reshuffle_period must be >= 1");
    }
}

Evaluator::Evaluator(const COPInstance& inst, long budget, double target_precision)
    : inst_(inst), budget_(budget), precision_(target_precision) {
    if (budget < 1) throw ConfigError("Evaluator: budget must be >= 1");
}

EvalPoint Evaluator::evaluate(std::span<const double> x) {
    ++count_;
    if (on_eval) on_eval();
    EvalPoint p;
    p.f = evaluate_objective(inst_, x);
    auto v = violation(inst_, x);
    p.phi = v.phi;
    p.per_constraint = std::move(v.per_constraint);
    if (!std::isfinite(p.f)) {
        p.f = std::numeric_limits<double>::infinity();
        p.phi = std::numeric_limits<double>::infinity();
    }
    if (epsilon_compare(p.fphi(), best_, 0.0) == Ordering::Less) best_ = p.fphi();
    if (success_fen_ == 0 && p.phi == 0.0 &&
        std::abs(p.f - known_optimum_value(inst_.objective)) <= precision_)
        success_fen_ = count_;
    return p;
}

double Evaluator::violation_only(std::span<const double> x) {
    ++count_;
    if (on_eval) on_eval();
    return violation(inst_, x).phi;
}

RunResult Evaluator::result(std::uint64_t seed) const {
    RunResult r;
    r.solved = succeeded();
    r.fen = r.solved ? success_fen_ : budget_;
    r.best_f = best_.f;
    r.best_phi = best_.phi;
    r.seed = seed;
    return r;
}

double eps_level_schedule(double eps0, double exponent, long generation, long cutoff_generation) {
    if (generation >= cutoff_generation || cutoff_generation <= 0) return 0.0;
    const double t = 1.0 - static_cast<double>(generation) / cutoff_generation;
    return eps0 * std::pow(t, exponent);
}

RunResult solve(const COPInstance& inst, const SolverConfig& config, long budget,
                double target_precision, std::uint64_t seed) {
    switch (config.kind) {
        case SolverKind::DE: return solve_de(inst, config, budget, target_precision, seed);
        case SolverKind::ES: return solve_es(inst, config, budget, target_precision, seed);
        case SolverKind::PSO: return solve_pso(inst, config, budget, target_precision, seed);
    }
    throw ContractError("solve: bad solver tag");
}

PerfEntry measure(const COPInstance& inst, SolverKind kind, const SolverConfig& config,
                  long budget, double target_precision, int repeats, std::uint64_t seed) {
    if (repeats < 1) throw ConfigError("measure: repeats must be >= 1");
    PerfEntry e;
    e.repeats = repeats;
    double fen_sum = 0.0;
    int solved = 0;
    for (int i = 0; i < repeats; ++i) {
        const auto r = solve(inst, config, budget, target_precision, seed + i);
        fen_sum += static_cast<double>(r.fen);
        if (r.solved) ++solved;
    }
    e.mean_fen = fen_sum / repeats;
    e.success_fraction = static_cast<double>(solved) / repeats;
    return e;
}

std::string performance_csv(const std::vector<PerformanceRecord>& records, long budget,
                            std::uint64_t seed) {
    auto sorted = records;
    std::sort(sorted.begin(), sorted.end(),
              [](const auto& a, const auto& b) { return a.instance_id < b.instance_id; });
    std::ostringstream out;
    out << "instance_id,solver,repeats,mean_fen,success_fraction,budget,seed\n";
    for (const auto& rec : sorted)
        for (auto kind : kAllSolvers) {
            auto it = rec.per_solver.find(kind);
            if (it == rec.per_solver.end()) continue;
            const auto& e = it->second;
            out << rec.instance_id << ',' << solver_name(kind) << ',' << e.repeats << ','
                << fmt_g(e.mean_fen) << ',' << fmt_g(e.success_fraction) << ',' << budget << ','
                << seed << '\n';
        }
    return out.str();
}

std::vector<PerformanceRecord> parse_performance_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw ParseError("header", "empty performance csv");
    std::map<std::string, PerformanceRecord> by_id;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string id, solver, field;
        PerfEntry e;
        try {
            std::getline(ls, id, ',');
            std::getline(ls, solver, ',');
            std::getline(ls, field, ',');
            e.repeats = std::stoi(field);
            std::getline(ls, field, ',');
            e.mean_fen = std::stod(field);
            std::getline(ls, field, ',');
            e.success_fraction = std::stod(field);
        } catch (const std::exception&) {
            throw ParseError("line " + std::to_string(lineno), "malformed performance row");
        }
        auto& rec = by_id[id];
        rec.instance_id = id;
        rec.per_solver[parse_solver(solver)] = e;
    }
    std::vector<PerformanceRecord> out;
    out.reserve(by_id.size());
    for (auto& [_, rec] : by_id) out.push_back(std::move(rec));
    return out;
}

} // namespace copsel
