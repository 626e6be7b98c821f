#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "copsel/cop.hpp"
#include "copsel/solvers.hpp"

namespace copsel {

enum class SubsetTag { ExtremePoint, ParetoFront, RandomPool };
enum class SubsetKind { EP, PF, RO, PFR };

std::string subset_kind_name(SubsetKind k);
SubsetKind parse_subset_kind(const std::string& name);
std::string subset_tag_name(SubsetTag t);

/// A COP instance scored against all three solvers, with its standing in the
/// bi-objective instance-evolution run that produced it.
struct EvolvedInstance {
    COPInstance instance;
    std::map<SolverKind, double> scores; // mean FEN per solver
    SolverKind target = SolverKind::DE;
    bool target_hard = true;
    int pareto_rank = 0; // 1 = non-dominated front
    std::set<SubsetTag> subset_tags;

    double target_fen() const { return scores.at(target); }
    double others_mean_fen() const;
    /// Ratio fen(target) / mean fen(others); the hard/easy proxy.
    double hardness_gap() const { return target_fen() / others_mean_fen(); }
};

/// a dominates b in the bi-objective sense: at least as high on fen(target),
/// at least as low on the mean fen of the other solvers, strictly better on
/// one. target_hard = false swaps both senses.
bool dominates(const std::map<SolverKind, double>& a, const std::map<SolverKind, double>& b,
               SolverKind target, bool target_hard = true);

struct EvolverConfig {
    SolverKind target = SolverKind::DE;
    bool target_hard = true;
    int population_size = 40;
    int generations = 25;
    double de_scale = 0.7;
    double de_crossover = 0.9;
    long inner_budget = 30000;
    int inner_repeats = 3;
    int final_repeats = 0; // > 0: re-score the final population at this count
    double target_precision = 1e-4;
    std::map<SolverKind, SolverConfig> solver_configs; // empty -> defaults

    void validate() const;
};

struct EvolveResult {
    EvolverConfig config;
    GeneratorSpec base;
    std::vector<EvolvedInstance> population; // final, with pareto_rank set
    std::vector<EvolvedInstance> archive;    // every evaluated individual
};

/// DEMO-style loop: DE variation on the constraint-coefficient genome, trial
/// replaces its parent if it dominates it, joins the population if mutually
/// non-dominated, and the population is truncated back to size by
/// non-dominated sorting with crowding distance.
EvolveResult evolve(const EvolverConfig& config, const GeneratorSpec& base, std::uint64_t seed);

/// Assigns pareto_rank over `scores` (rank 1 = non-dominated) and returns
/// indices grouped by front.
std::vector<std::vector<std::size_t>> non_dominated_sort(std::vector<EvolvedInstance>& pop);

/// EP: per-front objective extremes pooled across runs; PF: uniform over
/// rank-1 fronts; RO: uniform over archives; PFR: half PF, half RO.
std::vector<EvolvedInstance> select_subset(const std::vector<EvolveResult>& runs, SubsetKind kind,
                                           std::size_t n, std::uint64_t seed);

/// Directory of instance documents plus manifest.csv (id, target, sense,
/// scores, pareto_rank, tags); the evaluation archive goes into an archive/
/// subdirectory in the same layout.
void save_population(const EvolveResult& result, const std::string& dir);

/// Inverse of save_population. A dump without an archive/ subdirectory falls
/// back to the population as the random pool.
EvolveResult load_population(const std::string& dir);

} // namespace copsel
