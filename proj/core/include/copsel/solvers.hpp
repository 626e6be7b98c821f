#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "copsel/cop.hpp"

namespace copsel {

enum class SolverKind { DE, ES, PSO };

inline constexpr std::array<SolverKind, 3> kAllSolvers{SolverKind::DE, SolverKind::ES,
                                                       SolverKind::PSO};

std::string solver_name(SolverKind k);
SolverKind parse_solver(const std::string& name);

/// One parameter block covering all three solvers. Fields irrelevant to a
/// kind are ignored by that solver but still present so that encode() has a
/// fixed length and order regardless of kind.
struct SolverConfig {
    SolverKind kind = SolverKind::DE;
    int population_size = 40;

    // DE
    double de_scale = 0.7;
    double de_crossover = 0.9;
    double eps_level_initial = 1.0;
    double eps_level_decay_exponent = 5.0;
    // generation at which the eps level reaches exactly 0; independent of the
    // budget so that raising the budget only extends the trajectory
    long eps_level_cutoff_generation = 150;
    int archive_size = 40;
    double gradient_repair_prob = 0.2;

    // ES
    double es_initial_step = 1.0;
    double es_covariance_learning = 0.1;

    // PSO
    int pso_subswarm_count = 4;
    int pso_subswarm_size = 10;
    double pso_inertia = 0.7298;
    double pso_c1 = 1.49618;
    double pso_c2 = 1.49618;
    int pso_reshuffle_period = 5;

    static SolverConfig defaults(SolverKind k);

    /// Fixed-order numeric flattening for model input; fields that do not
    /// apply to `kind` are zero-filled.
    std::vector<double> encode() const;
    static constexpr int kEncodedLength = 16;

    void validate() const;
};

struct RunResult {
    bool solved = false;
    long fen = 0;
    double best_f = 0.0;
    double best_phi = 0.0;
    std::uint64_t seed = 0;
};

struct EvalPoint {
    double f = 0.0;
    double phi = 0.0;
    std::vector<double> per_constraint;
    FPhi fphi() const { return {f, phi}; }
};

/// Counts every objective-plus-violation evaluation and every violation-only
/// probe as one FEN, tracks the incumbent best, and records the evaluation
/// count at which the success criterion (phi = 0 and |f - f*| <= precision)
/// was first met. Non-finite objective values are mapped to the worst
/// possible point (f = phi = +inf).
class Evaluator {
public:
    Evaluator(const COPInstance& inst, long budget, double target_precision);

    EvalPoint evaluate(std::span<const double> x);
    double violation_only(std::span<const double> x);

    long count() const noexcept { return count_; }
    long budget() const noexcept { return budget_; }
    bool exhausted() const noexcept { return count_ >= budget_; }
    bool succeeded() const noexcept { return success_fen_ > 0; }
    long success_fen() const noexcept { return success_fen_; }
    FPhi best() const noexcept { return best_; }

    RunResult result(std::uint64_t seed) const;

    /// Test hook, invoked once per counted evaluation.
    std::function<void()> on_eval;

private:
    const COPInstance& inst_;
    long budget_;
    double precision_;
    long count_ = 0;
    long success_fen_ = 0;
    FPhi best_{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
};

RunResult solve_de(const COPInstance& inst, const SolverConfig& config, long budget,
                   double target_precision, std::uint64_t seed, Evaluator* ev_out = nullptr);
/// `violation_dirs_out`, when given, receives the final low-pass filtered
/// violating-step vector per constraint (diagnostic).
RunResult solve_es(const COPInstance& inst, const SolverConfig& config, long budget,
                   double target_precision, std::uint64_t seed, Evaluator* ev_out = nullptr,
                   std::vector<std::vector<double>>* violation_dirs_out = nullptr);
RunResult solve_pso(const COPInstance& inst, const SolverConfig& config, long budget,
                    double target_precision, std::uint64_t seed, Evaluator* ev_out = nullptr);

RunResult solve(const COPInstance& inst, const SolverConfig& config, long budget,
                double target_precision, std::uint64_t seed);

/// DE epsilon-level schedule: eps0 * (1 - g/Tc)^cp for g < Tc, exactly 0 from
/// the cutoff generation Tc onward.
double eps_level_schedule(double eps0, double exponent, long generation, long cutoff_generation);

struct PerfEntry {
    double mean_fen = 0.0;
    double success_fraction = 0.0;
    int repeats = 0;
};

struct PerformanceRecord {
    std::string instance_id;
    std::map<SolverKind, PerfEntry> per_solver;
};

/// `repeats` independent runs seeded seed + run_index; unsolved runs count
/// fen = budget.
PerfEntry measure(const COPInstance& inst, SolverKind kind, const SolverConfig& config,
                  long budget, double target_precision, int repeats, std::uint64_t seed);

/// Batch CSV: one row per (instance, solver), sorted by instance_id then
/// solver tag, with a header row.
std::string performance_csv(const std::vector<PerformanceRecord>& records, long budget,
                            std::uint64_t seed);
std::vector<PerformanceRecord> parse_performance_csv(const std::string& text);

} // namespace copsel
