#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "copsel/config.hpp"
#include "copsel/evolver.hpp"
#include "copsel/model.hpp"
#include "copsel/solvers.hpp"

namespace copsel {

/// Per-instance comparison of predicted and measured solver performance.
struct StudyRow {
    std::string instance_label;
    SolverKind predicted = SolverKind::DE;
    SolverKind actual = SolverKind::DE;
    bool wrong = false; // the "Error" column: YES when predicted != actual
    std::map<SolverKind, double> predicted_fen;
    std::map<SolverKind, double> actual_fen;
};

struct SubsetStudyReport {
    // per subset kind, one row per test instance
    std::map<SubsetKind, std::vector<StudyRow>> rows;
    int skipped_rows = 0;
};

struct BenchmarkRow {
    std::string problem_label;
    int repeats = 0;
    int success_a = 0; // model A (first argument, PFR in the headline study)
    int success_b = 0;
    double avg_fen_deviation_a = 0.0;
    double avg_fen_deviation_b = 0.0;
    double p_value = 1.0;
    bool p_degenerate = false;
};

/// Trains one prediction model on the given subset of evolved instances.
/// Targets are each instance's recorded per-solver mean FENs, scaled by the
/// budget and z-scored.
PredictionModel train_subset_model(const std::vector<EvolvedInstance>& subset, SubsetKind kind,
                                   const ExperimentConfig& config);

/// Runs the six instance-evolution runs (3 targets x {hard, easy}) on
/// constraint structures cycled from the config's test suite.
std::vector<EvolveResult> evolve_all(const ExperimentConfig& config);

/// Resolves the training pool for one subset kind. EP and PF always come
/// from the runs via select_subset. With config.ro_fresh, the RO pool (and
/// PFR's random half) is freshly generated and measured at the profile's
/// budget and repeats instead of drawn from the evaluation archives.
std::vector<EvolvedInstance> training_subset(const ExperimentConfig& config,
                                             const std::vector<EvolveResult>& runs,
                                             SubsetKind kind);

/// Trains one model per configured subset kind and evaluates each on a
/// shared test set of hard/easy extreme instances and fresh random
/// instances.
SubsetStudyReport run_subset_study(const ExperimentConfig& config,
                                   const std::vector<EvolveResult>& runs);

/// Tables 5-7 analogue: per problem label, fresh seeded test instances,
/// success counts (predicted best equals measured best, 2% FEN ties count
/// either way) and mean absolute FEN deviation of the predicted solver for
/// both models, with a two-tail Welch p-value over the deviation samples.
std::vector<BenchmarkRow> run_benchmark(const ExperimentConfig& config,
                                        const PredictionModel& model_a,
                                        const PredictionModel& model_b);

enum class ReportFormat { Csv, Markdown };

std::string emit_benchmark_report(const std::vector<BenchmarkRow>& rows, ReportFormat format,
                                  const std::string& model_a_name,
                                  const std::string& model_b_name);
std::string emit_study_report(const std::vector<StudyRow>& rows, ReportFormat format);

/// End-to-end pipeline: evolve, train, study, benchmark; writes csv and
/// markdown reports plus the echoed config into out_dir. Byte-identical
/// outputs for identical configs.
void run_full_study(const ExperimentConfig& config, const std::string& out_dir);

} // namespace copsel
