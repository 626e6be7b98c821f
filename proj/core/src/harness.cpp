#include "copsel/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "copsel/errors.hpp"
#include "copsel/format.hpp"
#include "copsel/rng.hpp"
#include "copsel/stats.hpp"

namespace copsel {

namespace {

std::map<SolverKind, SolverConfig> default_configs() {
    std::map<SolverKind, SolverConfig> configs;
    for (auto kind : kAllSolvers) configs[kind] = SolverConfig::defaults(kind);
    return configs;
}

std::map<SolverKind, double> measure_all(const COPInstance& inst, const ExperimentConfig& config,
                                         std::uint64_t seed) {
    std::map<SolverKind, double> fen;
    const auto configs = default_configs();
    for (auto kind : kAllSolvers)
        fen[kind] = measure(inst, kind, configs.at(kind), config.profile.budget,
                            config.profile.target_precision, config.profile.repeats,
                            derive_seed(seed, {solver_name(kind)}))
                        .mean_fen;
    return fen;
}

SolverKind argmin_fen(const std::map<SolverKind, double>& fen) {
    SolverKind best = SolverKind::DE;
    for (auto kind : kAllSolvers)
        if (fen.at(kind) < fen.at(best)) best = kind;
    return best;
}

// measured mean FENs are stochastic; predictions within 2% of the measured
// minimum count as correct
bool prediction_correct(SolverKind predicted, const std::map<SolverKind, double>& measured) {
    const double best = measured.at(argmin_fen(measured));
    return measured.at(predicted) <= 1.02 * best;
}

// constraint structures cycled over training instances so the pooled data
// spans linear, quadratic, and mixed constraint sets
const std::vector<ProblemLabel>& training_structures() {
    static const std::vector<ProblemLabel> structures = {{Objective::Sphere, 2, 0},
                                                         {Objective::Sphere, 0, 2},
                                                         {Objective::Sphere, 1, 1}};
    return structures;
}

// n fresh random instances, measured like the benchmark's ground truth
std::vector<EvolvedInstance> fresh_pool(const ExperimentConfig& config, std::size_t n,
                                        const std::string& tag) {
    const auto& structures = training_structures();
    std::vector<EvolvedInstance> pool;
    pool.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto spec = config.generator_spec(structures[i % structures.size()]);
        spec.id_prefix = "fresh-" + tag + "-" + std::to_string(i);
        EvolvedInstance e;
        e.instance = random_instance(
            spec, derive_seed(config.master_seed, {"fresh", tag, std::to_string(i)}));
        e.scores = measure_all(
            e.instance, config,
            derive_seed(config.master_seed, {"fresh", tag, "score", std::to_string(i)}));
        e.subset_tags.insert(SubsetTag::RandomPool);
        pool.push_back(std::move(e));
    }
    return pool;
}

} // namespace

std::vector<EvolveResult> evolve_all(const ExperimentConfig& config) {
    const auto& structures = training_structures();
    std::vector<EvolveResult> runs;
    int index = 0;
    for (bool hard : {true, false})
        for (auto target : kAllSolvers) {
            EvolverConfig ec;
            ec.target = target;
            ec.target_hard = hard;
            ec.population_size = config.profile.evolver_population;
            ec.generations = config.profile.evolver_generations;
            ec.inner_budget = config.profile.budget;
            ec.inner_repeats = config.profile.evolver_inner_repeats;
            ec.final_repeats = config.profile.repeats;
            ec.target_precision = config.profile.target_precision;
            const auto base = config.generator_spec(structures[index % structures.size()]);
            runs.push_back(evolve(ec, base,
                                  derive_seed(config.master_seed,
                                              {"evolver", std::to_string(index)})));
            ++index;
        }
    return runs;
}

std::vector<EvolvedInstance> training_subset(const ExperimentConfig& config,
                                             const std::vector<EvolveResult>& runs,
                                             SubsetKind kind) {
    const auto n = static_cast<std::size_t>(config.training_size(kind));
    const auto seed = derive_seed(config.master_seed, {"study", subset_kind_name(kind)});
    if (config.ro_fresh) {
        if (kind == SubsetKind::RO) return fresh_pool(config, n, "RO");
        if (kind == SubsetKind::PFR) {
            auto pool = select_subset(runs, SubsetKind::PF, n / 2 + n % 2, seed);
            const auto rest = fresh_pool(config, n / 2, "PFR");
            pool.insert(pool.end(), rest.begin(), rest.end());
            return pool;
        }
    }
    return select_subset(runs, kind, n, seed);
}

PredictionModel train_subset_model(const std::vector<EvolvedInstance>& subset, SubsetKind kind,
                                   const ExperimentConfig& config) {
    if (subset.empty()) throw DataError("train_subset_model: empty training subset");
    const auto configs = default_configs();
    const double budget = static_cast<double>(config.profile.budget);

    std::vector<std::vector<double>> inputs;
    std::vector<std::vector<double>> targets;
    for (const auto& e : subset) {
        const auto features =
            extract_features(e.instance, config.feature_settings,
                             derive_seed(config.master_seed, {"features", e.instance.id}));
        inputs.push_back(model_input(features, configs));
        targets.push_back({e.scores.at(SolverKind::DE) / budget,
                           e.scores.at(SolverKind::ES) / budget,
                           e.scores.at(SolverKind::PSO) / budget});
    }

    const auto input_norm = fit_normalization(inputs);
    const auto output_norm = fit_normalization(targets);

    std::vector<TrainingExample> dataset;
    dataset.reserve(inputs.size());
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        TrainingExample ex;
        ex.input = input_norm.apply(inputs[i]);
        const auto t = output_norm.apply(targets[i]);
        ex.target = {t[0], t[1], t[2]};
        dataset.push_back(std::move(ex));
    }

    TrainConfig tc;
    tc.seed = derive_seed(config.master_seed, {"train", subset_kind_name(kind)});
    auto model = train_lm(dataset, tc);
    model.input_norm = input_norm;
    model.output_norm = output_norm;
    model.metadata.subset_kind = subset_kind_name(kind);
    model.metadata.budget = config.profile.budget;
    model.metadata.feature_settings = config.feature_settings;
    return model;
}

namespace {

struct TestInstance {
    std::string label;
    COPInstance instance;
    std::map<SolverKind, double> actual_fen;
};

std::vector<TestInstance> build_test_set(const ExperimentConfig& config,
                                         const std::vector<EvolveResult>& runs) {
    std::vector<TestInstance> tests;

    // the extreme member of each run's front, in the run's own sense
    for (const auto& run : runs) {
        const EvolvedInstance* extreme = nullptr;
        for (const auto& e : run.population) {
            if (e.pareto_rank != 1) continue;
            if (!extreme ||
                (run.config.target_hard ? e.hardness_gap() > extreme->hardness_gap()
                                        : e.hardness_gap() < extreme->hardness_gap()))
                extreme = &e;
        }
        if (!extreme) continue;
        TestInstance t;
        t.label = solver_name(run.config.target) +
                  std::string(run.config.target_hard ? " hard (" : " easy (") +
                  std::to_string(extreme->instance.constraints.size()) + " c)";
        t.instance = extreme->instance;
        tests.push_back(std::move(t));
    }

    // fresh random instances with cycled constraint mixes
    const std::vector<std::pair<int, int>> mixes = {{1, 0}, {0, 1}, {2, 0},
                                                    {0, 2}, {1, 1}, {2, 1}};
    for (std::size_t i = 0; i < mixes.size(); ++i) {
        ProblemLabel label{Objective::Sphere, mixes[i].first, mixes[i].second};
        auto spec = config.generator_spec(label);
        spec.id_prefix = "rnd" + std::to_string(i + 1);
        TestInstance t;
        t.instance = random_instance(
            spec, derive_seed(config.master_seed, {"study", "random", std::to_string(i)}));
        t.label = "Rnd. " + std::to_string(i + 1) + " (" +
                  std::to_string(mixes[i].first + mixes[i].second) + " c)";
        tests.push_back(std::move(t));
    }

    for (auto& t : tests)
        t.actual_fen = measure_all(t.instance, config,
                                   derive_seed(config.master_seed, {"study", "truth", t.label}));
    return tests;
}

} // namespace

SubsetStudyReport run_subset_study(const ExperimentConfig& config,
                                   const std::vector<EvolveResult>& runs) {
    SubsetStudyReport report;
    const auto tests = build_test_set(config, runs);
    const auto configs = default_configs();

    for (auto kind : config.subset_kinds) {
        const auto subset = training_subset(config, runs, kind);
        const auto model = train_subset_model(subset, kind, config);

        std::vector<StudyRow> rows;
        for (const auto& t : tests) {
            StudyRow row;
            row.instance_label = t.label;
            const auto prediction =
                predict(model, t.instance, configs,
                        derive_seed(config.master_seed, {"features", t.instance.id}));
            row.predicted = prediction.best;
            row.predicted_fen = prediction.predicted_fen;
            row.actual_fen = t.actual_fen;
            row.actual = argmin_fen(t.actual_fen);
            row.wrong = !prediction_correct(row.predicted, t.actual_fen);
            rows.push_back(std::move(row));
        }
        report.rows[kind] = std::move(rows);
    }
    return report;
}

std::vector<BenchmarkRow> run_benchmark(const ExperimentConfig& config,
                                        const PredictionModel& model_a,
                                        const PredictionModel& model_b) {
    if (model_a.metadata.feature_settings != model_b.metadata.feature_settings)
        throw DataError("run_benchmark: models trained with different feature settings");
    const auto configs = default_configs();
    std::vector<BenchmarkRow> rows;

    for (const auto& label : config.test_suite) {
        BenchmarkRow row;
        row.problem_label = label.label();
        row.repeats = config.profile.repeats;
        std::vector<double> dev_a, dev_b;

        for (int r = 0; r < config.profile.repeats; ++r) {
            auto spec = config.generator_spec(label);
            spec.id_prefix = "bench-r" + std::to_string(r);
            const auto inst = random_instance(
                spec,
                derive_seed(config.master_seed, {"bench", label.token(), std::to_string(r)}));
            const auto measured = measure_all(
                inst, config,
                derive_seed(config.master_seed, {"bench", "truth", label.token(),
                                                 std::to_string(r)}));
            const auto feature_seed =
                derive_seed(config.master_seed, {"features", inst.id});

            const auto pred_a = predict(model_a, inst, configs, feature_seed);
            const auto pred_b = predict(model_b, inst, configs, feature_seed);
            if (prediction_correct(pred_a.best, measured)) ++row.success_a;
            if (prediction_correct(pred_b.best, measured)) ++row.success_b;
            dev_a.push_back(
                std::abs(pred_a.predicted_fen.at(pred_a.best) - measured.at(pred_a.best)));
            dev_b.push_back(
                std::abs(pred_b.predicted_fen.at(pred_b.best) - measured.at(pred_b.best)));
        }

        row.avg_fen_deviation_a = mean(dev_a);
        row.avg_fen_deviation_b = mean(dev_b);
        row.p_value = welch_t_test(dev_a, dev_b, &row.p_degenerate);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string emit_benchmark_report(const std::vector<BenchmarkRow>& rows, ReportFormat format,
                                  const std::string& model_a_name,
                                  const std::string& model_b_name) {
    std::ostringstream out;
    if (format == ReportFormat::Csv) {
        out << "problem,repeats,success_rate_" << model_b_name << ",success_rate_" << model_a_name
            << ",avg_fen_deviation_" << model_b_name << ",avg_fen_deviation_" << model_a_name
            << ",p_value,p_degenerate\n";
        for (const auto& r : rows)
            out << '"' << r.problem_label << "\"," << r.repeats << ',' << r.success_b << ','
                << r.success_a << ',' << fmt_g(r.avg_fen_deviation_b) << ','
                << fmt_g(r.avg_fen_deviation_a) << ',' << fmt_g(r.p_value) << ','
                << (r.p_degenerate ? 1 : 0) << '\n';
    } else {
        out << "| Problem | Success Rate " << model_b_name << " | Success Rate " << model_a_name
            << " | Average deviation of FEN for " << model_b_name
            << " | Average deviation of FEN for " << model_a_name << " | P value |\n";
        out << "|---|---|---|---|---|---|\n";
        for (const auto& r : rows) {
            char pbuf[32];
            std::snprintf(pbuf, sizeof(pbuf), "%.3f", r.p_value);
            out << "| " << r.problem_label << " | " << r.success_b << " | " << r.success_a
                << " | " << fmt_kilo(r.avg_fen_deviation_b) << " | "
                << fmt_kilo(r.avg_fen_deviation_a) << " | " << pbuf << " |\n";
        }
    }
    return out.str();
}

namespace {

std::string signed_kilo(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%+.1fK", v / 1000.0);
    return buf;
}

} // namespace

std::string emit_study_report(const std::vector<StudyRow>& rows, ReportFormat format) {
    std::ostringstream out;
    if (format == ReportFormat::Csv) {
        out << "instance,predicted_alg,actual_alg,error";
        for (auto kind : kAllSolvers)
            out << ",predicted_fen_" << solver_name(kind) << ",actual_fen_" << solver_name(kind)
                << ",error_fen_" << solver_name(kind);
        out << '\n';
        for (const auto& r : rows) {
            out << '"' << r.instance_label << "\"," << solver_name(r.predicted) << ','
                << solver_name(r.actual) << ',' << (r.wrong ? "YES" : "NO");
            for (auto kind : kAllSolvers) {
                const double p = r.predicted_fen.at(kind);
                const double a = r.actual_fen.at(kind);
                out << ',' << fmt_g(p) << ',' << fmt_g(a) << ',' << fmt_g(p - a);
            }
            out << '\n';
        }
    } else {
        out << "| Instance | Predicted alg. | Actual alg. | Error |";
        for (auto kind : kAllSolvers)
            out << " Predicted FEN " << solver_name(kind) << " | Actual FEN " << solver_name(kind)
                << " | Error " << solver_name(kind) << " |";
        out << "\n|---|---|---|---|---|---|---|---|---|---|---|---|---|\n";
        for (const auto& r : rows) {
            out << "| " << r.instance_label << " | " << solver_name(r.predicted) << " | "
                << solver_name(r.actual) << " | " << (r.wrong ? "YES" : "NO") << " |";
            for (auto kind : kAllSolvers) {
                const double p = r.predicted_fen.at(kind);
                const double a = r.actual_fen.at(kind);
                out << ' ' << fmt_kilo(p) << " | " << fmt_kilo(a) << " | " << signed_kilo(p - a)
                    << " |";
            }
            out << '\n';
        }
    }
    return out.str();
}

void run_full_study(const ExperimentConfig& config, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    auto write = [&](const std::string& name, const std::string& text) {
        std::ofstream out(fs::path(out_dir) / name, std::ios::binary);
        if (!out) throw DataError("cannot write '" + name + "' in '" + out_dir + "'");
        out << text;
    };
    write("config.txt", echo_config(config));

    const auto runs = evolve_all(config);
    for (const auto& run : runs) {
        const std::string label =
            solver_name(run.config.target) + std::string(run.config.target_hard ? "-hard" : "-easy");
        save_population(run, (fs::path(out_dir) / "populations" / label).string());
    }

    const auto study = run_subset_study(config, runs);
    for (const auto& [kind, rows] : study.rows) {
        write("study_" + subset_kind_name(kind) + ".csv",
              emit_study_report(rows, ReportFormat::Csv));
        write("study_" + subset_kind_name(kind) + ".md",
              emit_study_report(rows, ReportFormat::Markdown));
    }

    const auto pfr =
        train_subset_model(training_subset(config, runs, SubsetKind::PFR), SubsetKind::PFR, config);
    const auto ro =
        train_subset_model(training_subset(config, runs, SubsetKind::RO), SubsetKind::RO, config);
    save_model(pfr, (fs::path(out_dir) / "model_PFR.json").string());
    save_model(ro, (fs::path(out_dir) / "model_RO.json").string());

    const auto rows = run_benchmark(config, pfr, ro);
    write("benchmark.csv", emit_benchmark_report(rows, ReportFormat::Csv, "PFR", "RO"));
    write("benchmark.md", emit_benchmark_report(rows, ReportFormat::Markdown, "PFR", "RO"));
}

} // namespace copsel
