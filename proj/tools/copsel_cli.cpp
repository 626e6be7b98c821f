#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "copsel/config.hpp"
#include "copsel/cop.hpp"
#include "copsel/errors.hpp"
#include "copsel/evolver.hpp"
#include "copsel/features.hpp"
#include "copsel/harness.hpp"
#include "copsel/model.hpp"
#include "copsel/rng.hpp"
#include "copsel/solvers.hpp"

namespace fs = std::filesystem;
using namespace copsel;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;

struct GlobalOpts {
    std::uint64_t seed = 1;
    std::string profile = "desk";
    std::string out = "out";
    std::string config_file;
    std::vector<std::string> overrides;
};

ExperimentConfig resolve(const GlobalOpts& g) {
    auto cfg = load_config(g.config_file, g.profile, g.overrides);
    cfg.master_seed = g.seed;
    return cfg;
}

void write_file(const fs::path& path, const std::string& text) {
    fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    out << text;
}

std::map<SolverKind, SolverConfig> default_configs() {
    std::map<SolverKind, SolverConfig> configs;
    for (auto kind : kAllSolvers) configs[kind] = SolverConfig::defaults(kind);
    return configs;
}

int run_gen(const GlobalOpts& g, const std::string& objective, int n_lin, int n_quad, int n_eq,
            int count, int dimension) {
    const auto cfg = resolve(g);
    ProblemLabel label;
    label.objective = parse_objective(objective);
    label.n_linear = n_lin;
    label.n_quadratic = n_quad;
    auto spec = cfg.generator_spec(label);
    spec.n_equality = n_eq;
    if (dimension > 0) spec.dimension = dimension;
    fs::create_directories(g.out);
    for (int i = 0; i < count; ++i) {
        spec.id_prefix = "gen-" + std::to_string(i + 1);
        const auto inst =
            random_instance(spec, derive_seed(cfg.master_seed, {"gen", std::to_string(i)}));
        const auto path = fs::path(g.out) / (inst.id + ".json");
        save_instance(inst, path.string());
        std::cout << path.string() << '\n';
    }
    return kExitOk;
}

int run_evolve(const GlobalOpts& g) {
    const auto cfg = resolve(g);
    const auto runs = evolve_all(cfg);
    for (const auto& run : runs) {
        const std::string label = solver_name(run.config.target) +
                                  std::string(run.config.target_hard ? "-hard" : "-easy");
        const auto dir = fs::path(g.out) / "populations" / label;
        save_population(run, dir.string());
        std::cout << label << ": " << run.population.size() << " instances -> " << dir.string()
                  << '\n';
    }
    return kExitOk;
}

int run_measure(const GlobalOpts& g, const std::vector<std::string>& paths) {
    const auto cfg = resolve(g);
    const auto configs = default_configs();
    std::vector<PerformanceRecord> records;
    for (const auto& path : paths) {
        const auto inst = load_instance(path);
        PerformanceRecord rec;
        rec.instance_id = inst.id;
        for (auto kind : kAllSolvers)
            rec.per_solver[kind] =
                measure(inst, kind, configs.at(kind), cfg.profile.budget,
                        cfg.profile.target_precision, cfg.profile.repeats,
                        derive_seed(cfg.master_seed, {"measure", inst.id, solver_name(kind)}));
        records.push_back(std::move(rec));
    }
    const auto csv = performance_csv(records, cfg.profile.budget, cfg.master_seed);
    write_file(fs::path(g.out) / "performance.csv", csv);
    std::cout << csv;
    return kExitOk;
}

int run_features(const GlobalOpts& g, const std::vector<std::string>& paths) {
    const auto cfg = resolve(g);
    std::vector<std::string> ids;
    std::vector<FeatureVector> rows;
    for (const auto& path : paths) {
        const auto inst = load_instance(path);
        ids.push_back(inst.id);
        rows.push_back(extract_features(inst, cfg.feature_settings,
                                        derive_seed(cfg.master_seed, {"features", inst.id})));
    }
    const auto csv = feature_table_csv(ids, rows);
    write_file(fs::path(g.out) / "features.csv", csv);
    std::cout << csv;
    return kExitOk;
}

int run_train(const GlobalOpts& g, const std::string& subset,
              const std::vector<std::string>& pop_dirs) {
    const auto cfg = resolve(g);
    const auto kind = parse_subset_kind(subset);

    std::vector<EvolveResult> runs;
    if (pop_dirs.empty()) {
        runs = evolve_all(cfg);
        for (const auto& run : runs) {
            const std::string label = solver_name(run.config.target) +
                                      std::string(run.config.target_hard ? "-hard" : "-easy");
            save_population(run, (fs::path(g.out) / "populations" / label).string());
        }
    } else {
        for (const auto& dir : pop_dirs) runs.push_back(load_population(dir));
    }

    const auto selected = training_subset(cfg, runs, kind);
    const auto model = train_subset_model(selected, kind, cfg);
    const auto path = fs::path(g.out) / ("model_" + subset_kind_name(kind) + ".json");
    save_model(model, path.string());
    std::cout << subset_kind_name(kind) << ": trained on " << selected.size()
              << " instances, epochs " << model.metadata.epochs << ", final sse "
              << model.metadata.final_sse << " -> " << path.string() << '\n';
    return kExitOk;
}

int run_predict(const GlobalOpts& g, const std::string& model_path,
                const std::vector<std::string>& paths) {
    const auto cfg = resolve(g);
    const auto model = load_model(model_path);
    const auto configs = default_configs();
    std::ostringstream csv;
    csv << "instance_id,predicted_alg";
    for (auto kind : kAllSolvers) csv << ",predicted_fen_" << solver_name(kind);
    csv << '\n';
    for (const auto& path : paths) {
        const auto inst = load_instance(path);
        const auto pred =
            predict(model, inst, configs, derive_seed(cfg.master_seed, {"features", inst.id}));
        csv << inst.id << ',' << solver_name(pred.best);
        for (auto kind : kAllSolvers) csv << ',' << pred.predicted_fen.at(kind);
        csv << '\n';
    }
    write_file(fs::path(g.out) / "predictions.csv", csv.str());
    std::cout << csv.str();
    return kExitOk;
}

int run_bench(const GlobalOpts& g, const std::string& model_a_path,
              const std::string& model_b_path, const std::string& name_a,
              const std::string& name_b) {
    const auto cfg = resolve(g);
    const auto model_a = load_model(model_a_path);
    const auto model_b = load_model(model_b_path);
    const auto rows = run_benchmark(cfg, model_a, model_b);
    const auto csv = emit_benchmark_report(rows, ReportFormat::Csv, name_a, name_b);
    write_file(fs::path(g.out) / "benchmark.csv", csv);
    write_file(fs::path(g.out) / "benchmark.md",
               emit_benchmark_report(rows, ReportFormat::Markdown, name_a, name_b));
    std::cout << csv;
    return kExitOk;
}

int run_report(const GlobalOpts& g) {
    const auto cfg = resolve(g);
    run_full_study(cfg, g.out);
    std::cout << "study written to " << g.out << '\n';
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Constrained-optimizer selection toolkit"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--seed", g.seed, "Master seed for the whole derivation tree");
    app.add_option("--profile", g.profile, "Cost profile")
        ->check(CLI::IsMember({"desk", "full"}));
    app.add_option("--out", g.out, "Output directory");
    app.add_option("--config", g.config_file, "Config file (flat key=value with sections)");
    app.add_option("--set", g.overrides, "Override a config key, e.g. --set experiment.repeats=5");

    std::string objective = "sphere";
    int n_lin = 1, n_quad = 0, n_eq = 0, count = 1, dimension = 0;
    auto* gen = app.add_subcommand("gen", "Generate random constrained instances");
    gen->add_option("--objective", objective, "sphere | ackley | rosenbrock");
    gen->add_option("--linear", n_lin, "Linear inequality constraints");
    gen->add_option("--quadratic", n_quad, "Quadratic inequality constraints");
    gen->add_option("--equality", n_eq, "Equality constraints");
    gen->add_option("--count", count, "Number of instances");
    gen->add_option("--dimension", dimension, "Override the profile dimension");

    auto* evolve_cmd =
        app.add_subcommand("evolve", "Run all six instance-evolution runs and dump populations");

    std::vector<std::string> measure_paths;
    auto* measure_cmd = app.add_subcommand("measure", "Measure solver performance on instances");
    measure_cmd->add_option("instances", measure_paths, "Instance files")->required();

    std::vector<std::string> feature_paths;
    auto* features_cmd = app.add_subcommand("features", "Extract constraint features");
    features_cmd->add_option("instances", feature_paths, "Instance files")->required();

    std::string subset = "PFR";
    std::vector<std::string> pop_dirs;
    auto* train_cmd = app.add_subcommand("train", "Train a prediction model");
    train_cmd->add_option("--subset", subset, "EP | PF | RO | PFR");
    train_cmd->add_option("--pop", pop_dirs,
                          "Population dump directories (omit to evolve in place)");

    std::string model_path;
    std::vector<std::string> predict_paths;
    auto* predict_cmd = app.add_subcommand("predict", "Predict the best solver per instance");
    predict_cmd->add_option("--model", model_path, "Model file")->required();
    predict_cmd->add_option("instances", predict_paths, "Instance files")->required();

    std::string model_a_path, model_b_path, name_a = "A", name_b = "B";
    auto* bench_cmd = app.add_subcommand("bench", "Compare two models on fresh test instances");
    bench_cmd->add_option("--model-a", model_a_path, "First model file")->required();
    bench_cmd->add_option("--model-b", model_b_path, "Second model file")->required();
    bench_cmd->add_option("--name-a", name_a, "Column label for the first model");
    bench_cmd->add_option("--name-b", name_b, "Column label for the second model");

    auto* report_cmd = app.add_subcommand("report", "Run the full study end to end");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return run_gen(g, objective, n_lin, n_quad, n_eq, count, dimension);
        if (evolve_cmd->parsed()) return run_evolve(g);
        if (measure_cmd->parsed()) return run_measure(g, measure_paths);
        if (features_cmd->parsed()) return run_features(g, feature_paths);
        if (train_cmd->parsed()) return run_train(g, subset, pop_dirs);
        if (predict_cmd->parsed()) return run_predict(g, model_path, predict_paths);
        if (bench_cmd->parsed())
            return run_bench(g, model_a_path, model_b_path, name_a, name_b);
        if (report_cmd->parsed()) return run_report(g);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const ContractError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    }
    return kExitOk;
}
