#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "copsel/cop.hpp"
#include "copsel/features.hpp"
#include "copsel/solvers.hpp"

namespace copsel {

/// Feed-forward regressor, layer sizes [n_in, 10, 10, 3]: tanh hidden
/// layers, identity output. Outputs are normalized FENs ordered (DE, ES,
/// PSO). Carries its input/output normalization and training provenance.
struct PredictionModel {
    static constexpr int kHidden = 10;
    static constexpr int kOutputs = 3;

    int n_in = 0;
    Eigen::MatrixXd w1, w2, w3;
    Eigen::VectorXd b1, b2, b3;

    NormStats input_norm;
    NormStats output_norm; // over fen / budget, per solver

    struct Metadata {
        std::string subset_kind;
        std::uint64_t seed = 0;
        int epochs = 0;
        double final_sse = 0.0;
        long budget = 0;
        FeatureSettings feature_settings;
    } metadata;

    int weight_count() const;
    Eigen::VectorXd flatten_weights() const;
    void set_weights(const Eigen::VectorXd& w);
};

/// Weights uniform in [-1/sqrt(fan_in), +1/sqrt(fan_in)] from the seed.
PredictionModel init_model(int n_in, std::uint64_t seed);

/// Forward pass on a pre-normalized input of length n_in.
Eigen::Vector3d forward(const PredictionModel& model, const Eigen::VectorXd& input);

/// Analytic Jacobian of the three outputs with respect to the flattened
/// weight vector, in the same layout as flatten_weights().
Eigen::MatrixXd output_jacobian(const PredictionModel& model, const Eigen::VectorXd& input);

struct TrainingExample {
    std::vector<double> input;               // normalized
    std::array<double, 3> target{0, 0, 0};   // normalized FENs (DE, ES, PSO)
};

struct TrainConfig {
    double lambda0 = 1e-2;
    double lambda_up = 10.0;
    double lambda_down = 0.1;
    double lambda_max = 1e12;
    int max_epochs = 200;
    double sse_tol = 1e-12;
    double validation_fraction = 0.2;
    int patience = 20;
    std::uint64_t seed = 0;
};

struct TrainTrace {
    std::vector<double> train_sse;      // per accepted epoch
    std::vector<double> validation_sse; // per accepted epoch (empty when no split)
};

/// Levenberg-Marquardt on the flattened weights: (J'J + lambda I) dw = -J'r.
/// Accepted steps (SSE decreases) scale lambda down; rejected steps scale it
/// up and retry. Stops at max_epochs, sse_tol, lambda overflow, or when the
/// validation SSE has not improved for `patience` accepted epochs.
PredictionModel train_lm(const std::vector<TrainingExample>& dataset, const TrainConfig& config,
                         TrainTrace* trace = nullptr);

struct PredictionResult {
    std::map<SolverKind, double> predicted_fen; // denormalized, evaluations
    SolverKind best = SolverKind::DE;           // argmin, ties broken DE < ES < PSO
};

/// Fixed model-input layout: feature encoding followed by the three solver
/// parameter encodings in (DE, ES, PSO) order.
std::vector<double> model_input(const FeatureVector& features,
                                const std::map<SolverKind, SolverConfig>& configs);

PredictionResult predict(const PredictionModel& model, const COPInstance& inst,
                         const std::map<SolverKind, SolverConfig>& configs,
                         std::uint64_t feature_seed);

/// Applies stored normalizations around a forward pass on raw (unnormalized)
/// inputs; exposed for harness code that extracts features itself.
PredictionResult predict_from_input(const PredictionModel& model,
                                    const std::vector<double>& raw_input);

void save_model(const PredictionModel& model, const std::string& path);
PredictionModel load_model(const std::string& path);
std::string model_to_string(const PredictionModel& model);
PredictionModel model_from_string(const std::string& text);

} // namespace copsel
