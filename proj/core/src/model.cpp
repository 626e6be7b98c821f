#include "copsel/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "copsel/errors.hpp"
#include "copsel/rng.hpp"

namespace copsel {

using ordered_json = nlohmann::ordered_json;

namespace {
constexpr const char* kModelVersion = "copsel-model-1";
constexpr int H = PredictionModel::kHidden;
constexpr int O = PredictionModel::kOutputs;
} // namespace

int PredictionModel::weight_count() const {
    return H * n_in + H + H * H + H + O * H + O;
}

Eigen::VectorXd PredictionModel::flatten_weights() const {
    Eigen::VectorXd w(weight_count());
    int pos = 0;
    auto put_matrix = [&](const Eigen::MatrixXd& m) {
        for (int r = 0; r < m.rows(); ++r)
            for (int c = 0; c < m.cols(); ++c) w[pos++] = m(r, c);
    };
    auto put_vector = [&](const Eigen::VectorXd& v) {
        for (int i = 0; i < v.size(); ++i) w[pos++] = v[i];
    };
    put_matrix(w1);
    put_vector(b1);
    put_matrix(w2);
    put_vector(b2);
    put_matrix(w3);
    put_vector(b3);
    return w;
}

void PredictionModel::set_weights(const Eigen::VectorXd& w) {
    if (w.size() != weight_count()) throw ContractError("set_weights: length mismatch");
    int pos = 0;
    auto get_matrix = [&](Eigen::MatrixXd& m) {
        for (int r = 0; r < m.rows(); ++r)
            for (int c = 0; c < m.cols(); ++c) m(r, c) = w[pos++];
    };
    auto get_vector = [&](Eigen::VectorXd& v) {
        for (int i = 0; i < v.size(); ++i) v[i] = w[pos++];
    };
    get_matrix(w1);
    get_vector(b1);
    get_matrix(w2);
    get_vector(b2);
    get_matrix(w3);
    get_vector(b3);
}

PredictionModel init_model(int n_in, std::uint64_t seed) {
    if (n_in < 1) throw ContractError("init_model: n_in must be >= 1");
    PredictionModel m;
    m.n_in = n_in;
    m.w1.resize(H, n_in);
    m.b1 = Eigen::VectorXd::Zero(H);
    m.w2.resize(H, H);
    m.b2 = Eigen::VectorXd::Zero(H);
    m.w3.resize(O, H);
    m.b3 = Eigen::VectorXd::Zero(O);
    Rng rng(seed);
    auto fill = [&](Eigen::MatrixXd& w) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(w.cols()));
        for (int r = 0; r < w.rows(); ++r)
            for (int c = 0; c < w.cols(); ++c) w(r, c) = uniform(rng, -bound, bound);
    };
    fill(m.w1);
    fill(m.w2);
    fill(m.w3);
    m.metadata.seed = seed;
    return m;
}

Eigen::Vector3d forward(const PredictionModel& model, const Eigen::VectorXd& input) {
    if (input.size() != model.n_in) throw ContractError("forward: input length mismatch");
    const Eigen::VectorXd a1 = (model.w1 * input + model.b1).array().tanh();
    const Eigen::VectorXd a2 = (model.w2 * a1 + model.b2).array().tanh();
    return model.w3 * a2 + model.b3;
}

Eigen::MatrixXd output_jacobian(const PredictionModel& model, const Eigen::VectorXd& input) {
    if (input.size() != model.n_in) throw ContractError("output_jacobian: input length mismatch");
    const int n_in = model.n_in;
    const Eigen::VectorXd a1 = (model.w1 * input + model.b1).array().tanh();
    const Eigen::VectorXd a2 = (model.w2 * a1 + model.b2).array().tanh();
    const Eigen::VectorXd d1 = 1.0 - a1.array().square(); // tanh'
    const Eigen::VectorXd d2 = 1.0 - a2.array().square();

    Eigen::MatrixXd jac(O, model.weight_count());
    const int off_b1 = H * n_in;
    const int off_w2 = off_b1 + H;
    const int off_b2 = off_w2 + H * H;
    const int off_w3 = off_b2 + H;
    const int off_b3 = off_w3 + O * H;

    for (int k = 0; k < O; ++k) {
        const Eigen::VectorXd delta2 = model.w3.row(k).transpose().cwiseProduct(d2);
        const Eigen::VectorXd delta1 = (model.w2.transpose() * delta2).cwiseProduct(d1);
        auto row = jac.row(k);
        for (int r = 0; r < H; ++r)
            for (int c = 0; c < n_in; ++c) row[r * n_in + c] = delta1[r] * input[c];
        for (int r = 0; r < H; ++r) row[off_b1 + r] = delta1[r];
        for (int r = 0; r < H; ++r)
            for (int c = 0; c < H; ++c) row[off_w2 + r * H + c] = delta2[r] * a1[c];
        for (int r = 0; r < H; ++r) row[off_b2 + r] = delta2[r];
        for (int r = 0; r < O; ++r)
            for (int c = 0; c < H; ++c) row[off_w3 + r * H + c] = (r == k) ? a2[c] : 0.0;
        for (int r = 0; r < O; ++r) row[off_b3 + r] = (r == k) ? 1.0 : 0.0;
    }
    return jac;
}

namespace {

double sse_over(const PredictionModel& model, const std::vector<TrainingExample>& examples) {
    double sse = 0.0;
    Eigen::VectorXd x;
    for (const auto& ex : examples) {
        x = Eigen::Map<const Eigen::VectorXd>(ex.input.data(), ex.input.size());
        const Eigen::Vector3d y = forward(model, x);
        for (int k = 0; k < O; ++k) {
            const double r = y[k] - ex.target[k];
            sse += r * r;
        }
    }
    return sse;
}

void accumulate_normal_equations(const PredictionModel& model,
                                 const std::vector<TrainingExample>& examples,
                                 Eigen::MatrixXd& jtj, Eigen::VectorXd& jtr) {
    const int w = model.weight_count();
    jtj = Eigen::MatrixXd::Zero(w, w);
    jtr = Eigen::VectorXd::Zero(w);
    Eigen::VectorXd x;
    for (const auto& ex : examples) {
        x = Eigen::Map<const Eigen::VectorXd>(ex.input.data(), ex.input.size());
        const Eigen::Vector3d y = forward(model, x);
        const Eigen::MatrixXd jac = output_jacobian(model, x);
        for (int k = 0; k < O; ++k) {
            const double r = y[k] - ex.target[k];
            jtr.noalias() += r * jac.row(k).transpose();
        }
        jtj.selfadjointView<Eigen::Lower>().rankUpdate(jac.transpose());
    }
    jtj = jtj.selfadjointView<Eigen::Lower>();
}

} // namespace

PredictionModel train_lm(const std::vector<TrainingExample>& dataset, const TrainConfig& config,
                         TrainTrace* trace) {
    if (dataset.empty()) throw ContractError("train_lm: dataset must be non-empty");
    for (const auto& ex : dataset) {
        for (double v : ex.input)
            if (!std::isfinite(v)) throw ContractError("train_lm: non-finite input");
        for (double v : ex.target)
            if (!std::isfinite(v)) throw ContractError("train_lm: non-finite target");
    }
    const int n_in = static_cast<int>(dataset.front().input.size());

    // deterministic shuffled split, validation tail
    std::vector<std::size_t> order(dataset.size());
    std::iota(order.begin(), order.end(), 0);
    Rng split_rng(derive_seed(config.seed, {"train_lm", "split"}));
    std::shuffle(order.begin(), order.end(), split_rng);
    const std::size_t n_val =
        dataset.size() >= 5
            ? static_cast<std::size_t>(config.validation_fraction * dataset.size())
            : 0;
    std::vector<TrainingExample> train, val;
    for (std::size_t i = 0; i < order.size(); ++i)
        (i < order.size() - n_val ? train : val).push_back(dataset[order[i]]);

    PredictionModel model = init_model(n_in, derive_seed(config.seed, {"train_lm", "init"}));

    double lambda = config.lambda0;
    double sse = sse_over(model, train);
    if (!std::isfinite(sse)) throw ContractError("train_lm: non-finite SSE at initialization");

    PredictionModel best_model = model;
    double best_val = n_val > 0 ? sse_over(model, val) : sse;
    int since_improvement = 0;
    int epochs = 0;

    Eigen::MatrixXd jtj;
    Eigen::VectorXd jtr;
    const int w = model.weight_count();

    while (epochs < config.max_epochs && sse > config.sse_tol && lambda <= config.lambda_max) {
        accumulate_normal_equations(model, train, jtj, jtr);
        bool accepted = false;
        while (lambda <= config.lambda_max) {
            Eigen::MatrixXd damped = jtj;
            damped.diagonal().array() += lambda;
            const Eigen::VectorXd delta = damped.ldlt().solve(-jtr);
            PredictionModel candidate = model;
            candidate.set_weights(model.flatten_weights() + delta);
            const double candidate_sse = sse_over(candidate, train);
            if (std::isfinite(candidate_sse) && candidate_sse < sse) {
                model = std::move(candidate);
                sse = candidate_sse;
                lambda *= config.lambda_down;
                accepted = true;
                break;
            }
            lambda *= config.lambda_up;
        }
        if (!accepted) break; // lambda overflow: converged as far as LM can go
        ++epochs;
        if (trace) trace->train_sse.push_back(sse);

        const double val_sse = n_val > 0 ? sse_over(model, val) : sse;
        if (trace && n_val > 0) trace->validation_sse.push_back(val_sse);
        if (val_sse < best_val) {
            best_val = val_sse;
            best_model = model;
            since_improvement = 0;
        } else if (++since_improvement >= config.patience) {
            break;
        }
    }

    PredictionModel result = n_val > 0 ? best_model : model;
    result.metadata.epochs = epochs;
    result.metadata.final_sse = sse_over(result, train);
    result.metadata.seed = config.seed;
    return result;
}

std::vector<double> model_input(const FeatureVector& features,
                                const std::map<SolverKind, SolverConfig>& configs) {
    std::vector<double> input = features.encode();
    for (auto kind : kAllSolvers) {
        auto it = configs.find(kind);
        if (it == configs.end()) throw ContractError("model_input: missing solver config");
        const auto enc = it->second.encode();
        input.insert(input.end(), enc.begin(), enc.end());
    }
    return input;
}

PredictionResult predict_from_input(const PredictionModel& model,
                                    const std::vector<double>& raw_input) {
    if (model.input_norm.mean.empty())
        throw DataError("predict: model has no stored input normalization");
    if (model.output_norm.mean.empty())
        throw DataError("predict: model has no stored output normalization");
    const auto normalized = model.input_norm.apply(raw_input);
    const Eigen::VectorXd x =
        Eigen::Map<const Eigen::VectorXd>(normalized.data(), normalized.size());
    const Eigen::Vector3d y = forward(model, x);
    const auto scaled = model.output_norm.invert({y[0], y[1], y[2]});

    PredictionResult res;
    for (int k = 0; k < O; ++k)
        res.predicted_fen[kAllSolvers[k]] = scaled[k] * static_cast<double>(model.metadata.budget);
    res.best = SolverKind::DE;
    for (auto kind : kAllSolvers)
        if (res.predicted_fen.at(kind) < res.predicted_fen.at(res.best)) res.best = kind;
    return res;
}

PredictionResult predict(const PredictionModel& model, const COPInstance& inst,
                         const std::map<SolverKind, SolverConfig>& configs,
                         std::uint64_t feature_seed) {
    const auto features = extract_features(inst, model.metadata.feature_settings, feature_seed);
    return predict_from_input(model, model_input(features, configs));
}

namespace {

ordered_json matrix_to_json(const Eigen::MatrixXd& m) {
    ordered_json rows = ordered_json::array();
    for (int r = 0; r < m.rows(); ++r) {
        ordered_json row = ordered_json::array();
        for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const ordered_json& j, int rows, int cols,
                                 const std::string& name) {
    if (!j.is_array() || static_cast<int>(j.size()) != rows)
        throw ParseError(name, "expected " + std::to_string(rows) + " rows");
    Eigen::MatrixXd m(rows, cols);
    for (int r = 0; r < rows; ++r) {
        const auto& row = j[r];
        if (!row.is_array() || static_cast<int>(row.size()) != cols)
            throw ParseError(name, "expected " + std::to_string(cols) + " columns");
        for (int c = 0; c < cols; ++c) m(r, c) = row[c].get<double>();
    }
    return m;
}

ordered_json norm_to_json(const NormStats& ns) {
    return ordered_json{{"mean", ns.mean}, {"std_dev", ns.std_dev}};
}

NormStats norm_from_json(const ordered_json& j, const std::string& name) {
    if (!j.is_object() || !j.contains("mean") || !j.contains("std_dev"))
        throw ParseError(name, "expected {mean, std_dev}");
    NormStats ns;
    ns.mean = j["mean"].get<std::vector<double>>();
    ns.std_dev = j["std_dev"].get<std::vector<double>>();
    if (ns.mean.size() != ns.std_dev.size()) throw ParseError(name, "length mismatch");
    return ns;
}

} // namespace

std::string model_to_string(const PredictionModel& model) {
    ordered_json j;
    j["version"] = kModelVersion;
    j["layer_sizes"] = {model.n_in, H, H, O};
    j["w1"] = matrix_to_json(model.w1);
    j["b1"] = std::vector<double>(model.b1.data(), model.b1.data() + model.b1.size());
    j["w2"] = matrix_to_json(model.w2);
    j["b2"] = std::vector<double>(model.b2.data(), model.b2.data() + model.b2.size());
    j["w3"] = matrix_to_json(model.w3);
    j["b3"] = std::vector<double>(model.b3.data(), model.b3.data() + model.b3.size());
    j["input_norm"] = norm_to_json(model.input_norm);
    j["output_norm"] = norm_to_json(model.output_norm);
    j["metadata"] = ordered_json{{"subset_kind", model.metadata.subset_kind},
                                 {"seed", model.metadata.seed},
                                 {"epochs", model.metadata.epochs},
                                 {"final_sse", model.metadata.final_sse},
                                 {"budget", model.metadata.budget},
                                 {"feature_n_samples", model.metadata.feature_settings.n_samples},
                                 {"feature_vicinity_radius_fraction",
                                  model.metadata.feature_settings.vicinity_radius_fraction}};
    return j.dump(2) + "\n";
}

PredictionModel model_from_string(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("model document", e.what());
    }
    if (!j.contains("version")) throw ParseError("version", "missing field");
    const auto version = j["version"].get<std::string>();
    if (version != kModelVersion)
        throw ParseError("version", "model file version '" + version + "' does not match '" +
                                        std::string(kModelVersion) + "'");
    const auto sizes = j.at("layer_sizes").get<std::vector<int>>();
    if (sizes.size() != 4 || sizes[1] != H || sizes[2] != H || sizes[3] != O)
        throw ParseError("layer_sizes", "expected [n_in, 10, 10, 3]");

    PredictionModel m;
    m.n_in = sizes[0];
    m.w1 = matrix_from_json(j.at("w1"), H, m.n_in, "w1");
    m.w2 = matrix_from_json(j.at("w2"), H, H, "w2");
    m.w3 = matrix_from_json(j.at("w3"), O, H, "w3");
    auto vec = [&](const char* name, int n) {
        const auto v = j.at(name).get<std::vector<double>>();
        if (static_cast<int>(v.size()) != n) throw ParseError(name, "bad length");
        return Eigen::Map<const Eigen::VectorXd>(v.data(), n).eval();
    };
    m.b1 = vec("b1", H);
    m.b2 = vec("b2", H);
    m.b3 = vec("b3", O);
    m.input_norm = norm_from_json(j.at("input_norm"), "input_norm");
    m.output_norm = norm_from_json(j.at("output_norm"), "output_norm");
    const auto& md = j.at("metadata");
    m.metadata.subset_kind = md.at("subset_kind").get<std::string>();
    m.metadata.seed = md.at("seed").get<std::uint64_t>();
    m.metadata.epochs = md.at("epochs").get<int>();
    m.metadata.final_sse = md.at("final_sse").get<double>();
    m.metadata.budget = md.at("budget").get<long>();
    m.metadata.feature_settings.n_samples = md.at("feature_n_samples").get<int>();
    m.metadata.feature_settings.vicinity_radius_fraction =
        md.at("feature_vicinity_radius_fraction").get<double>();
    return m;
}

void save_model(const PredictionModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    out << model_to_string(model);
}

PredictionModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return model_from_string(ss.str());
}

} // namespace copsel
