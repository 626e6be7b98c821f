#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "copsel/cop.hpp"

namespace copsel {

/// Constraint-derived problem characteristics: kind counts, coefficient
/// spread, pairwise angles between constraint gradients at the known
/// optimum, and Monte Carlo feasibility ratios. Fixed field order; encode()
/// is the model-input layout.
struct FeatureVector {
    int n_linear = 0;
    int n_quadratic = 0;
    int n_equality = 0;
    double coeff_std = 0.0;
    double coeff_std_per_constraint_mean = 0.0;
    double angle_mean = 0.0;
    double angle_min = 0.0;
    double angle_max = 0.0;
    bool angle_valid = false;
    double feasibility_ratio_near_optimum = 1.0;
    double feasibility_ratio_global = 1.0;
    bool optimum_feasible = true;
    int dimension = 0;

    std::vector<double> encode() const;
    static constexpr int kLength = 13;
    static const std::vector<std::string>& field_names();
};

struct FeatureSettings {
    int n_samples = 10000;
    double vicinity_radius_fraction = 0.1;

    bool operator==(const FeatureSettings&) const = default;
};

/// Deterministic for a fixed seed and instance.
FeatureVector extract_features(const COPInstance& inst, const FeatureSettings& settings,
                               std::uint64_t seed);

/// Per-field affine map to zero mean / unit variance; fields that are
/// constant over the fitted dataset map to 0.
struct NormStats {
    std::vector<double> mean;
    std::vector<double> std_dev; // 0 marks a constant field

    std::vector<double> apply(const std::vector<double>& v) const;
    std::vector<double> invert(const std::vector<double>& v) const;
};

NormStats fit_normalization(const std::vector<std::vector<double>>& dataset);

/// One row per instance, header with the exact field names in fixed order.
std::string feature_table_csv(const std::vector<std::string>& instance_ids,
                              const std::vector<FeatureVector>& rows);

} // namespace copsel
