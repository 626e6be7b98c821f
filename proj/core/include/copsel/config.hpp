#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "copsel/cop.hpp"
#include "copsel/evolver.hpp"
#include "copsel/features.hpp"

namespace copsel {

/// Cost presets. desk finishes the whole study in well under a CPU-hour;
/// full runs the study at production scale.
struct Profile {
    std::string name;
    int dimension = 5;
    long budget = 30000;
    int repeats = 5;
    int evolver_population = 40;
    int evolver_generations = 25;
    int evolver_inner_repeats = 3;
    int feature_samples = 5000;
    int training_size = 400;
    double target_precision = 1e-4;

    static Profile desk();
    static Profile full();
    static Profile by_name(const std::string& name);
};

/// One benchmark problem label: objective plus constraint mix, e.g.
/// "Sphere, 2lin" or "Ackley, 1lin, 4quad".
struct ProblemLabel {
    Objective objective = Objective::Sphere;
    int n_linear = 0;
    int n_quadratic = 0;

    std::string label() const;
    /// Compact form used in config files: "sphere:2:0".
    std::string token() const;
    static ProblemLabel parse_token(const std::string& token);
};

struct ExperimentConfig {
    Profile profile;
    std::uint64_t master_seed = 1;
    std::vector<SubsetKind> subset_kinds{SubsetKind::EP, SubsetKind::PF, SubsetKind::RO,
                                         SubsetKind::PFR};
    std::map<SubsetKind, int> training_sizes; // filled from profile when empty
    std::vector<ProblemLabel> test_suite;     // filled with the default 6 labels when empty
    /// RO training pool source: the evolver's evaluation archives (false,
    /// default) or freshly generated instances (true). Also sets PFR's
    /// random half.
    bool ro_fresh = false;
    FeatureSettings feature_settings;
    double coeff_min = -2.0, coeff_max = 2.0;
    double offset_min = -5.0, offset_max = 5.0;
    double active_probability = 0.3;
    double box_lower = -5.0, box_upper = 5.0;

    int training_size(SubsetKind kind) const;
    GeneratorSpec generator_spec(const ProblemLabel& label) const;
    void apply_profile(); // re-derives dependent defaults from profile
};

/// Layered resolution: built-in profile < config file < overrides (each
/// override is "section.key=value"). Unknown keys error with a nearest-key
/// suggestion; type mismatches error with the expected type.
ExperimentConfig load_config(const std::string& path, const std::string& profile_name,
                             const std::vector<std::string>& overrides);
ExperimentConfig resolve_config(const std::string& file_text, const std::string& profile_name,
                                const std::vector<std::string>& overrides);

/// Full resolved configuration in the config-file format; loading the echo
/// reproduces an identical config.
std::string echo_config(const ExperimentConfig& config);

} // namespace copsel
