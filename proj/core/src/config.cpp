#include "copsel/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "copsel/errors.hpp"
#include "copsel/format.hpp"

namespace copsel {

Profile Profile::desk() {
    Profile p;
    p.name = "desk";
    return p;
}

Profile Profile::full() {
    Profile p;
    p.name = "full";
    p.dimension = 10;
    p.budget = 200000;
    p.repeats = 30;
    p.evolver_population = 100;
    p.evolver_generations = 100;
    p.evolver_inner_repeats = 3;
    p.feature_samples = 10000;
    p.training_size = 3000;
    return p;
}

Profile Profile::by_name(const std::string& name) {
    if (name == "desk") return desk();
    if (name == "full") return full();
    throw ConfigError("unknown profile '" + name + "' (expected desk or full)");
}

std::string ProblemLabel::label() const {
    std::string s = objective_name(objective);
    s[0] = static_cast<char>(std::toupper(s[0]));
    if (n_linear > 0) s += ", " + std::to_string(n_linear) + "lin";
    if (n_quadratic > 0) s += ", " + std::to_string(n_quadratic) + "quad";
    return s;
}

std::string ProblemLabel::token() const {
    return objective_name(objective) + ":" + std::to_string(n_linear) + ":" +
           std::to_string(n_quadratic);
}

ProblemLabel ProblemLabel::parse_token(const std::string& token) {
    std::istringstream ss(token);
    std::string obj, lin, quad;
    if (!std::getline(ss, obj, ':') || !std::getline(ss, lin, ':') || !std::getline(ss, quad))
        throw ConfigError("bad problem token '" + token + "' (expected objective:nlin:nquad)");
    ProblemLabel pl;
    pl.objective = parse_objective(obj);
    try {
        pl.n_linear = std::stoi(lin);
        pl.n_quadratic = std::stoi(quad);
    } catch (const std::exception&) {
        throw ConfigError("bad constraint counts in problem token '" + token + "'");
    }
    if (pl.n_linear < 0 || pl.n_quadratic < 0 || pl.n_linear + pl.n_quadratic == 0)
        throw ConfigError("problem token '" + token + "' needs at least one constraint");
    return pl;
}

int ExperimentConfig::training_size(SubsetKind kind) const {
    auto it = training_sizes.find(kind);
    return it != training_sizes.end() ? it->second : profile.training_size;
}

GeneratorSpec ExperimentConfig::generator_spec(const ProblemLabel& label) const {
    GeneratorSpec spec;
    spec.objective = label.objective;
    spec.dimension = profile.dimension;
    spec.n_linear = label.n_linear;
    spec.n_quadratic = label.n_quadratic;
    spec.box_lower = box_lower;
    spec.box_upper = box_upper;
    spec.coeff_min = coeff_min;
    spec.coeff_max = coeff_max;
    spec.offset_min = offset_min;
    spec.offset_max = offset_max;
    spec.active_probability = active_probability;
    return spec;
}

void ExperimentConfig::apply_profile() {
    feature_settings.n_samples = profile.feature_samples;
    if (test_suite.empty()) {
        for (auto obj : {Objective::Sphere, Objective::Ackley, Objective::Rosenbrock}) {
            test_suite.push_back({obj, 2, 0});
            test_suite.push_back({obj, 0, 2});
        }
    }
}

namespace {

const std::vector<std::string>& known_keys() {
    static const std::vector<std::string> keys = {
        "experiment.profile",        "experiment.seed",
        "experiment.repeats",        "experiment.training_size",
        "experiment.subset_kinds",   "experiment.suite",
        "experiment.ro_fresh",
        "cop.dimension",             "cop.budget",
        "cop.precision",             "cop.coeff_min",
        "cop.coeff_max",             "cop.offset_min",
        "cop.offset_max",            "cop.active_probability",
        "cop.box_lower",
        "cop.box_upper",             "features.n_samples",
        "features.vicinity_radius_fraction",
        "evolver.population",        "evolver.generations",
        "evolver.inner_repeats",
    };
    return keys;
}

std::size_t edit_distance(const std::string& a, const std::string& b) {
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j)
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1,
                               prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

std::string suggest_key(const std::string& key) {
    std::string best;
    std::size_t best_dist = std::string::npos;
    for (const auto& k : known_keys()) {
        const auto d = edit_distance(key, k);
        if (d < best_dist) {
            best_dist = d;
            best = k;
        }
    }
    return best_dist <= std::max<std::size_t>(3, key.size() / 2) ? best : "";
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

std::map<std::string, std::string> parse_kv(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        if (line.front() == '[' && line.back() == ']') {
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        if (!section.empty() && key.find('.') == std::string::npos) key = section + "." + key;
        kv[key] = trim(line.substr(eq + 1));
    }
    return kv;
}

long parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const long v = std::stol(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': expected an integer, got '" + value + "'");
    }
}

double parse_real(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': expected a number, got '" + value + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw ConfigError("config key '" + key + "': expected a boolean, got '" + value + "'");
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::istringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, sep))
        if (!trim(tok).empty()) out.push_back(trim(tok));
    return out;
}

void apply_key(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "experiment.profile") {
        const auto name = value;
        const auto old = cfg.profile;
        cfg.profile = Profile::by_name(name);
        (void)old;
    } else if (key == "experiment.seed") {
        cfg.master_seed = static_cast<std::uint64_t>(parse_int(key, value));
    } else if (key == "experiment.repeats") {
        const long v = parse_int(key, value);
        if (v < 2) throw ConfigError("experiment.repeats must be >= 2 (t-test needs variance)");
        cfg.profile.repeats = static_cast<int>(v);
    } else if (key == "experiment.training_size") {
        const long v = parse_int(key, value);
        if (v < 1) throw ConfigError("experiment.training_size must be positive");
        cfg.profile.training_size = static_cast<int>(v);
    } else if (key == "experiment.subset_kinds") {
        cfg.subset_kinds.clear();
        for (const auto& tok : split(value, ';')) cfg.subset_kinds.push_back(parse_subset_kind(tok));
    } else if (key == "experiment.ro_fresh") {
        cfg.ro_fresh = parse_bool(key, value);
    } else if (key == "experiment.suite") {
        cfg.test_suite.clear();
        for (const auto& tok : split(value, ';'))
            cfg.test_suite.push_back(ProblemLabel::parse_token(tok));
    } else if (key == "cop.dimension") {
        cfg.profile.dimension = static_cast<int>(parse_int(key, value));
    } else if (key == "cop.budget") {
        cfg.profile.budget = parse_int(key, value);
    } else if (key == "cop.precision") {
        cfg.profile.target_precision = parse_real(key, value);
    } else if (key == "cop.coeff_min") {
        cfg.coeff_min = parse_real(key, value);
    } else if (key == "cop.coeff_max") {
        cfg.coeff_max = parse_real(key, value);
    } else if (key == "cop.offset_min") {
        cfg.offset_min = parse_real(key, value);
    } else if (key == "cop.offset_max") {
        cfg.offset_max = parse_real(key, value);
    } else if (key == "cop.active_probability") {
        const double v = parse_real(key, value);
        if (v < 0.0 || v > 1.0)
            throw ConfigError("cop.active_probability must be in [0, 1]");
        cfg.active_probability = v;
    } else if (key == "cop.box_lower") {
        cfg.box_lower = parse_real(key, value);
    } else if (key == "cop.box_upper") {
        cfg.box_upper = parse_real(key, value);
    } else if (key == "features.n_samples") {
        cfg.feature_settings.n_samples = static_cast<int>(parse_int(key, value));
        cfg.profile.feature_samples = cfg.feature_settings.n_samples;
    } else if (key == "features.vicinity_radius_fraction") {
        cfg.feature_settings.vicinity_radius_fraction = parse_real(key, value);
    } else if (key == "evolver.population") {
        cfg.profile.evolver_population = static_cast<int>(parse_int(key, value));
    } else if (key == "evolver.generations") {
        cfg.profile.evolver_generations = static_cast<int>(parse_int(key, value));
    } else if (key == "evolver.inner_repeats") {
        cfg.profile.evolver_inner_repeats = static_cast<int>(parse_int(key, value));
    } else {
        std::string msg = "unknown config key '" + key + "'";
        const auto near = suggest_key(key);
        if (!near.empty()) msg += " (did you mean '" + near + "'?)";
        throw ConfigError(msg);
    }
}

} // namespace

ExperimentConfig resolve_config(const std::string& file_text, const std::string& profile_name,
                                const std::vector<std::string>& overrides) {
    ExperimentConfig cfg;
    cfg.profile = Profile::by_name(profile_name.empty() ? "desk" : profile_name);
    cfg.apply_profile();

    auto kv = parse_kv(file_text);
    // profile key first so later keys override the preset it brings in
    if (auto it = kv.find("experiment.profile"); it != kv.end()) {
        cfg.profile = Profile::by_name(it->second);
        cfg.test_suite.clear();
        cfg.apply_profile();
        kv.erase(it);
    }
    for (const auto& [key, value] : kv) apply_key(cfg, key, value);
    for (const auto& ov : overrides) {
        const auto eq = ov.find('=');
        if (eq == std::string::npos)
            throw ConfigError("override '" + ov + "' must look like key=value");
        apply_key(cfg, trim(ov.substr(0, eq)), trim(ov.substr(eq + 1)));
    }
    cfg.feature_settings.n_samples = cfg.profile.feature_samples;
    return cfg;
}

ExperimentConfig load_config(const std::string& path, const std::string& profile_name,
                             const std::vector<std::string>& overrides) {
    std::string text;
    if (!path.empty()) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw ConfigError("cannot open config file '" + path + "'");
        std::ostringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    }
    return resolve_config(text, profile_name, overrides);
}

std::string echo_config(const ExperimentConfig& cfg) {
    std::ostringstream out;
    out << "[experiment]\n";
    out << "profile = " << cfg.profile.name << "\n";
    out << "seed = " << cfg.master_seed << "\n";
    out << "repeats = " << cfg.profile.repeats << "\n";
    out << "training_size = " << cfg.profile.training_size << "\n";
    out << "subset_kinds = ";
    for (std::size_t i = 0; i < cfg.subset_kinds.size(); ++i)
        out << (i ? ";" : "") << subset_kind_name(cfg.subset_kinds[i]);
    out << "\n";
    out << "ro_fresh = " << (cfg.ro_fresh ? "true" : "false") << "\n";
    out << "suite = ";
    for (std::size_t i = 0; i < cfg.test_suite.size(); ++i)
        out << (i ? ";" : "") << cfg.test_suite[i].token();
    out << "\n\n";
    out << "[cop]\n";
    out << "dimension = " << cfg.profile.dimension << "\n";
    out << "budget = " << cfg.profile.budget << "\n";
    out << "precision = " << fmt_g(cfg.profile.target_precision) << "\n";
    out << "coeff_min = " << fmt_g(cfg.coeff_min) << "\n";
    out << "coeff_max = " << fmt_g(cfg.coeff_max) << "\n";
    out << "offset_min = " << fmt_g(cfg.offset_min) << "\n";
    out << "offset_max = " << fmt_g(cfg.offset_max) << "\n";
    out << "active_probability = " << fmt_g(cfg.active_probability) << "\n";
    out << "box_lower = " << fmt_g(cfg.box_lower) << "\n";
    out << "box_upper = " << fmt_g(cfg.box_upper) << "\n\n";
    out << "[features]\n";
    out << "n_samples = " << cfg.feature_settings.n_samples << "\n";
    out << "vicinity_radius_fraction = " << fmt_g(cfg.feature_settings.vicinity_radius_fraction)
        << "\n\n";
    out << "[evolver]\n";
    out << "population = " << cfg.profile.evolver_population << "\n";
    out << "generations = " << cfg.profile.evolver_generations << "\n";
    out << "inner_repeats = " << cfg.profile.evolver_inner_repeats << "\n";
    return out.str();
}

} // namespace copsel
