#include "copsel/features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "copsel/errors.hpp"
#include "copsel/format.hpp"
#include "copsel/rng.hpp"

namespace copsel {

namespace {

double population_std(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= v.size();
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / v.size());
}

double angle_between(const std::vector<double>& a, const std::vector<double>& b) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    const double c = std::clamp(dot / std::sqrt(na * nb), -1.0, 1.0);
    return std::acos(c);
}

bool is_zero(const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}

} // namespace

std::vector<double> FeatureVector::encode() const {
    return {static_cast<double>(n_linear),
            static_cast<double>(n_quadratic),
            static_cast<double>(n_equality),
            coeff_std,
            coeff_std_per_constraint_mean,
            angle_mean,
            angle_min,
            angle_max,
            angle_valid ? 1.0 : 0.0,
            feasibility_ratio_near_optimum,
            feasibility_ratio_global,
            optimum_feasible ? 1.0 : 0.0,
            static_cast<double>(dimension)};
}

const std::vector<std::string>& FeatureVector::field_names() {
    static const std::vector<std::string> names = {"n_linear",
                                                   "n_quadratic",
                                                   "n_equality",
                                                   "coeff_std",
                                                   "coeff_std_per_constraint_mean",
                                                   "angle_mean",
                                                   "angle_min",
                                                   "angle_max",
                                                   "angle_valid",
                                                   "feasibility_ratio_near_optimum",
                                                   "feasibility_ratio_global",
                                                   "optimum_feasible",
                                                   "dimension"};
    return names;
}

FeatureVector extract_features(const COPInstance& inst, const FeatureSettings& settings,
                               std::uint64_t seed) {
    if (settings.n_samples < 1) throw ContractError("extract_features: n_samples must be >= 1");
    if (!(settings.vicinity_radius_fraction > 0.0 && settings.vicinity_radius_fraction <= 1.0))
        throw ContractError("extract_features: vicinity_radius_fraction must be in (0,1]");

    FeatureVector fv;
    fv.dimension = inst.space.dimension;

    std::vector<double> pooled;
    std::vector<double> per_constraint_std;
    for (const auto& c : inst.constraints) {
        switch (c.kind) {
            case ConstraintKind::LinearInequality: ++fv.n_linear; break;
            case ConstraintKind::QuadraticInequality: ++fv.n_quadratic; break;
            case ConstraintKind::Equality: ++fv.n_equality; break;
        }
        pooled.insert(pooled.end(), c.lin.begin(), c.lin.end());
        per_constraint_std.push_back(population_std(c.lin));
    }
    fv.coeff_std = population_std(pooled);
    if (!per_constraint_std.empty()) {
        double s = 0.0;
        for (double x : per_constraint_std) s += x;
        fv.coeff_std_per_constraint_mean = s / per_constraint_std.size();
    }

    // pairwise angles between constraint gradients at the known optimum;
    // zero-gradient constraints are skipped
    const auto opt = inst.optimum();
    std::vector<std::vector<double>> grads;
    for (const auto& c : inst.constraints) {
        auto g = c.gradient(opt);
        if (!is_zero(g)) grads.push_back(std::move(g));
    }
    if (grads.size() >= 2) {
        double sum = 0.0;
        double amin = std::numbers::pi, amax = 0.0;
        int pairs = 0;
        for (std::size_t i = 0; i < grads.size(); ++i)
            for (std::size_t j = i + 1; j < grads.size(); ++j) {
                const double a = angle_between(grads[i], grads[j]);
                sum += a;
                amin = std::min(amin, a);
                amax = std::max(amax, a);
                ++pairs;
            }
        fv.angle_mean = sum / pairs;
        fv.angle_min = amin;
        fv.angle_max = amax;
        fv.angle_valid = true;
    }

    fv.optimum_feasible = violation(inst, opt).phi == 0.0;

    Rng rng(seed);
    const int d = inst.space.dimension;
    std::vector<double> x(d);

    long feasible = 0;
    for (int s = 0; s < settings.n_samples; ++s) {
        for (int j = 0; j < d; ++j) x[j] = uniform(rng, inst.space.lower[j], inst.space.upper[j]);
        if (violation(inst, x).phi == 0.0) ++feasible;
    }
    fv.feasibility_ratio_global = static_cast<double>(feasible) / settings.n_samples;

    // uniform samples from the vicinity ball, rejecting points outside the box
    const double radius = settings.vicinity_radius_fraction * inst.space.mean_width();
    long in_box = 0;
    feasible = 0;
    for (int s = 0; s < settings.n_samples; ++s) {
        // uniform in the d-ball: gaussian direction, radius ~ u^(1/d)
        double norm2 = 0.0;
        for (int j = 0; j < d; ++j) {
            x[j] = gauss(rng);
            norm2 += x[j] * x[j];
        }
        const double r = radius * std::pow(uniform(rng, 0.0, 1.0), 1.0 / d) / std::sqrt(norm2);
        for (int j = 0; j < d; ++j) x[j] = opt[j] + r * x[j];
        if (!inst.space.contains(x)) continue;
        ++in_box;
        if (violation(inst, x).phi == 0.0) ++feasible;
    }
    fv.feasibility_ratio_near_optimum =
        in_box > 0 ? static_cast<double>(feasible) / in_box : 0.0;

    return fv;
}

std::vector<double> NormStats::apply(const std::vector<double>& v) const {
    if (v.size() != mean.size()) throw ContractError("NormStats::apply: length mismatch");
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        out[i] = std_dev[i] > 0.0 ? (v[i] - mean[i]) / std_dev[i] : 0.0;
    return out;
}

std::vector<double> NormStats::invert(const std::vector<double>& v) const {
    if (v.size() != mean.size()) throw ContractError("NormStats::invert: length mismatch");
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        out[i] = std_dev[i] > 0.0 ? v[i] * std_dev[i] + mean[i] : mean[i];
    return out;
}

NormStats fit_normalization(const std::vector<std::vector<double>>& dataset) {
    if (dataset.empty()) throw ContractError("fit_normalization: dataset must be non-empty");
    const std::size_t n = dataset.size();
    const std::size_t len = dataset.front().size();
    NormStats ns;
    ns.mean.assign(len, 0.0);
    ns.std_dev.assign(len, 0.0);
    for (const auto& row : dataset) {
        if (row.size() != len) throw ContractError("fit_normalization: ragged dataset");
        for (std::size_t i = 0; i < len; ++i) ns.mean[i] += row[i];
    }
    for (auto& m : ns.mean) m /= static_cast<double>(n);
    for (const auto& row : dataset)
        for (std::size_t i = 0; i < len; ++i) {
            const double d = row[i] - ns.mean[i];
            ns.std_dev[i] += d * d;
        }
    for (auto& s : ns.std_dev) s = std::sqrt(s / static_cast<double>(n));
    return ns;
}

std::string feature_table_csv(const std::vector<std::string>& instance_ids,
                              const std::vector<FeatureVector>& rows) {
    if (instance_ids.size() != rows.size())
        throw ContractError("feature_table_csv: id/row count mismatch");
    std::ostringstream out;
    out << "instance_id";
    for (const auto& n : FeatureVector::field_names()) out << ',' << n;
    out << '\n';
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out << instance_ids[i];
        for (double v : rows[i].encode()) out << ',' << fmt_g(v);
        out << '\n';
    }
    return out.str();
}

} // namespace copsel
