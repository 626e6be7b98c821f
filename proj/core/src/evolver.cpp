#include "copsel/evolver.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <numeric>
#include <sstream>

#include "copsel/errors.hpp"
#include "copsel/format.hpp"
#include "copsel/rng.hpp"

namespace copsel {

std::string subset_kind_name(SubsetKind k) {
    switch (k) {
        case SubsetKind::EP: return "EP";
        case SubsetKind::PF: return "PF";
        case SubsetKind::RO: return "RO";
        case SubsetKind::PFR: return "PFR";
    }
    throw ContractError("subset_kind_name: bad tag");
}

SubsetKind parse_subset_kind(const std::string& name) {
    if (name == "EP") return SubsetKind::EP;
    if (name == "PF") return SubsetKind::PF;
    if (name == "RO") return SubsetKind::RO;
    if (name == "PFR") return SubsetKind::PFR;
    throw ParseError("subset", "unknown subset kind '" + name + "'");
}

std::string subset_tag_name(SubsetTag t) {
    switch (t) {
        case SubsetTag::ExtremePoint: return "extreme_point";
        case SubsetTag::ParetoFront: return "pareto_front";
        case SubsetTag::RandomPool: return "random_pool";
    }
    throw ContractError("subset_tag_name: bad tag");
}

double EvolvedInstance::others_mean_fen() const {
    double sum = 0.0;
    int count = 0;
    for (auto kind : kAllSolvers) {
        if (kind == target) continue;
        sum += scores.at(kind);
        ++count;
    }
    return sum / count;
}

namespace {

// minimization coordinates: hard target -> (-fen(target), mean(others));
// easy target swaps both senses
std::pair<double, double> min_objectives(const std::map<SolverKind, double>& scores,
                                         SolverKind target, bool target_hard) {
    double others = 0.0;
    int count = 0;
    for (auto kind : kAllSolvers) {
        if (kind == target) continue;
        others += scores.at(kind);
        ++count;
    }
    others /= count;
    const double t = scores.at(target);
    return target_hard ? std::make_pair(-t, others) : std::make_pair(t, -others);
}

} // namespace

bool dominates(const std::map<SolverKind, double>& a, const std::map<SolverKind, double>& b,
               SolverKind target, bool target_hard) {
    const auto [a1, a2] = min_objectives(a, target, target_hard);
    const auto [b1, b2] = min_objectives(b, target, target_hard);
    return a1 <= b1 && a2 <= b2 && (a1 < b1 || a2 < b2);
}

void EvolverConfig::validate() const {
    if (population_size < 4) throw ConfigError("EvolverConfig: population_size must be >= 4");
    if (generations < 0) throw ConfigError("EvolverConfig: generations must be >= 0");
    if (inner_repeats < 1) throw ConfigError("EvolverConfig: inner_repeats must be >= 1");
    if (final_repeats < 0) throw ConfigError("EvolverConfig: final_repeats must be >= 0");
    if (inner_budget < 1) throw ConfigError("EvolverConfig: inner_budget must be >= 1");
    if (!(de_scale > 0.0) || de_scale > 2.0)
        throw ConfigError("EvolverConfig: de_scale must be in (0, 2]");
    if (de_crossover < 0.0 || de_crossover > 1.0)
        throw ConfigError("EvolverConfig: de_crossover must be in [0, 1]");
    if (!(target_precision > 0.0))
        throw ConfigError("EvolverConfig: target_precision must be positive");
}

std::vector<std::vector<std::size_t>> non_dominated_sort(std::vector<EvolvedInstance>& pop) {
    const std::size_t n = pop.size();
    std::vector<std::vector<std::size_t>> fronts;
    std::vector<int> domination_count(n, 0);
    std::vector<std::vector<std::size_t>> dominated_by(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            if (dominates(pop[i].scores, pop[j].scores, pop[i].target, pop[i].target_hard))
                dominated_by[i].push_back(j);
            else if (dominates(pop[j].scores, pop[i].scores, pop[i].target, pop[i].target_hard))
                ++domination_count[i];
        }
    std::vector<std::size_t> current;
    for (std::size_t i = 0; i < n; ++i)
        if (domination_count[i] == 0) current.push_back(i);
    int rank = 1;
    while (!current.empty()) {
        for (auto i : current) pop[i].pareto_rank = rank;
        fronts.push_back(current);
        std::vector<std::size_t> next;
        for (auto i : current)
            for (auto j : dominated_by[i])
                if (--domination_count[j] == 0) next.push_back(j);
        current = std::move(next);
        ++rank;
    }
    return fronts;
}

namespace {

std::vector<double> crowding_distance(const std::vector<EvolvedInstance>& pop,
                                      const std::vector<std::size_t>& front) {
    const std::size_t n = front.size();
    std::vector<double> distance(n, 0.0);
    if (n <= 2) {
        std::fill(distance.begin(), distance.end(), std::numeric_limits<double>::infinity());
        return distance;
    }
    for (int obj = 0; obj < 2; ++obj) {
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        auto value = [&](std::size_t k) {
            const auto& m = pop[front[k]];
            const auto [o1, o2] = min_objectives(m.scores, m.target, m.target_hard);
            return obj == 0 ? o1 : o2;
        };
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return value(a) < value(b); });
        distance[order.front()] = std::numeric_limits<double>::infinity();
        distance[order.back()] = std::numeric_limits<double>::infinity();
        const double span = value(order.back()) - value(order.front());
        if (span <= 0.0) continue;
        for (std::size_t k = 1; k + 1 < n; ++k)
            distance[order[k]] += (value(order[k + 1]) - value(order[k - 1])) / span;
    }
    return distance;
}

// the evolvable coefficient slots: lin + offset always, quad for
// non-linear-inequality constraints
struct Genome {
    std::vector<double> values;
    std::vector<double> lower, upper;
};

Genome encode_genome(const COPInstance& inst, const GeneratorSpec& base) {
    Genome g;
    for (const auto& c : inst.constraints) {
        if (c.kind != ConstraintKind::LinearInequality)
            for (double q : c.quad) {
                g.values.push_back(q);
                g.lower.push_back(base.coeff_min);
                g.upper.push_back(base.coeff_max);
            }
        for (double l : c.lin) {
            g.values.push_back(l);
            g.lower.push_back(base.coeff_min);
            g.upper.push_back(base.coeff_max);
        }
        g.values.push_back(c.offset);
        g.lower.push_back(base.offset_min);
        g.upper.push_back(base.offset_max);
    }
    return g;
}

// returns false if the decoded instance cannot honor the base's
// optimum-feasibility request within the coefficient bounds
bool decode_genome(const std::vector<double>& values, const GeneratorSpec& base,
                   COPInstance& inst) {
    std::size_t pos = 0;
    for (auto& c : inst.constraints) {
        if (c.kind != ConstraintKind::LinearInequality)
            for (auto& q : c.quad) q = values[pos++];
        for (auto& l : c.lin) l = values[pos++];
        c.offset = values[pos++];
    }
    const auto opt = inst.optimum();
    if (base.optimum_feasible) {
        // shift offsets so the optimum sits on or inside each constraint
        for (auto& c : inst.constraints) {
            const double g = c.value(opt);
            const double excess = c.kind == ConstraintKind::Equality
                                      ? (std::abs(g) > inst.epsilon ? g : 0.0)
                                      : std::max(0.0, g);
            if (excess != 0.0) c.offset -= excess;
            if (c.offset < base.offset_min || c.offset > base.offset_max) return false;
        }
    }
    // degenerate all-zero coefficient vectors are invalid constraints
    try {
        inst.validate();
    } catch (const ContractError&) {
        return false;
    }
    return violation(inst, opt).phi == 0.0 || !base.optimum_feasible;
}

std::map<SolverKind, double> score_instance(const COPInstance& inst, const EvolverConfig& cfg,
                                            std::uint64_t seed) {
    std::map<SolverKind, double> scores;
    for (auto kind : kAllSolvers) {
        auto it = cfg.solver_configs.find(kind);
        const SolverConfig sc = it != cfg.solver_configs.end() ? it->second
                                                               : SolverConfig::defaults(kind);
        const auto entry = measure(inst, kind, sc, cfg.inner_budget, cfg.target_precision,
                                   cfg.inner_repeats, derive_seed(seed, {solver_name(kind)}));
        scores[kind] = entry.mean_fen;
    }
    return scores;
}

} // namespace

EvolveResult evolve(const EvolverConfig& config, const GeneratorSpec& base, std::uint64_t seed) {
    config.validate();
    EvolveResult result;
    result.config = config;
    result.base = base;

    const std::string run_label =
        solver_name(config.target) + (config.target_hard ? "-hard" : "-easy");
    Rng rng(derive_seed(seed, {"evolve", run_label}));

    auto make_individual = [&](const COPInstance& inst, std::uint64_t score_seed) {
        EvolvedInstance e;
        e.instance = inst;
        e.target = config.target;
        e.target_hard = config.target_hard;
        e.scores = score_instance(inst, config, score_seed);
        return e;
    };

    std::vector<EvolvedInstance> pop;
    std::vector<Genome> genomes;
    for (int i = 0; i < config.population_size; ++i) {
        auto spec = base;
        spec.id_prefix = run_label + "-g0-i" + std::to_string(i);
        const auto inst =
            random_instance(spec, derive_seed(seed, {run_label, "init", std::to_string(i)}));
        pop.push_back(
            make_individual(inst, derive_seed(seed, {run_label, "score0", std::to_string(i)})));
        genomes.push_back(encode_genome(inst, base));
        result.archive.push_back(pop.back());
    }

    for (int gen = 1; gen <= config.generations; ++gen) {
        const int np = config.population_size;
        std::vector<EvolvedInstance> extra;
        std::vector<Genome> extra_genomes;
        for (int i = 0; i < np; ++i) {
            std::size_t r1 = uniform_index(rng, np);
            while (static_cast<int>(r1) == i) r1 = uniform_index(rng, np);
            std::size_t r2 = uniform_index(rng, np);
            while (static_cast<int>(r2) == i || r2 == r1) r2 = uniform_index(rng, np);
            std::size_t r3 = uniform_index(rng, np);
            while (static_cast<int>(r3) == i || r3 == r1 || r3 == r2) r3 = uniform_index(rng, np);

            const std::size_t glen = genomes[i].values.size();
            std::vector<double> trial(glen);
            const std::size_t jrand = uniform_index(rng, glen);
            for (std::size_t j = 0; j < glen; ++j) {
                double v = (j == jrand || uniform(rng, 0.0, 1.0) < config.de_crossover)
                               ? genomes[r1].values[j] +
                                     config.de_scale *
                                         (genomes[r2].values[j] - genomes[r3].values[j])
                               : genomes[i].values[j];
                trial[j] = std::clamp(v, genomes[i].lower[j], genomes[i].upper[j]);
            }

            COPInstance inst = pop[i].instance;
            inst.id = run_label + "-g" + std::to_string(gen) + "-i" + std::to_string(i);
            if (!decode_genome(trial, base, inst)) {
                std::cerr << "evolve: discarding invalid candidate " << inst.id << "\n";
                continue;
            }
            auto child = make_individual(
                inst, derive_seed(seed, {run_label, "score", std::to_string(gen),
                                         std::to_string(i)}));
            result.archive.push_back(child);

            Genome child_genome = genomes[i];
            child_genome.values = encode_genome(inst, base).values;

            if (dominates(child.scores, pop[i].scores, config.target, config.target_hard)) {
                pop[i] = std::move(child);
                genomes[i] = std::move(child_genome);
            } else if (!dominates(pop[i].scores, child.scores, config.target,
                                  config.target_hard)) {
                extra.push_back(std::move(child));
                extra_genomes.push_back(std::move(child_genome));
            }
        }

        if (!extra.empty()) {
            for (std::size_t k = 0; k < extra.size(); ++k) {
                pop.push_back(std::move(extra[k]));
                genomes.push_back(std::move(extra_genomes[k]));
            }
            // truncate back to population_size by rank, then crowding
            auto fronts = non_dominated_sort(pop);
            std::vector<std::size_t> keep;
            for (const auto& front : fronts) {
                if (keep.size() + front.size() <= static_cast<std::size_t>(np)) {
                    keep.insert(keep.end(), front.begin(), front.end());
                } else {
                    auto distance = crowding_distance(pop, front);
                    std::vector<std::size_t> order(front.size());
                    std::iota(order.begin(), order.end(), 0);
                    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                        return distance[a] > distance[b];
                    });
                    for (auto k : order) {
                        if (keep.size() == static_cast<std::size_t>(np)) break;
                        keep.push_back(front[k]);
                    }
                }
                if (keep.size() == static_cast<std::size_t>(np)) break;
            }
            std::vector<EvolvedInstance> new_pop;
            std::vector<Genome> new_genomes;
            for (auto k : keep) {
                new_pop.push_back(std::move(pop[k]));
                new_genomes.push_back(std::move(genomes[k]));
            }
            pop = std::move(new_pop);
            genomes = std::move(new_genomes);
        }
    }

    // evolution ranks on cheap reduced-repeat scores; the surviving
    // population gets re-scored at full repeats before the final sort
    if (config.final_repeats > 0 && config.final_repeats != config.inner_repeats) {
        EvolverConfig full = config;
        full.inner_repeats = config.final_repeats;
        for (auto& e : pop)
            e.scores = score_instance(e.instance, full,
                                      derive_seed(seed, {run_label, "final", e.instance.id}));
    }

    non_dominated_sort(pop);
    for (auto& e : result.archive) e.subset_tags.insert(SubsetTag::RandomPool);
    for (auto& e : pop)
        if (e.pareto_rank == 1) e.subset_tags.insert(SubsetTag::ParetoFront);
    result.population = std::move(pop);
    return result;
}

namespace {

std::vector<EvolvedInstance> sample_without_replacement(std::vector<EvolvedInstance> pool,
                                                        std::size_t n, Rng& rng,
                                                        const char* kind) {
    if (pool.empty()) throw DataError(std::string("select_subset: empty source pool for ") + kind);
    if (n >= pool.size()) {
        if (n > pool.size())
            std::cerr << "select_subset: requested " << n << " " << kind << " instances, only "
                      << pool.size() << " available\n";
        return pool;
    }
    std::shuffle(pool.begin(), pool.end(), rng);
    pool.resize(n);
    return pool;
}

} // namespace

std::vector<EvolvedInstance> select_subset(const std::vector<EvolveResult>& runs, SubsetKind kind,
                                           std::size_t n, std::uint64_t seed) {
    Rng rng(derive_seed(seed, {"select_subset", subset_kind_name(kind)}));

    auto front_pool = [&] {
        std::vector<EvolvedInstance> pool;
        for (const auto& run : runs)
            for (const auto& e : run.population)
                if (e.pareto_rank == 1) {
                    pool.push_back(e);
                    pool.back().subset_tags.insert(SubsetTag::ParetoFront);
                }
        return pool;
    };
    auto archive_pool = [&] {
        std::vector<EvolvedInstance> pool;
        for (const auto& run : runs)
            for (const auto& e : run.archive) {
                pool.push_back(e);
                pool.back().subset_tags.insert(SubsetTag::RandomPool);
            }
        return pool;
    };

    switch (kind) {
        case SubsetKind::EP: {
            std::vector<EvolvedInstance> pool;
            for (const auto& run : runs) {
                std::vector<const EvolvedInstance*> front;
                for (const auto& e : run.population)
                    if (e.pareto_rank == 1) front.push_back(&e);
                if (front.empty()) continue;
                auto objective = [&](const EvolvedInstance* e, int which) {
                    const auto [o1, o2] = min_objectives(e->scores, e->target, e->target_hard);
                    return which == 0 ? o1 : o2;
                };
                for (int which = 0; which < 2; ++which) {
                    const auto* extreme = *std::min_element(
                        front.begin(), front.end(), [&](const auto* a, const auto* b) {
                            return objective(a, which) < objective(b, which);
                        });
                    pool.push_back(*extreme);
                    pool.back().subset_tags.insert(SubsetTag::ExtremePoint);
                }
            }
            return sample_without_replacement(std::move(pool), n, rng, "EP");
        }
        case SubsetKind::PF:
            return sample_without_replacement(front_pool(), n, rng, "PF");
        case SubsetKind::RO:
            return sample_without_replacement(archive_pool(), n, rng, "RO");
        case SubsetKind::PFR: {
            auto half = sample_without_replacement(front_pool(), n / 2 + n % 2, rng, "PFR");
            auto rest = sample_without_replacement(archive_pool(), n / 2, rng, "PFR");
            half.insert(half.end(), rest.begin(), rest.end());
            return half;
        }
    }
    throw ContractError("select_subset: bad subset kind");
}

namespace {

void dump_instances(const std::vector<EvolvedInstance>& pop, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    std::ostringstream manifest;
    manifest << "id,target,sense,fen_DE,fen_ES,fen_PSO,pareto_rank,tags\n";
    for (const auto& e : pop) {
        save_instance(e.instance, (fs::path(dir) / (e.instance.id + ".json")).string());
        manifest << e.instance.id << ',' << solver_name(e.target) << ','
                 << (e.target_hard ? "hard" : "easy");
        for (auto kind : kAllSolvers) manifest << ',' << fmt_g(e.scores.at(kind));
        manifest << ',' << e.pareto_rank << ',';
        bool first = true;
        for (auto t : e.subset_tags) {
            if (!first) manifest << ';';
            manifest << subset_tag_name(t);
            first = false;
        }
        manifest << '\n';
    }
    std::ofstream out(fs::path(dir) / "manifest.csv", std::ios::binary);
    if (!out) throw DataError("cannot write population manifest in '" + dir + "'");
    out << manifest.str();
}

std::vector<EvolvedInstance> load_instances(const std::string& dir) {
    namespace fs = std::filesystem;
    std::ifstream in(fs::path(dir) / "manifest.csv");
    if (!in) throw DataError("cannot read population manifest in '" + dir + "'");
    std::string line;
    if (!std::getline(in, line) || line != "id,target,sense,fen_DE,fen_ES,fen_PSO,pareto_rank,tags")
        throw ParseError(dir + "/manifest.csv", "bad or missing header row");
    std::vector<EvolvedInstance> pop;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cols;
        std::istringstream ls(line);
        std::string col;
        while (std::getline(ls, col, ',')) cols.push_back(col);
        if (cols.size() < 7) throw ParseError(dir + "/manifest.csv", "row with too few columns");
        EvolvedInstance e;
        e.instance = load_instance((fs::path(dir) / (cols[0] + ".json")).string());
        e.target = parse_solver(cols[1]);
        if (cols[2] != "hard" && cols[2] != "easy")
            throw ParseError(dir + "/manifest.csv", "bad sense '" + cols[2] + "'");
        e.target_hard = cols[2] == "hard";
        for (std::size_t k = 0; k < kAllSolvers.size(); ++k)
            e.scores[kAllSolvers[k]] = std::stod(cols[3 + k]);
        e.pareto_rank = std::stoi(cols[6]);
        if (cols.size() > 7 && !cols[7].empty()) {
            std::istringstream ts(cols[7]);
            std::string tag;
            while (std::getline(ts, tag, ';')) {
                if (tag == "extreme_point") e.subset_tags.insert(SubsetTag::ExtremePoint);
                else if (tag == "pareto_front") e.subset_tags.insert(SubsetTag::ParetoFront);
                else if (tag == "random_pool") e.subset_tags.insert(SubsetTag::RandomPool);
                else throw ParseError(dir + "/manifest.csv", "unknown tag '" + tag + "'");
            }
        }
        pop.push_back(std::move(e));
    }
    return pop;
}

} // namespace

void save_population(const EvolveResult& result, const std::string& dir) {
    namespace fs = std::filesystem;
    dump_instances(result.population, dir);
    dump_instances(result.archive, (fs::path(dir) / "archive").string());
}

EvolveResult load_population(const std::string& dir) {
    namespace fs = std::filesystem;
    EvolveResult result;
    result.population = load_instances(dir);
    if (result.population.empty()) throw DataError("empty population dump in '" + dir + "'");
    const auto archive_dir = fs::path(dir) / "archive";
    result.archive = fs::exists(archive_dir / "manifest.csv") ? load_instances(archive_dir.string())
                                                              : result.population;
    result.config.target = result.population.front().target;
    result.config.target_hard = result.population.front().target_hard;
    return result;
}

} // namespace copsel
