#include <algorithm>
#include <cmath>
#include <vector>

#include "copsel/errors.hpp"
#include "copsel/rng.hpp"
#include "copsel/solvers.hpp"

// Epsilon-constrained DE/rand/1/bin with an archive of replaced parents and
// gradient-based repair of infeasible trials. Selection uses the shared
// epsilon-level comparison with a level that decays to exactly zero at the
// cutoff generation.

namespace copsel {

namespace {

struct Individual {
    std::vector<double> x;
    FPhi fphi;
};

// one Newton-like step toward phi = 0 along the finite-difference gradient
// of the violation; every probe is a counted evaluation
bool gradient_repair(const COPInstance& inst, Evaluator& ev, std::vector<double>& x, double phi) {
    const int d = inst.space.dimension;
    std::vector<double> grad(d);
    std::vector<double> probe = x;
    for (int j = 0; j < d; ++j) {
        if (ev.exhausted()) return false;
        const double h = 1e-6 * (inst.space.upper[j] - inst.space.lower[j]);
        probe[j] = x[j] + h;
        const double phi_h = ev.violation_only(probe);
        probe[j] = x[j];
        grad[j] = (phi_h - phi) / h;
    }
    double norm2 = 0.0;
    for (double g : grad) norm2 += g * g;
    if (!(norm2 > 0.0) || !std::isfinite(norm2)) return false;
    const double step = phi / norm2;
    for (int j = 0; j < d; ++j) x[j] -= step * grad[j];
    inst.space.clamp(x);
    return true;
}

} // namespace

RunResult solve_de(const COPInstance& inst, const SolverConfig& config, long budget,
                   double target_precision, std::uint64_t seed, Evaluator* ev_out) {
    if (config.kind != SolverKind::DE) throw ConfigError("solve_de: config.kind must be DE");
    config.validate();
    const int np = config.population_size;
    if (budget < np) throw ConfigError("solve_de: budget must be >= population_size");

    Evaluator local_ev(inst, budget, target_precision);
    Evaluator& ev = ev_out ? *ev_out : local_ev;
    Rng rng(seed);
    const int d = inst.space.dimension;

    std::vector<Individual> pop(np);
    for (auto& ind : pop) {
        ind.x.resize(d);
        for (int j = 0; j < d; ++j)
            ind.x[j] = uniform(rng, inst.space.lower[j], inst.space.upper[j]);
        if (ev.exhausted()) return ev.result(seed);
        ind.fphi = ev.evaluate(ind.x).fphi();
    }

    std::vector<std::vector<double>> archive;
    const long cutoff = std::max<long>(1, config.eps_level_cutoff_generation);

    std::vector<double> trial(d), mutant(d);
    for (long gen = 1; !ev.exhausted() && !ev.succeeded(); ++gen) {
        const double eps_level = eps_level_schedule(config.eps_level_initial,
                                                    config.eps_level_decay_exponent, gen, cutoff);
        for (int i = 0; i < np && !ev.exhausted(); ++i) {
            std::size_t r1 = uniform_index(rng, np);
            while (static_cast<int>(r1) == i) r1 = uniform_index(rng, np);
            std::size_t r2 = uniform_index(rng, np);
            while (static_cast<int>(r2) == i || r2 == r1) r2 = uniform_index(rng, np);
            // base of the difference pair may come from the archive
            const std::size_t pool = np + archive.size();
            std::size_t r3 = uniform_index(rng, pool);
            while (r3 < static_cast<std::size_t>(np) &&
                   (static_cast<int>(r3) == i || r3 == r1 || r3 == r2))
                r3 = uniform_index(rng, pool);
            const auto& x3 =
                r3 < static_cast<std::size_t>(np) ? pop[r3].x : archive[r3 - np];

            for (int j = 0; j < d; ++j)
                mutant[j] = pop[r1].x[j] + config.de_scale * (pop[r2].x[j] - x3[j]);

            const int jrand = static_cast<int>(uniform_index(rng, d));
            for (int j = 0; j < d; ++j)
                trial[j] = (j == jrand || uniform(rng, 0.0, 1.0) < config.de_crossover)
                               ? mutant[j]
                               : pop[i].x[j];
            inst.space.clamp(trial);

            auto tp = ev.evaluate(trial).fphi();
            if (tp.phi > 0.0 && !ev.exhausted() &&
                uniform(rng, 0.0, 1.0) < config.gradient_repair_prob) {
                auto repaired = trial;
                if (gradient_repair(inst, ev, repaired, tp.phi) && !ev.exhausted()) {
                    const auto rp = ev.evaluate(repaired).fphi();
                    if (epsilon_compare(rp, tp, eps_level) == Ordering::Less) {
                        trial = repaired;
                        tp = rp;
                    }
                }
            }

            if (epsilon_compare(tp, pop[i].fphi, eps_level) != Ordering::Greater) {
                if (config.archive_size > 0) {
                    if (static_cast<int>(archive.size()) < config.archive_size)
                        archive.push_back(pop[i].x);
                    else
                        archive[uniform_index(rng, archive.size())] = pop[i].x;
                }
                pop[i].x = trial;
                pop[i].fphi = tp;
            }
        }
    }
    return ev.result(seed);
}

} // namespace copsel
