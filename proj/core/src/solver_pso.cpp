#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "copsel/errors.hpp"
#include "copsel/rng.hpp"
#include "copsel/solvers.hpp"

// Multi-swarm PSO: the swarm is partitioned into sub-swarms, each particle is
// attracted to its personal best and its sub-swarm's local best, bests are
// ordered by the epsilon-level comparison at level 0, and sub-swarm
// membership is reshuffled every pso_reshuffle_period generations.

namespace copsel {

namespace {

struct Particle {
    std::vector<double> x;
    std::vector<double> v;
    std::vector<double> pbest_x;
    FPhi pbest;
};

} // namespace

RunResult solve_pso(const COPInstance& inst, const SolverConfig& config, long budget,
                    double target_precision, std::uint64_t seed, Evaluator* ev_out) {
    if (config.kind != SolverKind::PSO) throw ConfigError("solve_pso: config.kind must be PSO");
    config.validate();
    const int n = config.population_size;
    if (budget < n) throw ConfigError("solve_pso: budget must be >= population_size");

    Evaluator local_ev(inst, budget, target_precision);
    Evaluator& ev = ev_out ? *ev_out : local_ev;
    Rng rng(seed);
    const int d = inst.space.dimension;

    std::vector<double> vmax(d);
    for (int j = 0; j < d; ++j) vmax[j] = 0.5 * (inst.space.upper[j] - inst.space.lower[j]);

    std::vector<Particle> swarm(n);
    for (auto& p : swarm) {
        p.x.resize(d);
        p.v.assign(d, 0.0);
        for (int j = 0; j < d; ++j) {
            p.x[j] = uniform(rng, inst.space.lower[j], inst.space.upper[j]);
            p.v[j] = uniform(rng, -vmax[j], vmax[j]);
        }
        if (ev.exhausted()) return ev.result(seed);
        p.pbest = ev.evaluate(p.x).fphi();
        p.pbest_x = p.x;
    }

    // membership[i] = index of the particle at slot i; sub-swarm s owns slots
    // [s*size, (s+1)*size)
    std::vector<int> membership(n);
    std::iota(membership.begin(), membership.end(), 0);

    const int subswarms = config.pso_subswarm_count;
    const int sub_size = config.pso_subswarm_size;
    std::vector<int> local_best(subswarms);

    auto refresh_local_bests = [&] {
        for (int s = 0; s < subswarms; ++s) {
            int best = membership[s * sub_size];
            for (int k = 1; k < sub_size; ++k) {
                const int i = membership[s * sub_size + k];
                if (epsilon_compare(swarm[i].pbest, swarm[best].pbest, 0.0) == Ordering::Less)
                    best = i;
            }
            local_best[s] = best;
        }
    };
    refresh_local_bests();

    for (long gen = 1; !ev.exhausted() && !ev.succeeded(); ++gen) {
        if (gen % config.pso_reshuffle_period == 0)
            std::shuffle(membership.begin(), membership.end(), rng);
        refresh_local_bests();

        for (int s = 0; s < subswarms; ++s) {
            const auto& lbest = swarm[local_best[s]].pbest_x;
            for (int k = 0; k < sub_size && !ev.exhausted(); ++k) {
                auto& p = swarm[membership[s * sub_size + k]];
                for (int j = 0; j < d; ++j) {
                    const double r1 = uniform(rng, 0.0, 1.0);
                    const double r2 = uniform(rng, 0.0, 1.0);
                    p.v[j] = config.pso_inertia * p.v[j] +
                             config.pso_c1 * r1 * (p.pbest_x[j] - p.x[j]) +
                             config.pso_c2 * r2 * (lbest[j] - p.x[j]);
                    p.v[j] = std::clamp(p.v[j], -vmax[j], vmax[j]);
                    p.x[j] += p.v[j];
                }
                inst.space.clamp(p.x);
                const auto fp = ev.evaluate(p.x).fphi();
                if (epsilon_compare(fp, p.pbest, 0.0) == Ordering::Less) {
                    p.pbest = fp;
                    p.pbest_x = p.x;
                }
            }
        }
    }
    return ev.result(seed);
}

} // namespace copsel
