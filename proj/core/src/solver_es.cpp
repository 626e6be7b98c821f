#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "copsel/errors.hpp"
#include "copsel/rng.hpp"
#include "copsel/solvers.hpp"

// (1+1)-ES with covariance adaptation for constrained problems: success-based
// global step-size control, a rank-one update of the Cholesky-like transform
// on feasible successes, and, per constraint, an exponentially smoothed
// (low-pass filtered) record of steps that violated it along which the
// offspring distribution's variance is shrunk.

namespace copsel {

RunResult solve_es(const COPInstance& inst, const SolverConfig& config, long budget,
                   double target_precision, std::uint64_t seed, Evaluator* ev_out,
                   std::vector<std::vector<double>>* violation_dirs_out) {
    if (config.kind != SolverKind::ES) throw ConfigError("solve_es: config.kind must be ES");
    config.validate();

    Evaluator local_ev(inst, budget, target_precision);
    Evaluator& ev = ev_out ? *ev_out : local_ev;
    Rng rng(seed);
    const int d = inst.space.dimension;
    const std::size_t m = inst.constraints.size();

    // constants following the (1+1)-CMA-ES for constrained optimisation
    const double p_target = 2.0 / 11.0;
    const double c_p = 1.0 / 12.0;
    const double damping = 1.0 + d / 2.0;
    const double c_path = 2.0 / (d + 2.0);
    const double c_cov = config.es_covariance_learning;
    const double c_constraint = 1.0 / (d + 2.0);
    const double beta = 0.1 / (d + 2.0);

    std::vector<double> x(d);
    for (int j = 0; j < d; ++j) x[j] = uniform(rng, inst.space.lower[j], inst.space.upper[j]);
    if (ev.exhausted()) return ev.result(seed);
    auto parent = ev.evaluate(x);

    double sigma = config.es_initial_step;
    double p_succ = p_target;
    Eigen::MatrixXd transform = Eigen::MatrixXd::Identity(d, d);
    Eigen::VectorXd path = Eigen::VectorXd::Zero(d);
    std::vector<Eigen::VectorXd> violation_dirs(m, Eigen::VectorXd::Zero(d));

    std::vector<double> y(d);
    Eigen::VectorXd z(d), step(d);

    while (!ev.exhausted() && !ev.succeeded()) {
        for (int j = 0; j < d; ++j) z[j] = gauss(rng);
        step = transform * z;
        for (int j = 0; j < d; ++j) y[j] = x[j] + sigma * step[j];
        inst.space.clamp(y);

        const auto offspring = ev.evaluate(y);
        const bool accepted =
            epsilon_compare(offspring.fphi(), parent.fphi(), 0.0) != Ordering::Greater;

        p_succ = (1.0 - c_p) * p_succ + c_p * (accepted ? 1.0 : 0.0);
        sigma *= std::exp((p_succ - p_target * (1.0 - p_succ) / (1.0 - p_target)) / damping);
        sigma = std::clamp(sigma, 1e-12 * inst.space.mean_width(), 10.0 * inst.space.mean_width());

        if (offspring.phi > 0.0 && m > 0) {
            // shrink variance along the filtered directions of violated constraints
            int violated = 0;
            for (std::size_t k = 0; k < m; ++k)
                if (offspring.per_constraint.size() == m && offspring.per_constraint[k] > 0.0)
                    ++violated;
            if (violated > 0) {
                Eigen::MatrixXd correction = Eigen::MatrixXd::Zero(d, d);
                for (std::size_t k = 0; k < m; ++k) {
                    if (!(offspring.per_constraint[k] > 0.0)) continue;
                    auto& v = violation_dirs[k];
                    v = (1.0 - c_constraint) * v + c_constraint * (sigma * step);
                    Eigen::VectorXd w = transform.partialPivLu().solve(v);
                    const double wn2 = w.squaredNorm();
                    if (wn2 > 0.0 && std::isfinite(wn2))
                        correction += (v * w.transpose()) / wn2;
                }
                transform -= (beta / violated) * correction;
            }
        }

        if (accepted) {
            if (offspring.phi == 0.0) {
                path = (1.0 - c_path) * path + std::sqrt(c_path * (2.0 - c_path)) * step;
                Eigen::VectorXd w = transform.partialPivLu().solve(path);
                const double wn2 = w.squaredNorm();
                if (wn2 > 0.0 && std::isfinite(wn2)) {
                    const double a = std::sqrt(1.0 - c_cov);
                    const double b =
                        a / wn2 * (std::sqrt(1.0 + c_cov / (1.0 - c_cov) * wn2) - 1.0);
                    transform = a * transform + b * (path * w.transpose());
                }
            }
            x = y;
            parent = offspring;
        }

        if (!transform.allFinite()) {
            transform = Eigen::MatrixXd::Identity(d, d);
            path.setZero();
        }
    }
    if (violation_dirs_out) {
        violation_dirs_out->clear();
        for (const auto& v : violation_dirs)
            violation_dirs_out->emplace_back(v.data(), v.data() + v.size());
    }
    return ev.result(seed);
}

} // namespace copsel
