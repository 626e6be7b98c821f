// Acceptance suite: one pass/fail line per criterion, exit 0 only if all pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "copsel/config.hpp"
#include "copsel/cop.hpp"
#include "copsel/evolver.hpp"
#include "copsel/features.hpp"
#include "copsel/harness.hpp"
#include "copsel/model.hpp"
#include "copsel/rng.hpp"
#include "copsel/solvers.hpp"
#include "copsel/stats.hpp"

using namespace copsel;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int criterion, bool pass, const std::string& what, double seconds) {
    if (!pass) ++failures;
    std::printf("criterion %2d: %s  %s (%.1fs)\n", criterion, pass ? "PASS" : "FAIL",
                what.c_str(), seconds);
    std::fflush(stdout);
}

template <typename F>
void run(int criterion, const std::string& what, F&& body) {
    const auto t0 = std::chrono::steady_clock::now();
    bool pass = false;
    std::string detail;
    try {
        pass = body(detail);
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report(criterion, pass, what + (detail.empty() ? "" : " [" + detail + "]"), secs);
}

// ---- shared helpers -------------------------------------------------------

COPInstance unconstrained_sphere(int d) {
    COPInstance inst;
    inst.id = "sphere";
    inst.space.dimension = d;
    inst.space.lower.assign(d, -5.0);
    inst.space.upper.assign(d, 5.0);
    return inst;
}

RunResult run_solver(SolverKind kind, const COPInstance& inst, long budget, std::uint64_t seed,
                     Evaluator* ev = nullptr) {
    const auto cfg = SolverConfig::defaults(kind);
    switch (kind) {
        case SolverKind::DE: return solve_de(inst, cfg, budget, 1e-4, seed, ev);
        case SolverKind::ES: return solve_es(inst, cfg, budget, 1e-4, seed, ev);
        case SolverKind::PSO: return solve_pso(inst, cfg, budget, 1e-4, seed, ev);
    }
    std::abort();
}

// independent Welch oracle: adaptive-Simpson integration of the t density
double t_density(double x, double df) {
    const double c = std::exp(std::lgamma((df + 1.0) / 2.0) - std::lgamma(df / 2.0)) /
                     std::sqrt(df * M_PI);
    return c * std::pow(1.0 + x * x / df, -(df + 1.0) / 2.0);
}

double simpson(double a, double b, double df) {
    const double m = 0.5 * (a + b);
    return (b - a) / 6.0 * (t_density(a, df) + 4.0 * t_density(m, df) + t_density(b, df));
}

double adaptive(double a, double b, double df, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double l = simpson(a, m, df), r = simpson(m, b, df);
    if (depth <= 0 || std::abs(l + r - whole) < 15.0 * tol) return l + r + (l + r - whole) / 15.0;
    return adaptive(a, m, df, l, tol / 2.0, depth - 1) + adaptive(m, b, df, r, tol / 2.0, depth - 1);
}

double oracle_welch(const std::vector<double>& a, const std::vector<double>& b) {
    auto stats = [](const std::vector<double>& v) {
        double m = 0.0;
        for (double x : v) m += x;
        m /= v.size();
        double s2 = 0.0;
        for (double x : v) s2 += (x - m) * (x - m);
        return std::pair{m, s2 / (v.size() - 1.0)};
    };
    const auto [ma, va] = stats(a);
    const auto [mb, vb] = stats(b);
    const double na = a.size(), nb = b.size();
    const double se2 = va / na + vb / nb;
    const double t = (ma - mb) / std::sqrt(se2);
    const double df =
        se2 * se2 / (va * va / (na * na * (na - 1.0)) + vb * vb / (nb * nb * (nb - 1.0)));
    const double at = std::abs(t);
    if (at == 0.0) return 1.0;
    return 1.0 - 2.0 * adaptive(0.0, at, df, simpson(0.0, at, df), 1e-16, 60);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct BenchRowParsed {
    std::string label;
    int repeats = 0, success_ro = 0, success_pfr = 0;
    double dev_ro = 0.0, dev_pfr = 0.0, p = 1.0;
};

std::vector<BenchRowParsed> parse_bench(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    if (line.find("success_rate_RO,success_rate_PFR") == std::string::npos)
        throw std::runtime_error("unexpected benchmark header: " + line);
    std::vector<BenchRowParsed> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        BenchRowParsed r;
        const auto q = line.rfind("\",");
        r.label = line.substr(1, q - 1);
        std::istringstream rest(line.substr(q + 2));
        char c;
        rest >> r.repeats >> c >> r.success_ro >> c >> r.success_pfr >> c >> r.dev_ro >> c >>
            r.dev_pfr >> c >> r.p;
        rows.push_back(std::move(r));
    }
    return rows;
}

} // namespace

int main() {
    const auto config = resolve_config("", "desk", {});

    // --- criterion 1: epsilon-order laws ------------------------------------
    run(1, "epsilon_compare total-preorder laws, 1000 random triples", [](std::string& detail) {
        Rng rng(derive_seed(1, {"acceptance", "order"}));
        auto rnd = [&] {
            return FPhi{uniform(rng, -10.0, 10.0),
                        uniform(rng, 0.0, 1.0) < 0.3 ? 0.0 : uniform(rng, 0.0, 2.0)};
        };
        auto flip = [](Ordering o) {
            return o == Ordering::Less
                       ? Ordering::Greater
                       : (o == Ordering::Greater ? Ordering::Less : Ordering::Equal);
        };
        const double inf = std::numeric_limits<double>::infinity();
        int bad = 0;
        for (int i = 0; i < 1000; ++i) {
            const double eps = uniform(rng, 0.0, 1.0) < 0.2 ? 0.0 : uniform(rng, 0.0, 1.0);
            const FPhi a = rnd(), b = rnd(), c = rnd();
            if (epsilon_compare(a, a, eps) != Ordering::Equal) ++bad;
            if (epsilon_compare(a, b, eps) != flip(epsilon_compare(b, a, eps))) ++bad;
            if (epsilon_compare(a, b, eps) != Ordering::Greater &&
                epsilon_compare(b, c, eps) != Ordering::Greater &&
                epsilon_compare(a, c, eps) == Ordering::Greater)
                ++bad;
            // eps_level = 0: lexicographic (phi, f)
            const auto lex = a.phi < b.phi    ? Ordering::Less
                             : a.phi > b.phi  ? Ordering::Greater
                             : a.f < b.f      ? Ordering::Less
                             : a.f > b.f      ? Ordering::Greater
                                              : Ordering::Equal;
            if (epsilon_compare(a, b, 0.0) != lex) ++bad;
            // eps_level = inf: plain objective comparison
            const auto byf = a.f < b.f   ? Ordering::Less
                             : a.f > b.f ? Ordering::Greater
                                         : Ordering::Equal;
            if (epsilon_compare(a, b, inf) != byf) ++bad;
        }
        detail = std::to_string(bad) + " violations";
        return bad == 0;
    });

    // --- criterion 2: FEN accounting exactness -------------------------------
    run(2, "reported FEN equals wrapped evaluation count, 20 instances x 3 solvers",
        [](std::string& detail) {
            int bad = 0;
            for (std::uint64_t s = 1; s <= 20; ++s) {
                GeneratorSpec spec;
                spec.n_linear = static_cast<int>(s % 3);
                spec.n_quadratic = static_cast<int>(s % 2);
                spec.n_equality = s % 4 == 0 ? 1 : 0;
                const auto inst = random_instance(spec, derive_seed(s, {"acceptance", "fen"}));
                for (auto kind : kAllSolvers) {
                    Evaluator ev(inst, 5000, 1e-4);
                    long counted = 0;
                    ev.on_eval = [&] { ++counted; };
                    const auto res = run_solver(kind, inst, 5000, s, &ev);
                    if (ev.count() != counted) ++bad;
                    if (res.solved ? res.fen != ev.success_fen() : res.fen != 5000) ++bad;
                }
            }
            detail = std::to_string(bad) + " mismatches";
            return bad == 0;
        });

    // --- criterion 3: solver sanity on unconstrained Sphere ------------------
    run(3, "each solver solves Sphere D=5 to 1e-4 in >= 28/30 seeded runs",
        [](std::string& detail) {
            const auto inst = unconstrained_sphere(5);
            bool ok = true;
            for (auto kind : kAllSolvers) {
                int solved = 0;
                for (std::uint64_t s = 1; s <= 30; ++s)
                    if (run_solver(kind, inst, 30000,
                                   derive_seed(s, {"acceptance", "sanity", solver_name(kind)}))
                            .solved)
                        ++solved;
                detail += solver_name(kind) + " " + std::to_string(solved) + "/30 ";
                if (solved < 28) ok = false;
            }
            return ok;
        });

    // --- criterion 4: MLP gradient check -------------------------------------
    run(4, "analytic Jacobian vs central differences, rel err <= 1e-5, 20 pairs",
        [](std::string& detail) {
            double worst = 0.0;
            for (std::uint64_t s = 1; s <= 20; ++s) {
                const int n_in = 3 + static_cast<int>(s % 5);
                auto model = init_model(n_in, derive_seed(s, {"acceptance", "jac"}));
                Rng rng(derive_seed(s, {"acceptance", "jac-in"}));
                Eigen::VectorXd input(n_in);
                for (int i = 0; i < n_in; ++i) input[i] = uniform(rng, -2.0, 2.0);
                const auto analytic = output_jacobian(model, input);
                const double h = 1e-6;
                const auto w0 = model.flatten_weights();
                Eigen::MatrixXd numeric(3, w0.size());
                for (Eigen::Index j = 0; j < w0.size(); ++j) {
                    auto w = w0;
                    w[j] = w0[j] + h;
                    model.set_weights(w);
                    const Eigen::Vector3d plus = forward(model, input);
                    w[j] = w0[j] - h;
                    model.set_weights(w);
                    const Eigen::Vector3d minus = forward(model, input);
                    numeric.col(j) = (plus - minus) / (2.0 * h);
                }
                const double scale = std::max(1.0, numeric.cwiseAbs().maxCoeff());
                worst = std::max(worst, (analytic - numeric).cwiseAbs().maxCoeff() / scale);
            }
            char buf[64];
            std::snprintf(buf, sizeof(buf), "max rel err %.2e", worst);
            detail = buf;
            return worst <= 1e-5;
        });

    // --- criterion 5: LM trainer ----------------------------------------------
    run(5, "LM on 500-sample linear map: held-out RMSE < 0.05, SSE strictly decreasing",
        [](std::string& detail) {
            Rng rng(derive_seed(1, {"acceptance", "lm"}));
            std::vector<TrainingExample> data;
            for (int i = 0; i < 500; ++i) {
                TrainingExample ex;
                ex.input.resize(6);
                for (auto& v : ex.input) v = uniform(rng, -1.0, 1.0);
                ex.target[0] = 0.5 * ex.input[0] - 0.25 * ex.input[1];
                ex.target[1] = -0.3 * ex.input[2] + 0.1;
                ex.target[2] = 0.2 * ex.input[0] + 0.4 * ex.input[3];
                data.push_back(std::move(ex));
            }
            const std::vector<TrainingExample> train(data.begin(), data.begin() + 400);
            const std::vector<TrainingExample> held(data.begin() + 400, data.end());
            TrainConfig cfg;
            cfg.max_epochs = 500;
            cfg.seed = 1;
            TrainTrace trace;
            const auto model = train_lm(train, cfg, &trace);
            bool monotone = true;
            for (std::size_t i = 1; i < trace.train_sse.size(); ++i)
                if (!(trace.train_sse[i] < trace.train_sse[i - 1])) monotone = false;
            double sse = 0.0;
            for (const auto& ex : held) {
                Eigen::VectorXd in = Eigen::Map<const Eigen::VectorXd>(ex.input.data(), 6);
                const Eigen::Vector3d out = forward(model, in);
                for (int k = 0; k < 3; ++k)
                    sse += (out[k] - ex.target[k]) * (out[k] - ex.target[k]);
            }
            const double rmse = std::sqrt(sse / (3.0 * held.size()));
            char buf[96];
            std::snprintf(buf, sizeof(buf), "rmse %.4f, %d epochs, monotone=%s", rmse,
                          model.metadata.epochs, monotone ? "yes" : "no");
            detail = buf;
            return rmse < 0.05 && monotone && model.metadata.epochs <= 500;
        });

    // --- criterion 7: feasibility-ratio oracle --------------------------------
    run(7, "half-box constraint: global MC ratio within 0.01 of 0.5 at 100k samples",
        [](std::string& detail) {
            COPInstance inst;
            inst.id = "halfbox";
            inst.space.dimension = 4;
            inst.space.lower.assign(4, -1.0);
            inst.space.upper.assign(4, 1.0);
            Constraint c;
            c.kind = ConstraintKind::LinearInequality;
            c.quad.assign(4, 0.0);
            c.lin.assign(4, 0.0);
            c.lin[0] = 1.0;
            inst.constraints = {c};
            FeatureSettings settings;
            settings.n_samples = 100000;
            const auto fv =
                extract_features(inst, settings, derive_seed(1, {"acceptance", "halfbox"}));
            char buf[64];
            std::snprintf(buf, sizeof(buf), "ratio %.4f", fv.feasibility_ratio_global);
            detail = buf;
            return std::abs(fv.feasibility_ratio_global - 0.5) <= 0.01;
        });

    // --- criterion 8: t-test oracle equivalence --------------------------------
    run(8, "Welch p matches the integration oracle to 1e-10 on 50 pairs",
        [](std::string& detail) {
            Rng rng(derive_seed(1, {"acceptance", "welch"}));
            double worst = 0.0;
            for (int i = 0; i < 50; ++i) {
                const int na = 3 + static_cast<int>(uniform_index(rng, 20));
                const int nb = 3 + static_cast<int>(uniform_index(rng, 20));
                std::vector<double> a(na), b(nb);
                const double shift = uniform(rng, -2.0, 2.0);
                for (auto& x : a) x = uniform(rng, 0.0, 5.0);
                for (auto& x : b) x = uniform(rng, 0.0, 5.0) + shift;
                worst = std::max(worst, std::abs(welch_t_test(a, b) - oracle_welch(a, b)));
            }
            char buf[64];
            std::snprintf(buf, sizeof(buf), "max |dp| %.2e", worst);
            detail = buf;
            return worst < 1e-10;
        });

    // --- criteria 6, 9, 10: full desk pipeline twice ---------------------------
    const auto dir_a = fs::temp_directory_path() / "copsel_acceptance_a";
    const auto dir_b = fs::temp_directory_path() / "copsel_acceptance_b";
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
    bool pipeline_ok = true;
    std::string pipeline_err;
    {
        const auto t0 = std::chrono::steady_clock::now();
        try {
            run_full_study(config, dir_a.string());
            run_full_study(config, dir_b.string());
        } catch (const std::exception& e) {
            pipeline_ok = false;
            pipeline_err = e.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("-- desk pipeline executed twice in %.1fs%s\n", secs,
                    pipeline_ok ? "" : (" (FAILED: " + pipeline_err + ")").c_str());
    }

    run(6, "evolver fronts pairwise non-dominated; a hard-run member has gap >= 2",
        [&](std::string& detail) {
            if (!pipeline_ok) {
                detail = pipeline_err;
                return false;
            }
            bool nondominated = true;
            double best_gap = 0.0;
            for (const char* label :
                 {"DE-hard", "ES-hard", "PSO-hard", "DE-easy", "ES-easy", "PSO-easy"}) {
                const auto run_ =
                    load_population((dir_a / "populations" / label).string());
                for (const auto& a : run_.population)
                    for (const auto& b : run_.population)
                        if (a.pareto_rank == 1 && b.pareto_rank == 1 &&
                            dominates(a.scores, b.scores, run_.config.target,
                                      run_.config.target_hard))
                            nondominated = false;
                if (run_.config.target_hard)
                    for (const auto& e : run_.population)
                        if (e.pareto_rank == 1) best_gap = std::max(best_gap, e.hardness_gap());
            }
            char buf[96];
            std::snprintf(buf, sizeof(buf), "fronts clean=%s, best hard gap %.2f",
                          nondominated ? "yes" : "no", best_gap);
            detail = buf;
            return nondominated && best_gap >= 2.0;
        });

    run(9, "PFR >= RO success on >= 5/6 labels and lower deviation on >= 5/6",
        [&](std::string& detail) {
            if (!pipeline_ok) {
                detail = pipeline_err;
                return false;
            }
            const auto rows = parse_bench(slurp(dir_a / "benchmark.csv"));
            if (rows.size() != 6) {
                detail = "expected 6 labels, got " + std::to_string(rows.size());
                return false;
            }
            int succ_wins = 0, dev_wins = 0;
            for (const auto& r : rows) {
                if (r.success_pfr >= r.success_ro) ++succ_wins;
                if (r.dev_pfr < r.dev_ro) ++dev_wins;
            }
            detail = "success wins " + std::to_string(succ_wins) + "/6, deviation wins " +
                     std::to_string(dev_wins) + "/6";
            return succ_wins >= 5 && dev_wins >= 5;
        });

    run(10, "two desk pipeline runs with one master seed are byte-identical on csv",
        [&](std::string& detail) {
            if (!pipeline_ok) {
                detail = pipeline_err;
                return false;
            }
            int compared = 0, differing = 0;
            for (const auto& entry : fs::recursive_directory_iterator(dir_a)) {
                if (!entry.is_regular_file() || entry.path().extension() != ".csv") continue;
                const auto rel = fs::relative(entry.path(), dir_a);
                ++compared;
                if (!fs::exists(dir_b / rel) || slurp(entry.path()) != slurp(dir_b / rel))
                    ++differing;
            }
            detail = std::to_string(compared) + " csv files, " + std::to_string(differing) +
                     " differ";
            return compared > 0 && differing == 0;
        });

    fs::remove_all(dir_a);
    fs::remove_all(dir_b);

    if (failures == 0)
        std::printf("all 10 acceptance criteria passed\n");
    else
        std::printf("%d acceptance criteria FAILED\n", failures);
    return failures == 0 ? 0 : 1;
}
