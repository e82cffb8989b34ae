#include "aperiod/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "aperiod/ap_analysis.hpp"
#include "aperiod/counterexamples.hpp"
#include "aperiod/error.hpp"
#include "aperiod/format.hpp"
#include "aperiod/metrics.hpp"

namespace aperiod {

namespace {

// Staged output; nothing touches the file system until flush().
class OutputFiles {
public:
    explicit OutputFiles(std::filesystem::path dir) : dir_(std::move(dir)) {}

    std::ostringstream& open(const std::string& name) { return files_[name]; }

    void flush() const {
        std::filesystem::create_directories(dir_);
        for (const auto& [name, content] : files_) {
            std::ofstream out(dir_ / name, std::ios::binary | std::ios::trunc);
            out << content.str();
            if (!out) throw std::runtime_error("cannot write " + (dir_ / name).string());
        }
    }

private:
    std::filesystem::path dir_;
    std::map<std::string, std::ostringstream> files_;
};

std::string short_number(double value) {
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.6g", value);
    return buffer;
}

const ModelSpec& require_model(const RunConfig& config) {
    if (!config.model) throw InputError("config: missing [model] section");
    return *config.model;
}

SolverOptions solver_options(const CommandContext& ctx) {
    SolverOptions options = ctx.config.solver;
    options.threads = ctx.threads;
    return options;
}

std::vector<double> arithmetic(double start, double end, double step) {
    const std::int64_t count = steps_of(end - start, step);
    std::vector<double> values;
    for (std::int64_t i = 0; i <= count; ++i) values.push_back(start + static_cast<double>(i) * step);
    return values;
}

// The simulated window: burn-in, then the eval window, then `tail` more time units.
struct Layout {
    TimeGrid grid;
    std::vector<double> eval_times;
    std::size_t eval_stride = 1;  // eval_step in nodes
};

Layout make_layout(const RunConfig& config, const HypothesisReport& hypotheses, double tail) {
    const GridConfig& g = config.grid;
    const double burn_in = g.burn_in.value_or(default_burn_in(hypotheses, config.solver.tol));
    const auto burn_steps = static_cast<std::int64_t>(std::ceil(burn_in / g.dt - 1e-9));
    const std::int64_t eval_steps = steps_of(g.eval_end - g.eval_start, g.dt);
    const auto tail_steps = static_cast<std::int64_t>(std::ceil(std::max(tail, 0.0) / g.dt - 1e-9));
    Layout layout;
    layout.grid.t_start = g.eval_start - static_cast<double>(burn_steps) * g.dt;
    layout.grid.dt = g.dt;
    layout.grid.n_steps = static_cast<std::size_t>(std::max<std::int64_t>(burn_steps + eval_steps + tail_steps, 1));
    const double step = g.eval_step.value_or(g.dt);
    layout.eval_stride = static_cast<std::size_t>(steps_of(step, g.dt));
    for (std::int64_t i = 0; i <= eval_steps; i += static_cast<std::int64_t>(layout.eval_stride)) {
        layout.eval_times.push_back(g.eval_start + static_cast<double>(i) * g.dt);
    }
    return layout;
}

NoiseEnsemble make_noise(const CommandContext& ctx, const ModelSpec& model, const TimeGrid& grid) {
    return sample_ensemble(grid, model.q_eigenvalues, ctx.config.ensemble.n_paths, ctx.config.ensemble.seed,
                           ctx.threads);
}

std::string hypotheses_text(const HypothesisReport& h) {
    std::ostringstream out;
    out << "delta=" << format_number(h.delta) << '\n'
        << "lipschitz=" << format_number(h.lipschitz) << '\n'
        << "growth=" << format_number(h.growth) << '\n'
        << "kappa=" << format_number(h.kappa) << '\n'
        << "contraction_ok=" << (h.contraction_ok ? "true" : "false") << '\n';
    return out.str();
}

std::string verdict_line(const HypothesisReport& h) {
    if (h.contraction_ok) return "kappa=" + short_number(h.kappa) + " OK";
    return "kappa=" + short_number(h.kappa) + " REFUSED: contraction requires 2 l^2 (1 + 1/(2 delta)) < 1";
}

// Copy of the nodes [first, first + count) of every path.
PathEnsemble slice_nodes(const PathEnsemble& x, std::size_t first, std::size_t count) {
    TimeGrid grid{x.grid.time(first), x.grid.dt, count - 1};
    PathEnsemble out = PathEnsemble::zeros(grid, x.n_paths, x.dim, x.noise_id);
    for (std::size_t p = 0; p < x.n_paths; ++p) {
        for (std::size_t k = 0; k < count; ++k) std::ranges::copy(x.state(p, first + k), out.state(p, k).begin());
    }
    return out;
}

}  // namespace

int cmd_check(const CommandContext& ctx, std::ostream& log) {
    const HypothesisReport h = check_hypotheses(require_model(ctx.config));
    OutputFiles files(ctx.out_dir);
    files.open("check.txt") << hypotheses_text(h) << verdict_line(h) << '\n';
    if (!ctx.out_dir.empty()) files.flush();
    log << hypotheses_text(h) << verdict_line(h) << '\n';
    return h.contraction_ok ? 0 : 1;
}

int cmd_solve(const CommandContext& ctx, std::ostream& log) {
    const ModelSpec& model = require_model(ctx.config);
    const HypothesisReport h = check_hypotheses(model);
    if (!h.contraction_ok) throw SolverRefused(verdict_line(h), h.kappa);
    const Layout layout = make_layout(ctx.config, h, 0.0);
    const NoiseEnsemble noise = make_noise(ctx, model, layout.grid);
    const SolveResult result = solve_bounded(model, noise, solver_options(ctx));

    const std::size_t first = node_index(layout.grid, ctx.config.grid.eval_start);
    const std::size_t last = node_index(layout.grid, ctx.config.grid.eval_end);
    OutputFiles files(ctx.out_dir);
    write_path_csv(files.open("solution.csv"), slice_nodes(result.solution, first, last - first + 1));
    files.open("convergence.txt") << result.report.to_text() << "burn_in=" << format_number(ctx.config.grid.eval_start - layout.grid.t_start)
                                  << '\n'
                                  << "burn_in_error=" << format_number(burn_in_bound(h, sup_l2_norm(result.solution, ctx.threads), ctx.config.grid.eval_start - layout.grid.t_start))
                                  << '\n';
    files.flush();
    log << "iterations=" << result.report.iterations << " converged=" << (result.report.converged ? "true" : "false")
        << '\n';
    return result.report.converged ? 0 : 1;
}

int cmd_scan(const CommandContext& ctx, std::ostream& log) {
    const RunConfig& c = ctx.config;
    const ModelSpec& model = require_model(c);
    const HypothesisReport h = check_hypotheses(model);
    if (!h.contraction_ok) throw SolverRefused(verdict_line(h), h.kappa);
    const Layout layout = make_layout(c, h, 0.0);
    const CoupledShiftAnalyzer analyzer(model, make_noise(ctx, model, layout.grid), layout.eval_times,
                                        solver_options(ctx));

    DistanceCurve curve;
    std::ostringstream csv;
    csv << "tau,coupled_d0,pmean,monte_carlo\n";
    double monte_carlo = 0.0;
    for (double tau : arithmetic(c.scan.tau_start, c.scan.tau_end, c.scan.tau_step.value_or(c.grid.dt))) {
        const ShiftMeasurement m = analyzer.measure(tau, c.scan.p);
        curve.tau.push_back(tau);
        curve.value.push_back(m.d0);
        monte_carlo = std::max(monte_carlo, m.monte_carlo);
        csv << format_number(tau) << ',' << format_number(m.d0) << ',' << format_number(m.pmean) << ','
            << format_number(m.monte_carlo) << '\n';
    }
    ErrorBudget budget = analyzer.budget();
    budget.monte_carlo = monte_carlo;
    std::vector<double> epsilons = c.scan.epsilons;
    if (epsilons.empty()) epsilons.push_back(2.0 * budget.total());

    std::ostringstream report;
    report << hypotheses_text(h) << budget.to_text();
    bool all_dense = true;
    for (double eps : epsilons) {
        const AlmostPeriodReport r = scan_almost_periods(curve, eps, c.scan.l_max);
        all_dense = all_dense && r.relatively_dense;
        report << '\n' << r.to_text();
        log << "epsilon=" << short_number(eps) << " accepted=" << r.accepted.size() << '/' << curve.tau.size()
            << " max_gap=" << short_number(r.max_gap) << (r.relatively_dense ? " dense" : " not-dense") << '\n';
    }
    OutputFiles files(ctx.out_dir);
    files.open("scan.csv") << csv.str();
    files.open("report.txt") << report.str();
    files.flush();
    return all_dense ? 0 : 1;
}

int cmd_distribution(const CommandContext& ctx, std::ostream& log) {
    const RunConfig& c = ctx.config;
    const DistributionConfig& d = c.distribution;
    const ModelSpec& model = require_model(c);
    const HypothesisReport h = check_hypotheses(model);
    if (!h.contraction_ok) throw SolverRefused(verdict_line(h), h.kappa);

    const std::vector<double> taus = arithmetic(c.scan.tau_start, c.scan.tau_end, c.scan.tau_step.value_or(c.grid.dt));
    const double max_offset = *std::max_element(d.tuple_offsets.begin(), d.tuple_offsets.end());
    const double reach = std::max({max_offset, d.modulus_window, 0.0});
    const Layout layout = make_layout(c, h, std::max(c.scan.tau_end, 0.0) + reach);
    const CoupledShiftAnalyzer analyzer(model, make_noise(ctx, model, layout.grid), layout.eval_times,
                                        solver_options(ctx));
    const PathEnsemble& ensemble = analyzer.base().solution;
    const TransportOptions transport{d.n_exact, c.ensemble.seed, ctx.threads};

    const double appd_start = d.appd_start.value_or(c.grid.eval_start);
    const double appd_end = d.appd_end.value_or(c.grid.eval_end);
    std::map<DistributionMode, DistributionalReport> reports;
    for (DistributionMode mode : {DistributionMode::apod, DistributionMode::apfd, DistributionMode::appd}) {
        reports[mode].mode = mode;
        reports[mode].tau = taus;
    }
    for (double tau : taus) {
        double apod = 0.0, apfd = 0.0;
        for (double t : layout.eval_times) {
            apod = std::max(apod, apod_distance(ensemble, t, tau, transport));
            std::vector<double> tuple;
            for (double offset : d.tuple_offsets) tuple.push_back(t + offset);
            apfd = std::max(apfd, apfd_distance(ensemble, tuple, tau, transport));
        }
        reports[DistributionMode::apod].value.push_back(apod);
        reports[DistributionMode::apfd].value.push_back(apfd);
        reports[DistributionMode::appd].value.push_back(appd_distance(ensemble, appd_start, appd_end, tau, transport));
    }

    // Noise levels of the three estimators over the same eval times as the values.
    const std::size_t first = node_index(ensemble.grid, c.grid.eval_start);
    const std::size_t appd_first = node_index(ensemble.grid, appd_start);
    const std::size_t appd_count = node_index(ensemble.grid, appd_end) - appd_first + 1;
    std::vector<EmpiricalLaw> marginals, joints;
    for (double t : layout.eval_times) {
        std::vector<std::size_t> tuple_nodes;
        for (double offset : d.tuple_offsets) tuple_nodes.push_back(node_index(ensemble.grid, t + offset));
        marginals.push_back(marginal_law(ensemble, node_index(ensemble.grid, t)));
        joints.push_back(joint_law(ensemble, tuple_nodes));
    }
    const std::vector<EmpiricalLaw> paths{path_law(ensemble, appd_first, appd_count)};
    const std::map<DistributionMode, double> floors{
        {DistributionMode::apod, transport_noise_level(marginals, transport)},
        {DistributionMode::apfd, transport_noise_level(joints, transport)},
        {DistributionMode::appd, transport_noise_level(paths, transport)},
    };
    const ErrorBudget budget = analyzer.budget();

    const NodeRange range{first, node_index(ensemble.grid, c.grid.eval_end), layout.eval_stride};
    std::ostringstream tightness;
    tightness << "delta,modulus\n";
    for (double delta : d.deltas) {
        tightness << format_number(delta) << ',' << format_number(modulus_tightness(ensemble, 0.0, d.modulus_window, delta, range))
                  << '\n';
    }
    std::ostringstream ui;
    ui << "threshold,tail_moment\n";
    const std::vector<double> tails = uniform_integrability_check(ensemble, d.ui_p, d.ui_thresholds, range);
    for (std::size_t i = 0; i < tails.size(); ++i) ui << format_number(d.ui_thresholds[i]) << ',' << format_number(tails[i]) << '\n';

    OutputFiles files(ctx.out_dir);
    std::ostringstream& report = files.open("report.txt");
    report << hypotheses_text(h) << budget.to_text();
    report << "tightness_radius=" << format_number(tightness_check(ensemble, d.tightness_eps, range))
           << " (epsilon=" << format_number(d.tightness_eps) << ")\n";
    bool all_dense = true;
    const std::map<DistributionMode, std::string> names{
        {DistributionMode::apod, "apod"}, {DistributionMode::apfd, "apfd"}, {DistributionMode::appd, "appd"}};
    for (const auto& [mode, r] : reports) {
        const std::string& name = names.at(mode);
        const double tolerance = budget.total() + floors.at(mode);
        const AlmostPeriodReport dense = scan_almost_periods({r.tau, r.value}, tolerance, c.scan.l_max);
        all_dense = all_dense && dense.relatively_dense;
        std::ostringstream& csv = files.open(name + ".csv");
        csv << "tau," << name << '\n';
        for (std::size_t i = 0; i < r.tau.size(); ++i) csv << format_number(r.tau[i]) << ',' << format_number(r.value[i]) << '\n';
        report << '\n'
               << "family=" << to_string(mode) << '\n'
               << "noise_level=" << format_number(floors.at(mode)) << '\n'
               << "tolerance=" << format_number(tolerance) << '\n'
               << "max_value=" << format_number(*std::max_element(r.value.begin(), r.value.end())) << '\n'
               << "acceptance=" << format_number(r.acceptance(tolerance)) << '\n'
               << dense.to_text();
        log << name << ": acceptance=" << short_number(r.acceptance(tolerance)) << " tolerance=" << short_number(tolerance)
            << '\n';
    }
    files.open("tightness.csv") << tightness.str();
    files.open("ui.csv") << ui.str();
    files.flush();
    return all_dense ? 0 : 1;
}

int cmd_counterexample(const CommandContext& ctx, std::ostream& log) {
    const UrsellConfig& u = ctx.config.ursell;
    UrsellSpec spec = u.eps.empty() ? UrsellSpec::geometric(u.n_max) : UrsellSpec{u.eps, u.n_max};
    const double n = static_cast<double>(u.n_max);
    const double t_end = u.t_end.value_or(std::max(n * (2.0 * n + 1.0) + 1.0, u.t_start + 1.0));
    const double dt = u.dt.value_or(u.n_max == 0 ? 0.25 : spec.eps.at(u.n_max - 1) / 4.0);
    if (!(dt > 0.0)) throw InputError("config: [ursell] dt must be positive");
    if (!(t_end > u.t_start)) throw InputError("config: [ursell] t_end must exceed t_start");
    const TimeGrid grid{u.t_start, dt, static_cast<std::size_t>(steps_of(t_end - u.t_start, dt))};
    spec.validate(grid.t_start, grid.t_end() + 1.0);
    spec.validate_grid(grid);

    const std::vector<double> omegas = stratified_omegas(u.n_paths, ctx.config.ensemble.seed);
    std::vector<double> csv_omegas;
    for (std::size_t i = 0; i < u.csv_paths; ++i) csv_omegas.push_back(omegas[i * u.n_paths / u.csv_paths]);
    const PathEnsemble sample = ursell_ensemble(spec, grid, csv_omegas, ctx.threads);

    const double tau = u.tau.value_or(common_near_period(spec));
    const double coupled = ursell_coupled_distance(spec, grid, tau, omegas);
    double stepanov = 0.0;
    for (std::size_t k = 0; k < grid.n_nodes(); ++k) stepanov = std::max(stepanov, stepanov_distance(spec, grid.time(k), tau, u.n_omega));
    const double not_appd = verify_not_appd(spec, grid, u.delta, u.n_omega);
    const bool coupled_ok = std::max(coupled, stepanov) <= u.coupled_max;
    const bool not_appd_ok = not_appd >= u.not_appd_min;

    OutputFiles files(ctx.out_dir);
    write_path_csv(files.open("ursell.csv"), sample);
    std::ostringstream verdict;
    verdict << "coupled_distance=" << format_number(coupled) << " stepanov_distance=" << format_number(stepanov)
            << " tau=" << format_number(tau) << " limit=" << format_number(u.coupled_max) << (coupled_ok ? " pass" : " fail")
            << '\n'
            << "not_appd=" << format_number(not_appd) << " delta=" << format_number(u.delta)
            << " limit=" << format_number(u.not_appd_min) << (not_appd_ok ? " pass" : " fail") << '\n';
    files.open("verdict.txt") << verdict.str();
    files.flush();
    log << verdict.str();
    return coupled_ok && not_appd_ok ? 0 : 1;
}

int run_command(const std::string& name, const CommandContext& ctx, std::ostream& log, std::ostream& err) {
    static const std::map<std::string, int (*)(const CommandContext&, std::ostream&)> commands{
        {"check", cmd_check},
        {"solve", cmd_solve},
        {"scan", cmd_scan},
        {"distribution", cmd_distribution},
        {"counterexample", cmd_counterexample},
    };
    const auto it = commands.find(name);
    if (it == commands.end()) {
        err << "error: unknown command '" << name << "'\n";
        return 2;
    }
    try {
        return it->second(ctx, log);
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const SolverRefused& e) {
        err << "refused: " << e.what() << '\n';
        return 1;
    } catch (const DivergenceError& e) {
        err << "diverged: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace aperiod
