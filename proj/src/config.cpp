#include "aperiod/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "aperiod/error.hpp"
#include "aperiod/noise.hpp"

namespace aperiod {

namespace {

using boost::property_tree::ptree;

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> parts;
    std::size_t begin = 0;
    while (true) {
        const auto end = s.find(sep, begin);
        parts.push_back(trim(s.substr(begin, end == std::string_view::npos ? std::string_view::npos : end - begin)));
        if (end == std::string_view::npos) break;
        begin = end + 1;
    }
    return parts;
}

const std::map<std::string, std::set<std::string>>& known_keys() {
    static const std::map<std::string, std::set<std::string>> keys{
        {"model",
         {"dim_state", "dim_noise", "spectrum", "q", "drift_base", "drift_gain", "drift_modes", "diffusion_base",
          "diffusion_gain", "diffusion_modes"}},
        {"grid", {"dt", "burn_in", "eval_start", "eval_end", "eval_step"}},
        {"ensemble", {"n_paths", "seed"}},
        {"solver", {"tol", "max_iter"}},
        {"scan", {"tau_start", "tau_end", "tau_step", "epsilon", "l_max", "p"}},
        {"distribution",
         {"tuple_offsets", "appd_start", "appd_end", "modulus_window", "deltas", "tightness_eps", "ui_p",
          "ui_thresholds", "n_exact"}},
        {"ursell",
         {"n_max", "eps", "dt", "t_start", "t_end", "n_paths", "csv_paths", "delta", "n_omega", "tau", "coupled_max",
          "not_appd_min"}},
        {"output", {"dir", "verbosity"}},
    };
    return keys;
}

class Reader {
public:
    explicit Reader(const std::string& text) {
        std::istringstream in(text);
        try {
            boost::property_tree::ini_parser::read_ini(in, tree_);
        } catch (const boost::property_tree::ini_parser_error& e) {
            throw InputError("config line " + std::to_string(e.line()) + ": " + e.message());
        }
        index_lines(text);
        for (const auto& [section, body] : tree_) {
            const auto known = known_keys().find(section);
            if (known == known_keys().end() || body.data().size() > 0) {
                throw InputError("config: unknown section [" + section + "]" + at(section, ""));
            }
            for (const auto& [key, value] : body) {
                if (!known->second.count(key)) throw InputError("config: unknown key " + field(section, key) + at(section, key));
            }
        }
    }

    bool has_section(const std::string& section) const { return tree_.find(section) != tree_.not_found(); }

    std::optional<std::string> raw(const std::string& section, const std::string& key) const {
        const auto value = tree_.get_optional<std::string>(ptree::path_type(section + "." + key, '.'));
        if (!value) return std::nullopt;
        return trim(*value);
    }

    [[noreturn]] void fail(const std::string& section, const std::string& key, const std::string& message) const {
        throw InputError("config: " + field(section, key) + ": " + message + at(section, key));
    }

    double number(const std::string& section, const std::string& key, const std::string& text) const {
        double value = 0.0;
        const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (ec != std::errc() || end != text.data() + text.size() || !std::isfinite(value)) {
            fail(section, key, "'" + text + "' is not a finite decimal number");
        }
        return value;
    }

    void read(const std::string& section, const std::string& key, double& out) const {
        if (auto text = raw(section, key)) out = number(section, key, *text);
    }
    void read(const std::string& section, const std::string& key, std::optional<double>& out) const {
        if (auto text = raw(section, key)) out = number(section, key, *text);
    }
    void read(const std::string& section, const std::string& key, std::string& out) const {
        if (auto text = raw(section, key)) out = *text;
    }
    template <class Int>
    void read_integer(const std::string& section, const std::string& key, Int& out) const {
        auto text = raw(section, key);
        if (!text) return;
        Int value{};
        const auto [end, ec] = std::from_chars(text->data(), text->data() + text->size(), value);
        if (ec != std::errc() || end != text->data() + text->size()) {
            fail(section, key, "'" + *text + "' is not a nonnegative integer");
        }
        out = value;
    }
    std::vector<double> list(const std::string& section, const std::string& key, const std::string& text) const {
        std::vector<double> values;
        if (text.empty()) return values;
        for (const auto& part : split(text, ',')) values.push_back(number(section, key, part));
        return values;
    }
    void read(const std::string& section, const std::string& key, std::vector<double>& out) const {
        if (auto text = raw(section, key)) out = list(section, key, *text);
    }

private:
    static std::string field(const std::string& section, const std::string& key) {
        return "[" + section + "] " + key;
    }

    std::string at(const std::string& section, const std::string& key) const {
        const auto it = lines_.find(section + "\n" + key);
        return it == lines_.end() ? std::string() : " (line " + std::to_string(it->second) + ")";
    }

    void index_lines(const std::string& text) {
        std::istringstream in(text);
        std::string line;
        std::string section;
        for (std::size_t number = 1; std::getline(in, line); ++number) {
            const std::string t = trim(line);
            if (t.empty() || t[0] == ';' || t[0] == '#') continue;
            if (t.front() == '[' && t.back() == ']') {
                section = trim(std::string_view(t).substr(1, t.size() - 2));
                lines_.emplace(section + "\n", number);
            } else if (const auto eq = t.find('='); eq != std::string::npos) {
                lines_.emplace(section + "\n" + trim(std::string_view(t).substr(0, eq)), number);
            }
        }
    }

    ptree tree_;
    std::map<std::string, std::size_t> lines_;
};

ModelSpec read_model(const Reader& r) {
    const std::string s = "model";
    ModelSpec m;
    r.read(s, "spectrum", m.spectrum);
    r.read(s, "q", m.q_eigenvalues);
    if (m.spectrum.empty()) r.fail(s, "spectrum", "required");
    if (m.q_eigenvalues.empty()) r.fail(s, "q", "required");
    m.dim_state = m.spectrum.size();
    m.dim_noise = m.q_eigenvalues.size();
    std::size_t dim_state = m.dim_state, dim_noise = m.dim_noise;
    r.read_integer(s, "dim_state", dim_state);
    r.read_integer(s, "dim_noise", dim_noise);
    if (dim_state != m.dim_state) r.fail(s, "dim_state", "does not match the length of spectrum");
    if (dim_noise != m.dim_noise) r.fail(s, "dim_noise", "does not match the length of q");

    m.drift.base.assign(m.dim_state, 0.0);
    r.read(s, "drift_base", m.drift.base);
    if (m.drift.base.size() != m.dim_state) r.fail(s, "drift_base", "needs dim_state entries");
    r.read(s, "drift_gain", m.drift.nonlinearity_gain);
    if (auto text = r.raw(s, "drift_modes"); text && !text->empty()) {
        for (const auto& entry : split(*text, ';')) {
            const auto parts = split(entry, '|');
            if (parts.size() != 3) r.fail(s, "drift_modes", "each mode needs 'amplitudes | frequency | phase'");
            ForcingMode mode;
            mode.amplitude = r.list(s, "drift_modes", parts[0]);
            if (mode.amplitude.size() != m.dim_state) r.fail(s, "drift_modes", "amplitude needs dim_state entries");
            mode.frequency = r.number(s, "drift_modes", parts[1]);
            mode.phase = r.number(s, "drift_modes", parts[2]);
            m.drift.modes.push_back(std::move(mode));
        }
    }

    m.diffusion.base_sigma.assign(m.dim_noise, 0.0);
    r.read(s, "diffusion_base", m.diffusion.base_sigma);
    if (m.diffusion.base_sigma.size() != m.dim_noise) r.fail(s, "diffusion_base", "needs dim_noise entries");
    r.read(s, "diffusion_gain", m.diffusion.state_gain);
    if (auto text = r.raw(s, "diffusion_modes"); text && !text->empty()) {
        for (const auto& entry : split(*text, ';')) {
            const auto parts = split(entry, '|');
            if (parts.size() != 3) r.fail(s, "diffusion_modes", "each mode needs 'amplitude | frequency | phase'");
            m.diffusion.modes.push_back({r.number(s, "diffusion_modes", parts[0]),
                                         r.number(s, "diffusion_modes", parts[1]),
                                         r.number(s, "diffusion_modes", parts[2])});
        }
    }
    try {
        m.validate();
    } catch (const InputError& e) {
        throw InputError(std::string("config: [model] ") + e.what());
    }
    return m;
}

void require(bool ok, const std::string& message) {
    if (!ok) throw InputError("config: " + message);
}

bool on_grid(double length, double dt) {
    try {
        steps_of(length, dt);
        return true;
    } catch (const InputError&) {
        return false;
    }
}

}  // namespace

void RunConfig::validate() const {
    require(grid.dt > 0.0, "[grid] dt must be positive");
    require(grid.eval_end >= grid.eval_start, "[grid] eval_end precedes eval_start");
    require(on_grid(grid.eval_end - grid.eval_start, grid.dt), "[grid] eval window length is not a multiple of dt");
    if (grid.burn_in) require(*grid.burn_in >= 0.0, "[grid] burn_in must be nonnegative");
    if (grid.eval_step) {
        require(*grid.eval_step > 0.0 && on_grid(*grid.eval_step, grid.dt), "[grid] eval_step must be a positive multiple of dt");
    }
    require(ensemble.n_paths > 0, "[ensemble] n_paths must be positive");
    require(solver.tol > 0.0, "[solver] tol must be positive");
    require(solver.max_iter > 0, "[solver] max_iter must be positive");

    require(scan.tau_end >= scan.tau_start, "[scan] empty tau range (tau_end < tau_start)");
    require(on_grid(scan.tau_start, grid.dt), "[scan] tau_start is not a multiple of dt");
    require(on_grid(scan.tau_end - scan.tau_start, grid.dt), "[scan] tau range is not a multiple of dt");
    if (scan.tau_step) {
        require(*scan.tau_step > 0.0 && on_grid(*scan.tau_step, grid.dt), "[scan] tau_step must be a positive multiple of dt");
    }
    for (double eps : scan.epsilons) require(eps >= 0.0, "[scan] epsilon must be nonnegative");
    require(scan.l_max > 0.0, "[scan] l_max must be positive");
    require(scan.p >= 1.0, "[scan] p must be at least 1");

    require(!distribution.tuple_offsets.empty(), "[distribution] tuple_offsets is empty");
    for (double offset : distribution.tuple_offsets) {
        require(offset >= 0.0 && on_grid(offset, grid.dt), "[distribution] tuple offsets must be nonnegative multiples of dt");
    }
    require(distribution.modulus_window >= 0.0 && on_grid(distribution.modulus_window, grid.dt),
            "[distribution] modulus_window must be a nonnegative multiple of dt");
    for (double delta : distribution.deltas) require(delta >= grid.dt, "[distribution] deltas must be at least dt");
    require(distribution.tightness_eps >= 0.0 && distribution.tightness_eps < 1.0, "[distribution] tightness_eps must lie in [0, 1)");
    require(distribution.ui_p >= 1.0, "[distribution] ui_p must be at least 1");
    require(distribution.n_exact > 0, "[distribution] n_exact must be positive");
    const double appd_start = distribution.appd_start.value_or(grid.eval_start);
    const double appd_end = distribution.appd_end.value_or(grid.eval_end);
    require(appd_start >= grid.eval_start && appd_end <= grid.eval_end && appd_end >= appd_start,
            "[distribution] appd window must lie inside the eval window");

    require(ursell.n_paths > 0 && ursell.n_omega > 0, "[ursell] n_paths and n_omega must be positive");
    require(ursell.csv_paths <= ursell.n_paths, "[ursell] csv_paths exceeds n_paths");
    require(ursell.delta > 0.0, "[ursell] delta must be positive");
    require(output.verbosity == "normal" || output.verbosity == "full", "[output] verbosity must be normal or full");
}

RunConfig parse_config(const std::string& text) {
    const Reader r(text);
    RunConfig c;
    if (r.has_section("model")) c.model = read_model(r);

    r.read("grid", "dt", c.grid.dt);
    r.read("grid", "burn_in", c.grid.burn_in);
    r.read("grid", "eval_start", c.grid.eval_start);
    r.read("grid", "eval_end", c.grid.eval_end);
    r.read("grid", "eval_step", c.grid.eval_step);

    r.read_integer("ensemble", "n_paths", c.ensemble.n_paths);
    r.read_integer("ensemble", "seed", c.ensemble.seed);

    r.read("solver", "tol", c.solver.tol);
    r.read_integer("solver", "max_iter", c.solver.max_iter);

    r.read("scan", "tau_start", c.scan.tau_start);
    r.read("scan", "tau_end", c.scan.tau_end);
    r.read("scan", "tau_step", c.scan.tau_step);
    if (auto text = r.raw("scan", "epsilon"); text && *text != "auto") c.scan.epsilons = r.list("scan", "epsilon", *text);
    r.read("scan", "l_max", c.scan.l_max);
    r.read("scan", "p", c.scan.p);

    auto& d = c.distribution;
    r.read("distribution", "tuple_offsets", d.tuple_offsets);
    r.read("distribution", "appd_start", d.appd_start);
    r.read("distribution", "appd_end", d.appd_end);
    r.read("distribution", "modulus_window", d.modulus_window);
    r.read("distribution", "deltas", d.deltas);
    r.read("distribution", "tightness_eps", d.tightness_eps);
    r.read("distribution", "ui_p", d.ui_p);
    r.read("distribution", "ui_thresholds", d.ui_thresholds);
    r.read_integer("distribution", "n_exact", d.n_exact);

    auto& u = c.ursell;
    r.read_integer("ursell", "n_max", u.n_max);
    r.read("ursell", "eps", u.eps);
    r.read("ursell", "dt", u.dt);
    r.read("ursell", "t_start", u.t_start);
    r.read("ursell", "t_end", u.t_end);
    r.read_integer("ursell", "n_paths", u.n_paths);
    r.read_integer("ursell", "csv_paths", u.csv_paths);
    r.read("ursell", "delta", u.delta);
    r.read_integer("ursell", "n_omega", u.n_omega);
    r.read("ursell", "tau", u.tau);
    r.read("ursell", "coupled_max", u.coupled_max);
    r.read("ursell", "not_appd_min", u.not_appd_min);

    r.read("output", "dir", c.output.dir);
    r.read("output", "verbosity", c.output.verbosity);

    c.validate();
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("config: cannot read " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

}  // namespace aperiod
