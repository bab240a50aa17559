#include "saddleflow/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "saddleflow/errors.hpp"
#include "saddleflow/experiments.hpp"
#include "saddleflow/output.hpp"

namespace saddleflow {

namespace {

constexpr int exit_ok = 0;
constexpr int exit_condition_failure = 1;
constexpr int exit_usage = 2;
constexpr int exit_numerical = 3;

[[noreturn]] void usage_error(const std::string& message) {
    throw CLI::ValidationError(message);
}

double parse_number(const std::string& text, const std::string& what) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(text, &pos);
        if (pos != text.size()) usage_error(what + ": trailing characters in '" + text + "'");
        return v;
    } catch (const std::invalid_argument&) {
        usage_error(what + ": cannot parse number '" + text + "'");
    } catch (const std::out_of_range&) {
        usage_error(what + ": number out of range '" + text + "'");
    }
}

std::vector<double> parse_vector(const std::string& text, const std::string& what) {
    std::vector<double> out;
    std::istringstream is(text);
    std::string field;
    while (std::getline(is, field, ',')) out.push_back(parse_number(field, what));
    if (out.empty()) usage_error(what + ": empty vector");
    return out;
}

// Schedule mini-grammar: power:<coef>[,<exp>], case2:<p>, const:<v>, zero.
// The long tags from the config schema (power_damping:..., etc.) are
// accepted as synonyms.
struct ScheduleSpec {
    std::string tag;
    std::vector<double> args;
};

ScheduleSpec parse_schedule_spec(const std::string& text) {
    ScheduleSpec spec;
    const auto colon = text.find(':');
    spec.tag = text.substr(0, colon);
    if (colon != std::string::npos)
        spec.args = parse_vector(text.substr(colon + 1), "schedule '" + text + "'");
    return spec;
}

ScheduleFamily parse_damping(const std::string& text) {
    const ScheduleSpec s = parse_schedule_spec(text);
    if ((s.tag == "power" || s.tag == "power_damping") && s.args.size() == 1)
        return ScheduleFamily::power_damping(s.args[0]);
    if ((s.tag == "case2" || s.tag == "case2_damping") && s.args.size() == 1)
        return ScheduleFamily::case2_damping(s.args[0]);
    usage_error("--alpha: expected power:<a> or case2:<a>, got '" + text + "'");
}

ScheduleFamily parse_scaling(const std::string& text) {
    const ScheduleSpec s = parse_schedule_spec(text);
    if ((s.tag == "power" || s.tag == "power_scaling") && s.args.size() == 1)
        return ScheduleFamily::power_scaling(s.args[0]);
    if ((s.tag == "const" || s.tag == "constant" || s.tag == "constant_scaling") &&
        s.args.size() == 1)
        return ScheduleFamily::constant_scaling(s.args[0]);
    usage_error("--beta: expected power:<b> or const:<v>, got '" + text + "'");
}

ScheduleFamily parse_tikhonov(const std::string& text) {
    const ScheduleSpec s = parse_schedule_spec(text);
    if (s.tag == "zero" && s.args.empty()) return ScheduleFamily::zero_tikhonov();
    if ((s.tag == "power" || s.tag == "power_tikhonov") &&
        (s.args.size() == 1 || s.args.size() == 2))
        return ScheduleFamily::power_tikhonov(s.args[0], s.args.size() == 2 ? s.args[1] : 1.0);
    if ((s.tag == "case2" || s.tag == "case2_tikhonov") && s.args.size() == 1)
        return ScheduleFamily::case2_tikhonov(s.args[0]);
    usage_error("--eps: expected power:<c>[,<r>], case2:<b> or zero, got '" + text + "'");
}

SystemVariant parse_variant(const std::string& text) {
    if (text == "han") return SystemVariant::han();
    if (text == "han_notikhonov" || text == "mpdd-eps0" || text == "han-notikhonov")
        return SystemVariant::han_no_tikhonov();
    if (text == "mpdd") return SystemVariant::mpdd();
    if (text.rfind("apdd:", 0) == 0)
        return SystemVariant::apdd(parse_number(text.substr(5), "--variant apdd"));
    usage_error("--variant: expected han, han_notikhonov, mpdd or apdd:<alpha>, got '" + text +
                "'");
}

const char* config_schema =
    "Config file: one 'key = value' pair per line, '#' starts a comment.\n"
    "Inline flags override file values. Keys:\n"
    "  problem   toy | regression\n"
    "  mc nc jc kc        toy coefficients (numbers)\n"
    "  dims      <m>x<n>  regression dimensions\n"
    "  kappa sigma_max omega a   regression parameters\n"
    "  variant   han | han_notikhonov | mpdd | apdd:<alpha>\n"
    "  alpha     power:<a> | case2:<a>          damping coefficient\n"
    "  beta      power:<b> | const:<v>          time scaling\n"
    "  eps       power:<c>[,<r>] | case2:<b> | zero   Tikhonov coefficient\n"
    "  theta     extrapolation constant (> 0)\n"
    "  t0 t_end  time span\n"
    "  samples   log-spaced sample count (>= 2)\n"
    "  seed      64-bit unsigned\n"
    "  rtol atol h_init h_min h_max max_steps   integrator controls\n"
    "  x0 y0 xdot0 ydot0   comma-separated start vectors (default zeros)\n"
    "  init      zeros  (named start rule)\n"
    "  numeric_ref  true | false   derive a gap reference for problems\n"
    "                              without a stored saddle\n"
    "  out       CSV output path\n"
    "  json      JSON output path\n"
    "  deterministic  true | false  (drop timestamp/wall-time header lines)\n";

std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) usage_error("cannot open config file '" + path + "'");
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!key.empty()) kv[key] = value;
    }
    return kv;
}

bool parse_bool(const std::string& text, const std::string& what) {
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    usage_error(what + ": expected true/false, got '" + text + "'");
}

/// Collected raw options for the run/compare commands; applied on top of a
/// preset (or the built-in defaults) in file-then-flags order.
struct RawOverrides {
    std::map<std::string, std::string> values;

    void apply_file(const std::string& path) {
        for (auto& [k, v] : read_config_file(path))
            if (!values.count(k)) values[k] = v;  // flags already present win
    }

    std::optional<std::string> get(const std::string& key) const {
        auto it = values.find(key);
        if (it == values.end()) return std::nullopt;
        return it->second;
    }
};

ExperimentConfig default_config() {
    return ExperimentConfig{
        .problem_tag = ExperimentConfig::ProblemTag::Toy,
        .toy = ToyParams{},
        .regression = RegressionParams{},
        .variant = SystemVariant::han(),
        .schedules = ScheduleSet::make(ScheduleFamily::power_damping(17.0),
                                       ScheduleFamily::power_scaling(1.0),
                                       ScheduleFamily::power_tikhonov(7.0, 2.0), 1.0 / 16.0,
                                       1.0),
        .t_end = 20.0,
        .sample_count = 400,
        .seed = RngSeed{42},
        .integrator = IntegratorConfig{},
        .x0 = {},
        .y0 = {},
        .xdot0 = {},
        .ydot0 = {},
        .label = "",
    };
}

struct OutputSelection {
    std::string csv_path;
    std::string json_path;
    bool deterministic = false;
};

void apply_overrides(const RawOverrides& raw, ExperimentConfig& config, OutputSelection& out) {
    ScheduleFamily damping = config.schedules.damping;
    ScheduleFamily scaling = config.schedules.scaling;
    ScheduleFamily tikhonov = config.schedules.tikhonov;
    double theta = config.schedules.theta;
    double t0 = config.schedules.t0;

    if (auto v = raw.get("problem")) {
        if (*v == "toy")
            config.problem_tag = ExperimentConfig::ProblemTag::Toy;
        else if (*v == "regression")
            config.problem_tag = ExperimentConfig::ProblemTag::Regression;
        else
            usage_error("problem: expected toy or regression, got '" + *v + "'");
    }
    if (auto v = raw.get("mc")) config.toy.mc = parse_number(*v, "mc");
    if (auto v = raw.get("nc")) config.toy.nc = parse_number(*v, "nc");
    if (auto v = raw.get("jc")) config.toy.jc = parse_number(*v, "jc");
    if (auto v = raw.get("kc")) config.toy.kc = parse_number(*v, "kc");
    if (auto v = raw.get("dims")) {
        const auto x = v->find('x');
        if (x == std::string::npos) usage_error("dims: expected <m>x<n>, got '" + *v + "'");
        config.regression.rows =
            static_cast<std::size_t>(parse_number(v->substr(0, x), "dims m"));
        config.regression.cols =
            static_cast<std::size_t>(parse_number(v->substr(x + 1), "dims n"));
    }
    if (auto v = raw.get("kappa")) config.regression.kappa = parse_number(*v, "kappa");
    if (auto v = raw.get("sigma_max")) config.regression.sigma_max = parse_number(*v, "sigma_max");
    if (auto v = raw.get("omega")) config.regression.omega = parse_number(*v, "omega");
    if (auto v = raw.get("a")) config.regression.a = parse_number(*v, "a");
    if (auto v = raw.get("variant")) config.variant = parse_variant(*v);
    if (auto v = raw.get("alpha")) damping = parse_damping(*v);
    if (auto v = raw.get("beta")) scaling = parse_scaling(*v);
    if (auto v = raw.get("eps")) tikhonov = parse_tikhonov(*v);
    if (auto v = raw.get("theta")) theta = parse_number(*v, "theta");
    if (auto v = raw.get("t0")) t0 = parse_number(*v, "t0");
    if (auto v = raw.get("t_end")) config.t_end = parse_number(*v, "t_end");
    if (auto v = raw.get("span")) {
        const auto colon = v->find(':');
        if (colon == std::string::npos) usage_error("span: expected <t0>:<t_end>");
        t0 = parse_number(v->substr(0, colon), "span t0");
        config.t_end = parse_number(v->substr(colon + 1), "span t_end");
    }
    if (auto v = raw.get("samples"))
        config.sample_count = static_cast<std::size_t>(parse_number(*v, "samples"));
    if (auto v = raw.get("seed"))
        config.seed = RngSeed{static_cast<std::uint64_t>(std::stoull(*v))};
    if (auto v = raw.get("rtol")) config.integrator.rtol = parse_number(*v, "rtol");
    if (auto v = raw.get("atol")) config.integrator.atol = parse_number(*v, "atol");
    if (auto v = raw.get("h_init")) config.integrator.h_init = parse_number(*v, "h_init");
    if (auto v = raw.get("h_min")) config.integrator.h_min = parse_number(*v, "h_min");
    if (auto v = raw.get("h_max")) config.integrator.h_max = parse_number(*v, "h_max");
    if (auto v = raw.get("max_steps"))
        config.integrator.max_steps = static_cast<std::size_t>(parse_number(*v, "max_steps"));
    if (auto v = raw.get("x0")) config.x0 = parse_vector(*v, "x0");
    if (auto v = raw.get("y0")) config.y0 = parse_vector(*v, "y0");
    if (auto v = raw.get("xdot0")) config.xdot0 = parse_vector(*v, "xdot0");
    if (auto v = raw.get("ydot0")) config.ydot0 = parse_vector(*v, "ydot0");
    if (auto v = raw.get("init")) {
        if (*v == "zeros") {
            config.x0.clear();
            config.y0.clear();
            config.xdot0.clear();
            config.ydot0.clear();
        } else {
            usage_error("init: the only named start rule is 'zeros'");
        }
    }
    if (auto v = raw.get("numeric_ref")) config.use_numeric_reference = parse_bool(*v, "numeric_ref");
    if (auto v = raw.get("out")) out.csv_path = *v;
    if (auto v = raw.get("json")) out.json_path = *v;
    if (auto v = raw.get("deterministic")) out.deterministic = parse_bool(*v, "deterministic");

    // A preset label no longer describes the run once the flow itself is
    // overridden.
    for (const char* key : {"variant", "alpha", "beta", "eps", "theta", "problem"})
        if (raw.get(key)) config.label.clear();

    try {
        config.schedules = ScheduleSet::make(damping, scaling, tikhonov, theta, t0);
    } catch (const std::invalid_argument& e) {
        usage_error(e.what());
    }
}

void write_outputs(const RunResult& result, const OutputSelection& out) {
    OutputOptions options{out.deterministic};
    if (!out.csv_path.empty()) {
        const std::filesystem::path p(out.csv_path);
        if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
        std::ofstream os(p);
        if (!os) throw std::runtime_error("cannot open output file '" + out.csv_path + "'");
        write_csv(os, result, options);
    } else {
        write_csv(std::cout, result, options);
    }
    if (!out.json_path.empty()) {
        const std::filesystem::path p(out.json_path);
        if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
        std::ofstream os(p);
        if (!os) throw std::runtime_error("cannot open output file '" + out.json_path + "'");
        write_json(os, result, options);
    }
}

std::string indexed_path(const std::string& path, std::size_t index, std::size_t total) {
    if (total <= 1 || path.empty()) return path;
    const std::filesystem::path p(path);
    std::filesystem::path stem = p;
    stem.replace_extension();
    return (stem.string() + "_" + std::to_string(index) + p.extension().string());
}

void print_run_summary(const RunResult& r) {
    const auto& last = r.samples.back();
    std::ostringstream os;
    os << (r.config.label.empty() ? r.config.variant.describe() : r.config.label) << ": ";
    os << "final";
    if (last.gap) os << " gap=" << format_double(*last.gap);
    os << " norm_xy=" << format_double(last.norm_xy);
    if (last.phi) os << " phi=" << format_double(*last.phi);

    // Fitted log-log slope over the last decade of the span.
    const std::string metric = last.gap ? "gap" : (last.phi ? "phi" : "norm_xy");
    try {
        const auto series = metric_series(r, metric);
        const double slope =
            rate_slope(series, {r.config.t_end / 10.0, r.config.t_end});
        os << " slope(" << metric << ")=" << format_double(slope);
    } catch (const std::invalid_argument&) {
        os << " slope(" << metric << ")=nan";
    }
    if (!r.condition_report.all_ok()) os << " [schedule conditions violated]";
    std::cout << os.str() << "\n";
}

int command_run(const RawOverrides& raw, const std::string& preset) {
    std::vector<ExperimentConfig> configs;
    if (!preset.empty()) {
        auto found = preset_by_name(preset);
        if (!found) usage_error("unknown preset '" + preset + "'");
        configs = std::move(*found);
    } else {
        configs.push_back(default_config());
    }

    OutputSelection out;
    for (auto& config : configs) apply_overrides(raw, config, out);

    int exit_code = exit_ok;
    for (std::size_t i = 0; i < configs.size(); ++i) {
        OutputSelection slot = out;
        slot.csv_path = indexed_path(out.csv_path, i, configs.size());
        slot.json_path = indexed_path(out.json_path, i, configs.size());
        try {
            const RunResult result = run(configs[i]);
            write_outputs(result, slot);
            print_run_summary(result);
            if (!result.condition_report.all_ok()) {
                std::cerr << "warning: schedule conditions violated; see the report columns\n";
            }
        } catch (const ExperimentFailure& e) {
            write_outputs(e.partial(), slot);
            std::cerr << "integration failed: " << e.what() << "\n";
            exit_code = exit_numerical;
        }
    }
    return exit_code;
}

int command_validate(const RawOverrides& raw) {
    ExperimentConfig config = default_config();
    OutputSelection out;
    apply_overrides(raw, config, out);

    const ConditionReport report = validate_conditions(config.schedules);
    const RegimeClass regime = classify_regime(config.schedules);

    auto line = [](const char* name, const ConditionCheck& check) {
        std::cout << name << ": " << (check.ok ? "pass" : "FAIL")
                  << " (worst margin " << format_double(check.worst_margin) << ")\n";
    };
    line("damping condition   alpha(t) >= (1+theta)/(theta t)", report.damping);
    line("scaling condition   beta'(t)/beta(t) <= (1-2theta)/(theta t)", report.scaling);
    line("tikhonov growth     alpha(t)+t alpha'(t) <= t beta(t) eps(t)", report.tikhonov_growth);
    line("eps monotonicity    eps'(t) <= 0", report.eps_monotone);
    std::cout << "regime: " << to_string(regime.kind)
              << (regime.method == ClassifyMethod::Analytic ? " (analytic)" : " (quadrature)")
              << ", strong convergence flag: "
              << (regime.strong_convergence_flag ? "true" : "false") << "\n";
    return report.all_ok() ? exit_ok : exit_condition_failure;
}

int command_compare(const RawOverrides& raw, const std::string& preset,
                    const std::string& metric, const std::string& window_text) {
    std::vector<ExperimentConfig> configs;
    if (!preset.empty()) {
        auto found = preset_by_name(preset);
        if (!found) usage_error("unknown preset '" + preset + "'");
        configs = std::move(*found);
    } else {
        usage_error("compare needs --preset");
    }

    OutputSelection out;
    for (auto& config : configs) apply_overrides(raw, config, out);

    std::pair<double, double> window{configs.front().t_end / 10.0, configs.front().t_end};
    if (!window_text.empty()) {
        const auto colon = window_text.find(':');
        if (colon == std::string::npos) usage_error("--window: expected <lo>:<hi>");
        window.first = parse_number(window_text.substr(0, colon), "window lo");
        window.second = parse_number(window_text.substr(colon + 1), "window hi");
    }

    std::string use_metric = metric;
    if (use_metric.empty())
        use_metric =
            configs.front().problem_tag == ExperimentConfig::ProblemTag::Toy ? "gap" : "phi";

    try {
        const auto rows = compare(configs, use_metric, window);
        std::ostringstream table;
        table << "label,final_" << use_metric << ",slope\n";
        for (const auto& row : rows)
            table << row.label << "," << format_double(row.final_value) << ","
                  << format_double(row.slope) << "\n";
        std::cout << table.str();
        if (!out.csv_path.empty()) {
            const std::filesystem::path p(out.csv_path);
            if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
            std::ofstream os(p);
            os << table.str();
        }
        return exit_ok;
    } catch (const ExperimentFailure& e) {
        std::cerr << "integration failed: " << e.what() << "\n";
        return exit_numerical;
    }
}

struct GradCheckOutcome {
    double max_rel_error = 0.0;
    double tolerance = 0.0;
};

GradCheckOutcome gradcheck_problem(const SaddleProblem& p, double step, double tolerance,
                                   std::size_t points, RngSeed seed) {
    GaussianSampler sampler(seed);
    double worst = 0.0;
    std::vector<double> x(p.n), y(p.m), grad(p.n > p.m ? p.n : p.m);
    std::vector<double> probe;
    for (std::size_t k = 0; k < points; ++k) {
        for (double& v : x) v = sampler.next();
        for (double& v : y) v = sampler.next();

        // f block
        p.f_grad(x, std::span<double>(grad.data(), p.n));
        probe = x;
        double diff_sq = 0.0, ref_sq = 0.0;
        for (std::size_t i = 0; i < p.n; ++i) {
            probe[i] = x[i] + step;
            const double hi = p.f_value(probe);
            probe[i] = x[i] - step;
            const double lo = p.f_value(probe);
            probe[i] = x[i];
            const double fd = (hi - lo) / (2.0 * step);
            const double d = fd - grad[i];
            diff_sq += d * d;
            ref_sq += grad[i] * grad[i];
        }
        worst = std::max(worst, std::sqrt(diff_sq) / std::max(1.0, std::sqrt(ref_sq)));

        // g block
        p.g_grad(y, std::span<double>(grad.data(), p.m));
        probe = y;
        diff_sq = ref_sq = 0.0;
        for (std::size_t i = 0; i < p.m; ++i) {
            probe[i] = y[i] + step;
            const double hi = p.g_value(probe);
            probe[i] = y[i] - step;
            const double lo = p.g_value(probe);
            probe[i] = y[i];
            const double fd = (hi - lo) / (2.0 * step);
            const double d = fd - grad[i];
            diff_sq += d * d;
            ref_sq += grad[i] * grad[i];
        }
        worst = std::max(worst, std::sqrt(diff_sq) / std::max(1.0, std::sqrt(ref_sq)));
    }
    return {worst, tolerance};
}

int command_gradcheck(const std::string& problem, double a, std::size_t points,
                      std::uint64_t seed) {
    std::vector<GradCheckOutcome> outcomes;
    // Per-point relative error is ||fd - grad|| / max(1, ||grad||); the
    // documented steps are 1e-6 for the quadratic problem and 1e-7 for the
    // smoothed-L1 problem at its sharper tolerance.
    if (problem == "toy" || problem == "both") {
        const SaddleProblem p = quadratic_minmax_problem(1.0, 6.0, 4.0, 10.0);
        outcomes.push_back(gradcheck_problem(p, 1e-6, 1e-6, points, RngSeed{seed}));
        std::cout << "toy: max relative error " << format_double(outcomes.back().max_rel_error)
                  << " (step 1e-06, tolerance 1e-06)\n";
    }
    if (problem == "regression" || problem == "both") {
        ExperimentConfig config = preset_example2();
        config.regression.rows = 40;
        config.regression.cols = 60;
        config.regression.a = a;
        config.seed = RngSeed{seed};
        const SaddleProblem p = build_problem(config);
        outcomes.push_back(gradcheck_problem(p, 1e-7, 1e-4, points, RngSeed{seed + 1}));
        std::cout << "regression: max relative error "
                  << format_double(outcomes.back().max_rel_error)
                  << " (step 1e-07, tolerance 0.0001)\n";
    }
    if (outcomes.empty()) usage_error("--problem: expected toy, regression or both");
    for (const auto& o : outcomes)
        if (!(o.max_rel_error <= o.tolerance)) return exit_condition_failure;
    return exit_ok;
}

const std::vector<std::string> config_keys = {
    "problem", "mc", "nc", "jc", "kc", "dims", "kappa", "sigma_max", "omega", "a",
    "variant", "alpha", "beta", "eps", "theta", "t0", "t_end", "span", "samples", "seed",
    "rtol", "atol", "h_init", "h_min", "h_max", "max_steps",
    "x0", "y0", "xdot0", "ydot0", "init", "numeric_ref", "out", "json"};

void add_override_flags(CLI::App* cmd, std::shared_ptr<RawOverrides> raw,
                        std::shared_ptr<std::string> config_path) {
    cmd->add_option("--config", *config_path, "flat key = value config file");
    for (const auto& key : config_keys) {
        cmd->add_option_function<std::string>(
            "--" + key, [raw, key](const std::string& v) { raw->values[key] = v; });
    }
    cmd->add_flag_callback("--deterministic",
                           [raw] { raw->values["deterministic"] = "true"; },
                           "drop timestamp and wall-time header lines");
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
    CLI::App app{"saddleflow: second-order primal-dual saddle point flows with Tikhonov "
                 "regularization"};
    app.require_subcommand(0, 1);

    bool help_config = false;
    app.add_flag("--help-config", help_config, "print the config file schema and exit");

    auto raw = std::make_shared<RawOverrides>();
    auto config_path = std::make_shared<std::string>();

    // run
    auto* cmd_run = app.add_subcommand("run", "integrate one configuration and write CSV/JSON");
    std::string run_preset;
    cmd_run->add_option("--preset", run_preset, "named configuration");
    add_override_flags(cmd_run, raw, config_path);

    // validate
    auto* cmd_validate =
        app.add_subcommand("validate", "check the schedule hypotheses and classify the regime");
    add_override_flags(cmd_validate, raw, config_path);

    // compare
    auto* cmd_compare =
        app.add_subcommand("compare", "run a preset bundle and tabulate a metric");
    std::string compare_preset, compare_metric, compare_window;
    cmd_compare->add_option("--preset", compare_preset, "preset bundle name");
    cmd_compare->add_option("--metric", compare_metric, "metric column (default gap/phi)");
    cmd_compare->add_option("--window", compare_window, "slope window <lo>:<hi>");
    add_override_flags(cmd_compare, raw, config_path);

    // gradcheck
    auto* cmd_gradcheck =
        app.add_subcommand("gradcheck", "finite-difference validation of the gradients");
    std::string gc_problem = "both";
    double gc_a = 100.0;
    std::size_t gc_points = 200;
    std::uint64_t gc_seed = 42;
    cmd_gradcheck->add_option("--problem", gc_problem, "toy | regression | both");
    cmd_gradcheck->add_option("--a", gc_a, "smoothed-L1 sharpness");
    cmd_gradcheck->add_option("--points", gc_points, "random points per problem");
    cmd_gradcheck->add_option("--seed", gc_seed, "sampling seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_usage;
    }

    if (help_config) {
        std::cout << config_schema;
        return exit_ok;
    }

    try {
        if (!config_path->empty()) raw->apply_file(*config_path);
        if (cmd_run->parsed()) return command_run(*raw, run_preset);
        if (cmd_validate->parsed()) return command_validate(*raw);
        if (cmd_compare->parsed())
            return command_compare(*raw, compare_preset, compare_metric, compare_window);
        if (cmd_gradcheck->parsed())
            return command_gradcheck(gc_problem, gc_a, gc_points, gc_seed);
        std::cout << app.help();
        return exit_ok;
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const NumericalBlowupError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return exit_numerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    }
}

}  // namespace saddleflow
