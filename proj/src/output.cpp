#include "saddleflow/output.hpp"

#include <cmath>
#include <cstdio>
#include <ctime>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace saddleflow {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

double opt_value(const std::optional<double>& v) { return v ? *v : kNan; }

std::string problem_echo(const ExperimentConfig& c) {
    std::ostringstream os;
    if (c.problem_tag == ExperimentConfig::ProblemTag::Toy) {
        os << "toy mc=" << format_double(c.toy.mc) << " nc=" << format_double(c.toy.nc)
           << " jc=" << format_double(c.toy.jc) << " kc=" << format_double(c.toy.kc);
    } else {
        os << "regression dims=" << c.regression.rows << "x" << c.regression.cols
           << " kappa=" << format_double(c.regression.kappa)
           << " sigma_max=" << format_double(c.regression.sigma_max)
           << " omega=" << format_double(c.regression.omega)
           << " a=" << format_double(c.regression.a);
    }
    return os.str();
}

std::string timestamp_now() {
    const std::time_t now = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    return buf;
}

std::vector<std::string> header_lines(const RunResult& r, const OutputOptions& opt) {
    std::vector<std::string> lines;
    auto add = [&lines](const std::string& key, const std::string& value) {
        lines.push_back("# " + key + " = " + value);
    };
    add("tool", std::string("saddleflow ") + tool_version);
    if (!opt.deterministic) add("timestamp", timestamp_now());
    add("problem", problem_echo(r.config));
    add("variant", r.config.variant.describe());
    add("alpha", r.config.schedules.damping.describe());
    add("beta", r.config.schedules.scaling.describe());
    add("eps", r.config.schedules.tikhonov.describe());
    add("theta", format_double(r.config.schedules.theta));
    add("t0", format_double(r.config.schedules.t0));
    add("t_end", format_double(r.config.t_end));
    add("samples", std::to_string(r.config.sample_count));
    add("seed", std::to_string(r.config.seed.value));
    add("init", r.config.x0.empty() ? "zeros" : "explicit");
    if (r.config.problem_tag == ExperimentConfig::ProblemTag::Toy)
        add("reference", "known");
    else
        add("reference", r.config.use_numeric_reference ? "numeric" : "none");
    add("rtol", format_double(r.config.integrator.rtol));
    add("atol", format_double(r.config.integrator.atol));
    add("regime", to_string(r.regime.kind));
    add("strong_convergence_flag", r.regime.strong_convergence_flag ? "true" : "false");
    add("conditions_ok", r.condition_report.all_ok() ? "true" : "false");
    add("steps_accepted", std::to_string(r.steps_accepted));
    add("steps_rejected", std::to_string(r.steps_rejected));
    if (!opt.deterministic) add("wall_time_s", format_double(r.wall_time_s));
    return lines;
}

bool has_phi(const RunResult& r) {
    return !r.samples.empty() && r.samples.front().phi.has_value();
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<std::string> csv_columns(const RunResult& result) {
    std::vector<std::string> cols = {"t",        "gap",        "norm_xy", "dist_minnorm",
                                     "speed_x",  "speed_y",    "grad_res_f", "grad_res_g",
                                     "e_fast",   "e_slow"};
    if (has_phi(result)) cols.push_back("phi");
    return cols;
}

void write_csv(std::ostream& os, const RunResult& result, const OutputOptions& options) {
    for (const auto& line : header_lines(result, options)) os << line << "\n";

    const bool phi = has_phi(result);
    const auto cols = csv_columns(result);
    for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
    os << "\n";

    for (const auto& ts : result.samples) {
        os << format_double(ts.t) << "," << format_double(opt_value(ts.gap)) << ","
           << format_double(ts.norm_xy) << "," << format_double(opt_value(ts.dist_minnorm))
           << "," << format_double(ts.speed_x) << "," << format_double(ts.speed_y) << ","
           << format_double(opt_value(ts.grad_res_f)) << ","
           << format_double(opt_value(ts.grad_res_g)) << ","
           << format_double(opt_value(ts.e_fast)) << "," << format_double(opt_value(ts.e_slow));
        if (phi) os << "," << format_double(opt_value(ts.phi));
        os << "\n";
    }

    if (result.failed) {
        // Failure marker: one all-nan row, then the reason as a comment.
        const std::size_t n_cols = cols.size();
        for (std::size_t i = 0; i < n_cols; ++i) os << (i ? "," : "") << "nan";
        os << "\n";
        os << "# integration_failed_at = " << format_double(result.failure_time) << "\n";
        os << "# failure_reason = " << result.failure_reason << "\n";
    }
}

void write_json(std::ostream& os, const RunResult& result, const OutputOptions& options) {
    nlohmann::json root;
    root["tool"] = std::string("saddleflow ") + tool_version;
    if (!options.deterministic) {
        root["timestamp"] = timestamp_now();
        root["wall_time_s"] = result.wall_time_s;
    }
    root["problem"] = problem_echo(result.config);
    root["variant"] = result.config.variant.describe();
    root["alpha"] = result.config.schedules.damping.describe();
    root["beta"] = result.config.schedules.scaling.describe();
    root["eps"] = result.config.schedules.tikhonov.describe();
    root["theta"] = result.config.schedules.theta;
    root["t0"] = result.config.schedules.t0;
    root["t_end"] = result.config.t_end;
    root["seed"] = result.config.seed.value;
    if (result.config.problem_tag == ExperimentConfig::ProblemTag::Toy)
        root["reference"] = "known";
    else
        root["reference"] = result.config.use_numeric_reference ? "numeric" : "none";
    root["rtol"] = result.config.integrator.rtol;
    root["atol"] = result.config.integrator.atol;
    root["regime"] = to_string(result.regime.kind);
    root["strong_convergence_flag"] = result.regime.strong_convergence_flag;
    root["conditions_ok"] = result.condition_report.all_ok();
    root["steps_accepted"] = result.steps_accepted;
    root["steps_rejected"] = result.steps_rejected;
    root["failed"] = result.failed;

    const bool phi = has_phi(result);
    nlohmann::json samples = nlohmann::json::array();
    for (const auto& ts : result.samples) {
        nlohmann::json row;
        row["t"] = ts.t;
        row["gap"] = opt_value(ts.gap);
        row["norm_xy"] = ts.norm_xy;
        row["dist_minnorm"] = opt_value(ts.dist_minnorm);
        row["speed_x"] = ts.speed_x;
        row["speed_y"] = ts.speed_y;
        row["grad_res_f"] = opt_value(ts.grad_res_f);
        row["grad_res_g"] = opt_value(ts.grad_res_g);
        row["e_fast"] = opt_value(ts.e_fast);
        row["e_slow"] = opt_value(ts.e_slow);
        if (phi) row["phi"] = opt_value(ts.phi);
        samples.push_back(std::move(row));
    }
    root["samples"] = std::move(samples);
    os << root.dump(2) << "\n";
}

ParsedCsv parse_csv(std::istream& is) {
    ParsedCsv parsed;
    std::string line;
    bool header_done = false;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            parsed.header_lines.push_back(line);
            continue;
        }
        std::vector<std::string> fields;
        std::string field;
        std::istringstream ls(line);
        while (std::getline(ls, field, ',')) fields.push_back(field);
        if (!header_done) {
            parsed.columns = std::move(fields);
            header_done = true;
            continue;
        }
        std::vector<double> row;
        row.reserve(fields.size());
        for (const auto& f : fields) row.push_back(std::strtod(f.c_str(), nullptr));
        parsed.rows.push_back(std::move(row));
    }
    return parsed;
}

}  // namespace saddleflow
