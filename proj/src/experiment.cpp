#include "illiq/experiment.hpp"

#include "illiq/version.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace fs = std::filesystem;

namespace illiq {

namespace {

std::string fmt(double x) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string hex64(std::uint64_t x) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "0x%016llx", static_cast<unsigned long long>(x));
    return buf;
}

std::string utc_now() {
    const std::time_t t =
        std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void atomic_write(const fs::path& path, const std::string& contents) {
    const fs::path tmp = path.parent_path() / (".tmp." + path.filename().string());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!out) throw std::runtime_error("short write to " + tmp.string());
    }
    fs::rename(tmp, path);
}

std::string diagnostics_csv(const CertificateReport& cert, const MomentReport& moment) {
    std::ostringstream out;
    out << "metric,value,std_error,note\n";
    out << "wp_ordering_ok," << (cert.ordering_ok ? 1 : 0) << ",0,\n";
    out << "wp_u_minus_bound_ok," << (cert.u_minus_bound_ok ? 1 : 0) << ",0,\n";
    out << "wp_w_minus_bound_ok," << (cert.w_minus_bound_ok ? 1 : 0) << ",0,\n";
    out << "wp_concave_route," << (cert.concave_route ? 1 : 0) << ",0,\n";
    out << "wp_v_plus_excess," << fmt(cert.v_plus_excess) << ","
        << fmt(cert.v_plus_excess_se) << "," << (cert.mc_stabilized ? "stable" : "WARN")
        << "\n";
    out << "wp_e_w_plus," << fmt(cert.e_w_plus) << "," << fmt(cert.e_w_plus_se) << ",\n";
    out << "wp_verdict,0,0," << to_string(cert.verdict) << "\n";
    out << "integrability," << fmt(moment.estimate) << "," << fmt(moment.std_error)
        << "," << (moment.stabilized ? "stable" : "WARN") << "\n";
    for (std::size_t i = 0; i < moment.doubling_trail.size(); ++i)
        out << "integrability_trail_" << i << "," << fmt(moment.doubling_trail[i])
            << ",0,\n";
    return out.str();
}

std::string trace_csv(const OptimizationReport& report) {
    std::ostringstream out;
    out << "generation,best_value,gen_best_value,elite_mean_value,max_spread,"
           "moment_diagnostic,min_bound_slack\n";
    for (const auto& row : report.trace)
        out << row.generation << "," << fmt(row.best_value) << ","
            << fmt(row.gen_best_value) << "," << fmt(row.elite_mean_value) << ","
            << fmt(row.max_spread) << "," << fmt(row.moment_diagnostic) << ","
            << fmt(row.min_bound_slack) << "\n";
    return out.str();
}

std::string summary_csv(const OptimizationReport& report, const CertificateReport& cert,
                        const MomentReport& moment) {
    std::ostringstream out;
    out << "best_value,best_value_se,v_plus,v_minus,n_generations,n_evaluations,"
           "termination,slack_q0,slack_q25,slack_q50,slack_q75,slack_q100,"
           "wellposedness,integrability_estimate,integrability_se\n";
    out << fmt(report.best_value) << "," << fmt(report.best_value_se) << ","
        << fmt(report.v_plus) << "," << fmt(report.v_minus) << ","
        << report.trace.size() << "," << report.n_evaluations << ","
        << report.termination << ",";
    for (int i = 0; i < 5; ++i) out << fmt(report.bound_slack_quantiles[i]) << ",";
    out << to_string(cert.verdict) << "," << fmt(moment.estimate) << ","
        << fmt(moment.std_error) << "\n";
    return out.str();
}

std::string outcomes_csv(const OptimizationReport& report) {
    std::ostringstream out;
    out << "path_id,x1,bound,terminal_inventory,outcome\n";
    for (std::size_t i = 0; i < report.final_sample.size(); ++i)
        out << i << "," << fmt(report.final_x1[i]) << "," << fmt(report.final_bounds[i])
            << "," << fmt(report.final_terminal_inventory[i]) << ","
            << fmt(report.final_sample[i]) << "\n";
    return out.str();
}

std::string compare_csv(const ComparisonReport& report) {
    std::ostringstream out;
    out << "arm,best_value,best_value_se\n";
    out << "randomized," << fmt(report.randomized.best_value) << ","
        << fmt(report.randomized.best_value_se) << "\n";
    out << "deterministic," << fmt(report.deterministic.best_value) << ","
        << fmt(report.deterministic.best_value_se) << "\n";
    out << "gap," << fmt(report.gap) << "," << fmt(report.pooled_se) << "\n";
    return out.str();
}

} // namespace

std::uint64_t file_checksum(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string bytes = buf.str();
    return fnv1a64(bytes.data(), bytes.size());
}

RunManifest run_experiment(const ExperimentConfig& config, RunMode mode) {
    const auto t0 = std::chrono::steady_clock::now();
    config.validate();
    const std::string started = utc_now();

    const TimeGrid grid(config.problem.n_steps);
    const auto& prob = config.problem;

    const auto cert = wellposedness_check(
        prob.cpt, prob.market.process, prob.market.price_map, prob.market.benchmark,
        prob.friction, std::max<std::size_t>(64, prob.n_paths / 8), grid,
        config.base_seed);
    const auto moment = integrability_diagnostic(
        prob.market.process, prob.market.price_map, prob.friction,
        std::max<std::size_t>(64, prob.n_paths / 4), grid, config.base_seed);

    // Everything is rendered in memory first; files appear only on success.
    std::map<std::string, std::string> outputs;
    outputs["diagnostics.csv"] = diagnostics_csv(cert, moment);

    if (mode != RunMode::check_only) {
        if (cert.verdict == Verdict::FAIL && !prob.allow_ill_posed)
            throw std::runtime_error(
                "well-posedness check FAILED; rerun with --allow-ill-posed to proceed");

        if (mode == RunMode::compare_randomized || config.run_compare_randomized) {
            const auto comparison = compare_randomized(prob, config.optimizer, config.base_seed);
            outputs["compare.csv"] = compare_csv(comparison);
            outputs["trace.csv"] = trace_csv(comparison.randomized);
            outputs["summary.csv"] = summary_csv(comparison.randomized, cert, moment);
            outputs["best_strategy.ini"] = serialize_strategy(comparison.randomized.best_params);
            if (config.dump_paths)
                outputs["outcomes.csv"] = outcomes_csv(comparison.randomized);
        } else if (cert.verdict == Verdict::FAIL && prob.allow_ill_posed) {
            // Ill-posed demo: escalate the rate clamp and report the trend.
            std::ostringstream trend;
            trend << "rate_bound,best_value,best_value_se\n";
            OptimizationReport last;
            for (double clamp : {10.0, 100.0, 1000.0}) {
                ProblemSpec clipped = prob;
                clipped.strategy_template.rate_bound = clamp;
                for (auto& c : clipped.strategy_template.components) c.rate_bound = clamp;
                last = optimize(clipped, config.optimizer, config.base_seed);
                trend << fmt(clamp) << "," << fmt(last.best_value) << ","
                      << fmt(last.best_value_se) << "\n";
            }
            outputs["clamp_trend.csv"] = trend.str();
            outputs["trace.csv"] = trace_csv(last);
            outputs["summary.csv"] = summary_csv(last, cert, moment);
            outputs["best_strategy.ini"] = serialize_strategy(last.best_params);
            if (config.dump_paths) outputs["outcomes.csv"] = outcomes_csv(last);
        } else {
            const auto report = optimize(prob, config.optimizer, config.base_seed);
            outputs["trace.csv"] = trace_csv(report);
            outputs["summary.csv"] = summary_csv(report, cert, moment);
            outputs["best_strategy.ini"] = serialize_strategy(report.best_params);
            if (config.dump_paths) outputs["outcomes.csv"] = outcomes_csv(report);
        }
    }

    fs::create_directories(config.out_dir);
    RunManifest manifest;
    manifest.version = kToolkitVersion;
    manifest.config_hash = config_hash(config);
    manifest.base_seed = config.base_seed;
    manifest.started_utc = started;

    for (const auto& [name, contents] : outputs) {
        atomic_write(fs::path(config.out_dir) / name, contents);
        manifest.files.push_back(
            {name, fnv1a64(contents.data(), contents.size()), contents.size()});
    }

    manifest.finished_utc = utc_now();
    manifest.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::ostringstream m;
    m << "toolkit_version: " << manifest.version << "\n";
    m << "config_hash: " << hex64(manifest.config_hash) << "\n";
    m << "base_seed: " << manifest.base_seed << "\n";
    m << "started_utc: " << manifest.started_utc << "\n";
    m << "finished_utc: " << manifest.finished_utc << "\n";
    m << "wall_seconds: " << fmt(manifest.wall_seconds) << "\n";
    for (const auto& f : manifest.files)
        m << "file: " << f.file << " bytes=" << f.bytes << " fnv1a64=" << hex64(f.checksum)
          << "\n";
    atomic_write(fs::path(config.out_dir) / "manifest.txt", m.str());
    return manifest;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) out.push_back(cell);
    return out;
}

} // namespace

void emit_plot_data(const std::string& run_dir, const ExperimentConfig& config) {
    const fs::path trace_path = fs::path(run_dir) / "trace.csv";
    const fs::path outcomes_path = fs::path(run_dir) / "outcomes.csv";

    std::string missing;
    if (!fs::exists(trace_path)) missing += " " + trace_path.string();
    if (!fs::exists(outcomes_path)) missing += " " + outcomes_path.string();
    if (!missing.empty())
        throw std::runtime_error("plot-data: missing input file(s):" + missing);

    // (generation, best_value, moment_diagnostic)
    {
        std::ifstream in(trace_path);
        std::string line;
        std::getline(in, line);  // header
        std::ostringstream out;
        out << "generation,best_value,moment_diagnostic\n";
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const auto cells = split_csv_line(line);
            if (cells.size() < 6)
                throw std::runtime_error("plot-data: malformed trace row: " + line);
            out << cells[0] << "," << cells[1] << "," << cells[5] << "\n";
        }
        atomic_write(fs::path(run_dir) / "plot_trace.csv", out.str());
    }

    // (x, empirical survival, distorted survival) over the outcome sample
    {
        std::ifstream in(outcomes_path);
        std::string line;
        std::getline(in, line);  // header
        std::vector<double> xs;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const auto cells = split_csv_line(line);
            if (cells.size() < 5)
                throw std::runtime_error("plot-data: malformed outcomes row: " + line);
            xs.push_back(std::stod(cells[4]));
        }
        std::sort(xs.begin(), xs.end());
        std::ostringstream out;
        out << "x,survival,distorted_survival\n";
        const std::size_t n = xs.size();
        for (std::size_t i = 0; i < n; ++i) {
            const double survival =
                static_cast<double>(n - i) / static_cast<double>(n);  // P(X >= x_(i))
            out << fmt(xs[i]) << "," << fmt(survival) << ","
                << fmt(config.problem.cpt.w_plus(survival)) << "\n";
        }
        atomic_write(fs::path(run_dir) / "plot_survival.csv", out.str());
    }
}

RunManifest read_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open manifest: " + path);
    RunManifest m;
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("toolkit_version: ", 0) == 0)
            m.version = line.substr(17);
        else if (line.rfind("config_hash: ", 0) == 0)
            m.config_hash = std::stoull(line.substr(13), nullptr, 16);
        else if (line.rfind("base_seed: ", 0) == 0)
            m.base_seed = std::stoull(line.substr(11));
        else if (line.rfind("started_utc: ", 0) == 0)
            m.started_utc = line.substr(13);
        else if (line.rfind("finished_utc: ", 0) == 0)
            m.finished_utc = line.substr(14);
        else if (line.rfind("wall_seconds: ", 0) == 0)
            m.wall_seconds = std::stod(line.substr(14));
        else if (line.rfind("file: ", 0) == 0) {
            std::istringstream row(line.substr(6));
            ManifestEntry e;
            std::string bytes_tok, sum_tok;
            row >> e.file >> bytes_tok >> sum_tok;
            if (bytes_tok.rfind("bytes=", 0) == 0) e.bytes = std::stoull(bytes_tok.substr(6));
            if (sum_tok.rfind("fnv1a64=", 0) == 0)
                e.checksum = std::stoull(sum_tok.substr(8), nullptr, 16);
            m.files.push_back(e);
        }
    }
    return m;
}

} // namespace illiq
