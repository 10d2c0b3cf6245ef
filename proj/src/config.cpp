#include "illiq/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace illiq {

std::uint64_t fnv1a64(const void* data, std::size_t n) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001B3ULL;
    }
    return h;
}

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<double> parse_number_list(const std::string& value, const std::string& field) {
    std::vector<double> out;
    std::istringstream in(value);
    std::string tok;
    while (in >> tok) {
        try {
            std::size_t used = 0;
            const double x = std::stod(tok, &used);
            if (used != tok.size()) throw std::invalid_argument(tok);
            out.push_back(x);
        } catch (const std::exception&) {
            throw std::invalid_argument(field + " has a non-numeric entry '" + tok + "'");
        }
    }
    if (out.empty()) throw std::invalid_argument(field + " must not be empty");
    return out;
}

double parse_number(const std::string& value, const std::string& field) {
    const auto list = parse_number_list(value, field);
    if (list.size() != 1) throw std::invalid_argument(field + " expects one number");
    return list[0];
}

std::uint64_t parse_u64(const std::string& value, const std::string& field) {
    try {
        std::size_t used = 0;
        const unsigned long long x = std::stoull(trim(value), &used);
        if (used != trim(value).size()) throw std::invalid_argument(value);
        return static_cast<std::uint64_t>(x);
    } catch (const std::exception&) {
        throw std::invalid_argument(field + " must be an unsigned integer");
    }
}

bool parse_bool(const std::string& value, const std::string& field) {
    const std::string v = trim(value);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw std::invalid_argument(field + " must be true or false");
}

std::string fmt(double x) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

using Section = std::map<std::string, std::string>;
using Sections = std::map<std::string, Section>;

Sections tokenize(const std::string& text) {
    Sections sections;
    std::istringstream in(text);
    std::string line, current;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::invalid_argument("config line " + std::to_string(line_no) +
                                            ": malformed section header");
            current = trim(line.substr(1, line.size() - 2));
            sections[current];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": expected key = value");
        if (current.empty())
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": key outside any section");
        const std::string key = trim(line.substr(0, eq));
        sections[current][key] = trim(line.substr(eq + 1));
    }
    return sections;
}

// Pulls a key out of the section, so leftovers can be reported as unknown.
class SectionReader {
public:
    SectionReader(Sections& all, const std::string& name) : name_(name) {
        auto it = all.find(name);
        if (it != all.end()) {
            section_ = std::move(it->second);
            all.erase(it);
        }
    }

    bool has(const std::string& key) const { return section_.count(key) > 0; }

    std::string take(const std::string& key, const std::string& fallback) {
        auto it = section_.find(key);
        if (it == section_.end()) return fallback;
        std::string v = it->second;
        section_.erase(it);
        return v;
    }

    std::string require(const std::string& key) {
        auto it = section_.find(key);
        if (it == section_.end())
            throw std::invalid_argument("[" + name_ + "] is missing required key '" + key + "'");
        std::string v = it->second;
        section_.erase(it);
        return v;
    }

    void finish() const {
        if (!section_.empty())
            throw std::invalid_argument("[" + name_ + "] has unknown key '" +
                                        section_.begin()->first + "'");
    }

    const std::string& name() const { return name_; }

private:
    std::string name_;
    Section section_;
};

ProcessKind parse_process_kind(const std::string& v) {
    if (v == "brownian_drift") return ProcessKind::brownian_drift;
    if (v == "jump_diffusion") return ProcessKind::jump_diffusion;
    if (v == "binary_jump") return ProcessKind::binary_jump;
    throw std::invalid_argument("process.kind must be brownian_drift, jump_diffusion or binary_jump");
}

PriceMapKind parse_map_kind(const std::string& v) {
    if (v == "identity") return PriceMapKind::identity;
    if (v == "affine") return PriceMapKind::affine_of_first_coordinate;
    if (v == "exponential") return PriceMapKind::exponential_of_first_coordinate;
    throw std::invalid_argument("price_map.kind must be identity, affine or exponential");
}

BenchmarkKind parse_benchmark_kind(const std::string& v) {
    if (v == "zero") return BenchmarkKind::zero;
    if (v == "constant") return BenchmarkKind::constant;
    if (v == "terminal_price_multiple") return BenchmarkKind::terminal_price_multiple;
    if (v == "path_average_multiple") return BenchmarkKind::path_average_multiple;
    throw std::invalid_argument(
        "benchmark.kind must be zero, constant, terminal_price_multiple or path_average_multiple");
}

HKind parse_h_kind(const std::string& v) {
    if (v == "constant") return HKind::constant;
    if (v == "linear_in_price") return HKind::linear_in_price;
    if (v == "affine_positive") return HKind::affine_positive;
    throw std::invalid_argument("friction.h_kind must be constant, linear_in_price or affine_positive");
}

StrategyKind parse_strategy_kind(const std::string& v) {
    if (v == "open_loop") return StrategyKind::open_loop;
    if (v == "feedback") return StrategyKind::feedback;
    if (v == "randomized_mixture") return StrategyKind::randomized_mixture;
    throw std::invalid_argument("strategy.kind must be open_loop, feedback or randomized_mixture");
}

UtilitySpec parse_utility(const std::string& value, UtilitySide side, const std::string& field) {
    std::istringstream in(value);
    std::string form;
    in >> form;
    UtilitySpec u;
    u.side = side;
    if (form == "power")
        u.form = UtilityForm::power;
    else if (form == "exponential")
        u.form = UtilityForm::exponential;
    else
        throw std::invalid_argument(field + " form must be power or exponential");
    if (!(in >> u.coeff >> u.exponent))
        throw std::invalid_argument(field + " expects '<form> <coeff> <exponent>'");
    std::string extra;
    if (in >> extra) throw std::invalid_argument(field + " has trailing tokens");
    return u;
}

DistortionSpec parse_distortion(const std::string& value, const std::string& field) {
    std::istringstream in(value);
    std::string form;
    in >> form;
    DistortionSpec w;
    if (form == "identity") {
        w.form = DistortionForm::identity;
        w.param = 1.0;
    } else if (form == "power" || form == "inverse_s") {
        w.form = form == "power" ? DistortionForm::power : DistortionForm::inverse_s;
        if (!(in >> w.param))
            throw std::invalid_argument(field + " expects '<form> <param>'");
    } else {
        throw std::invalid_argument(field + " form must be identity, power or inverse_s");
    }
    std::string extra;
    if (in >> extra) throw std::invalid_argument(field + " has trailing tokens");
    return w;
}

std::string utility_to_text(const UtilitySpec& u) {
    return to_string(u.form) + " " + fmt(u.coeff) + " " + fmt(u.exponent);
}

std::string distortion_to_text(const DistortionSpec& w) {
    if (w.form == DistortionForm::identity) return "identity";
    return to_string(w.form) + " " + fmt(w.param);
}

std::vector<double> broadcast_rates(const std::vector<double>& v, std::size_t n_steps,
                                    const std::string& field) {
    if (v.size() == 1) return std::vector<double>(n_steps, v[0]);
    if (v.size() == n_steps) return v;
    throw std::invalid_argument(field + " must have 1 or n_steps entries");
}

} // namespace

ExperimentConfig parse_config_text(const std::string& text) {
    Sections sections = tokenize(text);
    ExperimentConfig cfg;

    {
        SectionReader run(sections, "run");
        cfg.problem.n_steps = static_cast<std::size_t>(parse_u64(run.take("n_steps", "64"), "run.n_steps"));
        cfg.problem.n_paths = static_cast<std::size_t>(parse_u64(run.take("n_paths", "1024"), "run.n_paths"));
        cfg.base_seed = parse_u64(run.take("base_seed", "1"), "run.base_seed");
        cfg.out_dir = run.take("out_dir", "out");
        cfg.run_compare_randomized =
            parse_bool(run.take("run_compare_randomized", "false"), "run.run_compare_randomized");
        cfg.dump_paths = parse_bool(run.take("dump_paths", "false"), "run.dump_paths");
        cfg.problem.allow_ill_posed =
            parse_bool(run.take("allow_ill_posed", "false"), "run.allow_ill_posed");
        run.finish();
    }
    {
        SectionReader sec(sections, "process");
        auto& p = cfg.problem.market.process;
        p.kind = parse_process_kind(sec.take("kind", "brownian_drift"));
        p.dimension = static_cast<std::size_t>(parse_u64(sec.take("dimension", "1"), "process.dimension"));
        p.drift = parse_number_list(sec.take("drift", "0"), "process.drift");
        p.volatility = parse_number_list(sec.take("volatility", "0"), "process.volatility");
        p.jump_rate = parse_number(sec.take("jump_rate", "0"), "process.jump_rate");
        p.jump_mean = parse_number(sec.take("jump_mean", "0"), "process.jump_mean");
        p.jump_scale = parse_number(sec.take("jump_scale", "0"), "process.jump_scale");
        sec.finish();
    }
    {
        SectionReader sec(sections, "price_map");
        auto& m = cfg.problem.market.price_map;
        m.kind = parse_map_kind(sec.take("kind", "identity"));
        m.base = parse_number(sec.take("base", "1"), "price_map.base");
        m.scale = parse_number(sec.take("scale", "1"), "price_map.scale");
        sec.finish();
    }
    {
        SectionReader sec(sections, "benchmark");
        auto& b = cfg.problem.market.benchmark;
        b.kind = parse_benchmark_kind(sec.take("kind", "zero"));
        b.coefficient = parse_number(sec.take("coefficient", "0"), "benchmark.coefficient");
        sec.finish();
    }
    {
        SectionReader sec(sections, "friction");
        auto& f = cfg.problem.friction;
        f.alpha = parse_number(sec.require("alpha"), "friction.alpha");
        f.h_kind = parse_h_kind(sec.take("h_kind", "constant"));
        f.h0 = parse_number(sec.take("h0", "1"), "friction.h0");
        f.h1 = parse_number(sec.take("h1", "0"), "friction.h1");
        if (sec.has("beta")) {
            f.beta = parse_number(sec.take("beta", ""), "friction.beta");
        } else {
            f.beta = 0.5 * (1.0 + f.alpha);  // midpoint of the allowed band
        }
        f.gamma = f.beta / (f.beta - 1.0);
        sec.finish();
    }
    {
        SectionReader sec(sections, "cpt");
        auto& c = cfg.problem.cpt;
        c.u_plus = parse_utility(sec.take("u_plus", "power 1 1"), UtilitySide::plus, "cpt.u_plus");
        c.u_minus = parse_utility(sec.take("u_minus", "power 1 1"), UtilitySide::minus, "cpt.u_minus");
        c.w_plus = parse_distortion(sec.take("w_plus", "identity"), "cpt.w_plus");
        c.w_minus = parse_distortion(sec.take("w_minus", "identity"), "cpt.w_minus");
        c.c1 = parse_number(sec.take("c1", "1"), "cpt.c1");
        c.c2 = parse_number(sec.take("c2", "0"), "cpt.c2");
        c.delta1 = parse_number(sec.take("delta1", "1"), "cpt.delta1");
        c.c3 = parse_number(sec.take("c3", "1"), "cpt.c3");
        c.delta2 = parse_number(sec.take("delta2", "1"), "cpt.delta2");
        sec.finish();
    }
    {
        SectionReader sec(sections, "strategy");
        auto& s = cfg.problem.strategy_template;
        s.kind = parse_strategy_kind(sec.take("kind", "open_loop"));
        s.rate_bound = parse_number(sec.take("rate_bound", "1000"), "strategy.rate_bound");
        const std::size_t n_steps = cfg.problem.n_steps;
        if (s.kind == StrategyKind::open_loop) {
            s.open_loop_rates = broadcast_rates(
                parse_number_list(sec.take("init_rates", "0"), "strategy.init_rates"),
                n_steps, "strategy.init_rates");
        } else if (s.kind == StrategyKind::feedback) {
            const auto coeffs =
                parse_number_list(sec.take("feedback_coeffs", "0 0 0 0"), "strategy.feedback_coeffs");
            if (coeffs.size() != 4)
                throw std::invalid_argument("strategy.feedback_coeffs must have 4 entries");
            for (std::size_t i = 0; i < 4; ++i) s.feedback_coeffs[i] = coeffs[i];
        } else {
            const std::size_t n_comp = static_cast<std::size_t>(
                parse_u64(sec.take("components", "2"), "strategy.components"));
            if (n_comp < 1)
                throw std::invalid_argument("strategy.components must be at least 1");
            const auto init = broadcast_rates(
                parse_number_list(sec.take("init_rates", "0"), "strategy.init_rates"),
                n_steps, "strategy.init_rates");
            StrategyParams comp;
            comp.kind = StrategyKind::open_loop;
            comp.rate_bound = s.rate_bound;
            comp.open_loop_rates = init;
            s.components.assign(n_comp, comp);
            std::string wtext = sec.take("weights", "");
            if (wtext.empty()) {
                s.weights.assign(n_comp, 1.0 / static_cast<double>(n_comp));
            } else {
                s.weights = parse_number_list(wtext, "strategy.weights");
                if (s.weights.size() != n_comp)
                    throw std::invalid_argument("strategy.weights must match strategy.components");
            }
        }
        sec.finish();
    }
    {
        SectionReader sec(sections, "optimizer");
        auto& o = cfg.optimizer;
        o.population = static_cast<std::size_t>(parse_u64(sec.take("population", "64"), "optimizer.population"));
        o.elite_fraction = parse_number(sec.take("elite_fraction", "0.125"), "optimizer.elite_fraction");
        o.max_generations = static_cast<std::size_t>(
            parse_u64(sec.take("max_generations", "200"), "optimizer.max_generations"));
        o.init_spread = parse_number(sec.take("init_spread", "1"), "optimizer.init_spread");
        o.spread_floor = parse_number(sec.take("spread_floor", "1e-6"), "optimizer.spread_floor");
        o.spread_smoothing = parse_number(sec.take("spread_smoothing", "0.3"), "optimizer.spread_smoothing");
        o.restarts = static_cast<std::size_t>(parse_u64(sec.take("restarts", "1"), "optimizer.restarts"));
        o.optimize_weights = parse_bool(sec.take("optimize_weights", "false"), "optimizer.optimize_weights");
        o.bootstrap_resamples = static_cast<std::size_t>(
            parse_u64(sec.take("bootstrap_resamples", "200"), "optimizer.bootstrap_resamples"));
        sec.finish();
    }

    if (!sections.empty())
        throw std::invalid_argument("config has unknown section [" + sections.begin()->first + "]");

    cfg.validate();
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

void ExperimentConfig::validate() const {
    problem.validate();
    if (optimizer.population < 2)
        throw std::invalid_argument("optimizer.population must be at least 2");
    if (!(optimizer.elite_fraction > 0.0) || optimizer.elite_fraction > 1.0)
        throw std::invalid_argument("optimizer.elite_fraction must lie in (0,1]");
    if (optimizer.max_generations < 1)
        throw std::invalid_argument("optimizer.max_generations must be at least 1");
    if (!(optimizer.init_spread > 0.0))
        throw std::invalid_argument("optimizer.init_spread must be positive");
    if (!(optimizer.spread_floor > 0.0))
        throw std::invalid_argument("optimizer.spread_floor must be positive");
    if (optimizer.spread_smoothing < 0.0 || optimizer.spread_smoothing >= 1.0)
        throw std::invalid_argument("optimizer.spread_smoothing must lie in [0,1)");
    if (optimizer.restarts < 1)
        throw std::invalid_argument("optimizer.restarts must be at least 1");
    if (optimizer.bootstrap_resamples < 2)
        throw std::invalid_argument("optimizer.bootstrap_resamples must be at least 2");
    if (out_dir.empty()) throw std::invalid_argument("run.out_dir must not be empty");
}

std::string serialize_config(const ExperimentConfig& cfg) {
    std::ostringstream out;
    const auto& p = cfg.problem;
    out << "[run]\n";
    out << "n_steps = " << p.n_steps << "\n";
    out << "n_paths = " << p.n_paths << "\n";
    out << "base_seed = " << cfg.base_seed << "\n";
    out << "out_dir = " << cfg.out_dir << "\n";
    out << "run_compare_randomized = " << (cfg.run_compare_randomized ? "true" : "false") << "\n";
    out << "dump_paths = " << (cfg.dump_paths ? "true" : "false") << "\n";
    out << "allow_ill_posed = " << (p.allow_ill_posed ? "true" : "false") << "\n";

    out << "\n[process]\n";
    out << "kind = " << to_string(p.market.process.kind) << "\n";
    out << "dimension = " << p.market.process.dimension << "\n";
    out << "drift =";
    for (double d : p.market.process.drift) out << " " << fmt(d);
    out << "\nvolatility =";
    for (double v : p.market.process.volatility) out << " " << fmt(v);
    out << "\njump_rate = " << fmt(p.market.process.jump_rate) << "\n";
    out << "jump_mean = " << fmt(p.market.process.jump_mean) << "\n";
    out << "jump_scale = " << fmt(p.market.process.jump_scale) << "\n";

    out << "\n[price_map]\n";
    out << "kind = " << to_string(p.market.price_map.kind) << "\n";
    out << "base = " << fmt(p.market.price_map.base) << "\n";
    out << "scale = " << fmt(p.market.price_map.scale) << "\n";

    out << "\n[benchmark]\n";
    out << "kind = " << to_string(p.market.benchmark.kind) << "\n";
    out << "coefficient = " << fmt(p.market.benchmark.coefficient) << "\n";

    out << "\n[friction]\n";
    out << "alpha = " << fmt(p.friction.alpha) << "\n";
    out << "h_kind = " << to_string(p.friction.h_kind) << "\n";
    out << "h0 = " << fmt(p.friction.h0) << "\n";
    out << "h1 = " << fmt(p.friction.h1) << "\n";
    out << "beta = " << fmt(p.friction.beta) << "\n";

    out << "\n[cpt]\n";
    out << "u_plus = " << utility_to_text(p.cpt.u_plus) << "\n";
    out << "u_minus = " << utility_to_text(p.cpt.u_minus) << "\n";
    out << "w_plus = " << distortion_to_text(p.cpt.w_plus) << "\n";
    out << "w_minus = " << distortion_to_text(p.cpt.w_minus) << "\n";
    out << "c1 = " << fmt(p.cpt.c1) << "\n";
    out << "c2 = " << fmt(p.cpt.c2) << "\n";
    out << "delta1 = " << fmt(p.cpt.delta1) << "\n";
    out << "c3 = " << fmt(p.cpt.c3) << "\n";
    out << "delta2 = " << fmt(p.cpt.delta2) << "\n";

    out << "\n[strategy]\n";
    const auto& s = p.strategy_template;
    out << "kind = " << to_string(s.kind) << "\n";
    out << "rate_bound = " << fmt(s.rate_bound) << "\n";
    if (s.kind == StrategyKind::open_loop) {
        out << "init_rates =";
        for (double r : s.open_loop_rates) out << " " << fmt(r);
        out << "\n";
    } else if (s.kind == StrategyKind::feedback) {
        out << "feedback_coeffs =";
        for (double a : s.feedback_coeffs) out << " " << fmt(a);
        out << "\n";
    } else {
        out << "components = " << s.components.size() << "\n";
        out << "weights =";
        for (double w : s.weights) out << " " << fmt(w);
        out << "\n";
        out << "init_rates =";
        for (double r : s.components.front().open_loop_rates) out << " " << fmt(r);
        out << "\n";
    }

    out << "\n[optimizer]\n";
    const auto& o = cfg.optimizer;
    out << "population = " << o.population << "\n";
    out << "elite_fraction = " << fmt(o.elite_fraction) << "\n";
    out << "max_generations = " << o.max_generations << "\n";
    out << "init_spread = " << fmt(o.init_spread) << "\n";
    out << "spread_floor = " << fmt(o.spread_floor) << "\n";
    out << "spread_smoothing = " << fmt(o.spread_smoothing) << "\n";
    out << "restarts = " << o.restarts << "\n";
    out << "optimize_weights = " << (o.optimize_weights ? "true" : "false") << "\n";
    out << "bootstrap_resamples = " << o.bootstrap_resamples << "\n";
    return out.str();
}

std::uint64_t config_hash(const ExperimentConfig& config) {
    const std::string text = serialize_config(config);
    return fnv1a64(text.data(), text.size());
}

std::string serialize_strategy(const StrategyParams& s) {
    std::ostringstream out;
    out << "[strategy]\n";
    out << "kind = " << to_string(s.kind) << "\n";
    out << "rate_bound = " << fmt(s.rate_bound) << "\n";
    if (s.kind == StrategyKind::open_loop) {
        out << "rates =";
        for (double r : s.open_loop_rates) out << " " << fmt(r);
        out << "\n";
    } else if (s.kind == StrategyKind::feedback) {
        out << "feedback_coeffs =";
        for (double a : s.feedback_coeffs) out << " " << fmt(a);
        out << "\n";
    } else {
        out << "components = " << s.components.size() << "\n";
        out << "weights =";
        for (double w : s.weights) out << " " << fmt(w);
        out << "\n";
        for (std::size_t c = 0; c < s.components.size(); ++c) {
            out << "rates_" << c << " =";
            for (double r : s.components[c].open_loop_rates) out << " " << fmt(r);
            out << "\n";
        }
    }
    return out.str();
}

StrategyParams parse_strategy_text(const std::string& text, std::size_t n_steps) {
    Sections sections = tokenize(text);
    SectionReader sec(sections, "strategy");
    StrategyParams s;
    s.kind = parse_strategy_kind(sec.require("kind"));
    s.rate_bound = parse_number(sec.take("rate_bound", "1000"), "strategy.rate_bound");
    if (s.kind == StrategyKind::open_loop) {
        s.open_loop_rates = parse_number_list(sec.require("rates"), "strategy.rates");
    } else if (s.kind == StrategyKind::feedback) {
        const auto coeffs = parse_number_list(sec.require("feedback_coeffs"),
                                              "strategy.feedback_coeffs");
        if (coeffs.size() != 4)
            throw std::invalid_argument("strategy.feedback_coeffs must have 4 entries");
        for (std::size_t i = 0; i < 4; ++i) s.feedback_coeffs[i] = coeffs[i];
    } else {
        const std::size_t n_comp = static_cast<std::size_t>(
            parse_u64(sec.require("components"), "strategy.components"));
        s.weights = parse_number_list(sec.require("weights"), "strategy.weights");
        for (std::size_t c = 0; c < n_comp; ++c) {
            StrategyParams comp;
            comp.kind = StrategyKind::open_loop;
            comp.rate_bound = s.rate_bound;
            comp.open_loop_rates = parse_number_list(
                sec.require("rates_" + std::to_string(c)), "strategy.rates_i");
            s.components.push_back(std::move(comp));
        }
    }
    sec.finish();
    s.validate(n_steps);
    return s;
}

StrategyParams parse_strategy_file(const std::string& path, std::size_t n_steps) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open strategy file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_strategy_text(buf.str(), n_steps);
}

} // namespace illiq
