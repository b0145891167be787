#include "cli.hpp"

#include "harq_ee/ee_metrics.hpp"
#include "harq_ee/error.hpp"
#include "harq_ee/harq_time.hpp"
#include "harq_ee/mc_sim.hpp"
#include "harq_ee/parallel.hpp"
#include "harq_ee/queue_sim.hpp"
#include "harq_ee/version.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

namespace harq_ee::cli {

namespace {

using nlohmann::json;

// One output cell. Decibel values are rounded to 6 decimals at serialization only.
struct Cell {
    enum class Kind { Text, Number, Decibel } kind = Kind::Number;
    std::string text;
    double number = 0.0;

    static Cell of_text(std::string s) { return {Kind::Text, std::move(s), 0.0}; }
    static Cell of(double v) { return {Kind::Number, {}, v}; }
    static Cell db(double v) { return {Kind::Decibel, {}, v}; }
};

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    json summary = json::object();
};

std::string csv_cell(const Cell& c) {
    if (c.kind == Cell::Kind::Text) return c.text;
    if (std::isnan(c.number)) return "";
    if (std::isinf(c.number)) return c.number > 0 ? "inf" : "-inf";
    if (c.kind == Cell::Kind::Decibel) return fmt::format("{:.6f}", c.number);
    return fmt::format("{:.12g}", c.number);
}

json json_number(double v) {
    if (std::isnan(v)) return nullptr;
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

json json_cell(const Cell& c) {
    if (c.kind == Cell::Kind::Text) return c.text;
    if (c.kind == Cell::Kind::Decibel && std::isfinite(c.number)) {
        return std::round(c.number * 1e6) / 1e6;
    }
    return json_number(c.number);
}

json config_to_json(const RunConfig& c) {
    json j;
    j["command"] = c.command;
    j["source"] = c.source;
    j["p11"] = c.p11;
    j["p22"] = c.p22;
    j["alpha"] = c.alpha;
    j["beta"] = c.beta;
    j["fading"] = c.fading;
    j["mean-power"] = c.mean_power;
    j["m-shape"] = c.m_shape;
    j["M"] = c.deadline;
    j["eps"] = c.eps;
    j["theta"] = c.theta;
    j["snr-grid"] = c.snr_grid;
    j["scheme"] = c.scheme;
    j["rate"] = c.rate ? json(*c.rate) : json(nullptr);
    j["snr"] = c.snr;
    j["samples"] = c.samples;
    j["seed"] = c.seed;
    j["policy"] = c.policy;
    j["out"] = c.out;
    j["format"] = c.format;
    j["blocks"] = c.blocks;
    j["load"] = c.load;
    j["abandon"] = c.abandon;
    return j;
}

void apply_config_file(RunConfig& c, const json& j) {
    if (!j.is_object()) throw ValidationError("config file must hold a JSON object");
    for (const auto& [key, value] : j.items()) {
        try {
            if (key == "command") c.command = value.get<std::string>();
            else if (key == "source") c.source = value.get<std::string>();
            else if (key == "p11") c.p11 = value.get<double>();
            else if (key == "p22") c.p22 = value.get<double>();
            else if (key == "alpha") c.alpha = value.get<double>();
            else if (key == "beta") c.beta = value.get<double>();
            else if (key == "fading") c.fading = value.get<std::string>();
            else if (key == "mean-power") c.mean_power = value.get<double>();
            else if (key == "m-shape") c.m_shape = value.get<double>();
            else if (key == "M") c.deadline = value.get<int>();
            else if (key == "eps") c.eps = value.get<double>();
            else if (key == "theta") c.theta = value.get<double>();
            else if (key == "snr-grid") c.snr_grid = value.get<std::string>();
            else if (key == "scheme") c.scheme = value.get<std::string>();
            else if (key == "rate") c.rate = value.is_null() ? std::nullopt : std::optional(value.get<double>());
            else if (key == "snr") c.snr = value.get<double>();
            else if (key == "samples") c.samples = value.get<std::uint64_t>();
            else if (key == "seed") c.seed = value.get<std::uint64_t>();
            else if (key == "policy") c.policy = value.get<std::string>();
            else if (key == "out") c.out = value.get<std::string>();
            else if (key == "format") c.format = value.get<std::string>();
            else if (key == "blocks") c.blocks = value.get<std::uint64_t>();
            else if (key == "load") c.load = value.get<double>();
            else if (key == "abandon") c.abandon = value.get<std::string>();
            else throw ValidationError("unknown config key '" + key + "'");
        } catch (const json::exception& e) {
            throw ValidationError("config key '" + key + "': " + e.what());
        }
    }
}

SourceModel make_source(const RunConfig& c) {
    if (c.source == "constant") return SourceModel::constant();
    if (c.source == "dmarkov") return SourceModel::discrete_markov(c.p11, c.p22);
    if (c.source == "fluid") return SourceModel::fluid(c.alpha, c.beta);
    if (c.source == "mmps") return SourceModel::mmps(c.alpha, c.beta);
    throw ValidationError("unknown source '" + c.source + "'");
}

FadingModel make_fading(const RunConfig& c) {
    if (c.fading == "rayleigh") return FadingModel::rayleigh(c.mean_power);
    if (c.fading == "nakagami") return FadingModel::nakagami(c.m_shape, c.mean_power);
    throw ValidationError("unknown fading '" + c.fading + "'");
}

LinkSetup make_link(const RunConfig& c) {
    LinkSetup link{make_source(c), make_fading(c), c.deadline, c.theta};
    link.validate();
    return link;
}

RatePolicy make_policy(const RunConfig& c) {
    if (c.policy == "fixed") {
        detail::require(c.eps > 0.0 && c.eps < 1.0, "outage probability must lie in (0, 1)");
        return RatePolicy::fixed(c.eps);
    }
    if (c.policy == "optimal") return RatePolicy::optimal();
    throw ValidationError("unknown policy '" + c.policy + "'");
}

Table run_ee(const RunConfig& c) {
    const LinkSetup link = make_link(c);
    const RatePolicy policy = make_policy(c);
    EeResult result;
    if (policy.regime == RateRegime::FixedOutage) {
        result = ee_fixed_outage(link, policy.eps);
    } else {
        result = ee_optimal_rate(link);
        const std::vector<double> stencil{1e-4, 1e-3, 1e-2};
        result.s0 = slope_numeric(curve(link, policy, stencil)).s0;
    }
    Table t;
    t.columns = {"source", "regime", "eb_min", "eb_min_db", "s0", "eps_star", "a"};
    t.rows.push_back({Cell::of_text(std::string(to_string(link.source.kind))),
                      Cell::of_text(std::string(to_string(result.regime))), Cell::of(result.eb_min),
                      Cell::db(result.eb_min_db()), Cell::of(result.s0), Cell::of(result.eps_star),
                      Cell::of(result.a_coeff)});
    return t;
}

Table run_curve(const RunConfig& c) {
    const LinkSetup link = make_link(c);
    const RatePolicy policy = make_policy(c);
    const std::vector<double> grid = parse_snr_grid(c.snr_grid);
    Table t;
    t.columns = {"snr", "r_avg", "eb_db"};
    for (const CurvePoint& p : curve(link, policy, grid, thread_budget())) {
        t.rows.push_back({Cell::of(p.snr), Cell::of(p.r_avg), Cell::db(p.eb_db)});
    }
    return t;
}

Table run_optrate(const RunConfig& c) {
    const LinkSetup link = make_link(c);
    const std::vector<double> grid = parse_snr_grid(c.snr_grid);
    std::vector<OptimalRatePoint> points(grid.size());
    parallel_for(grid.size(), thread_budget(), [&](std::size_t i) { points[i] = optimal_rate_at_snr(link, grid[i]); });
    Table t;
    t.columns = {"snr", "rate", "outage", "r_avg"};
    for (std::size_t i = 0; i < grid.size(); ++i) {
        t.rows.push_back({Cell::of(grid[i]), Cell::of(points[i].rate), Cell::of(points[i].outage),
                          Cell::of(points[i].r_avg)});
    }
    return t;
}

HarqScheme make_scheme(const RunConfig& c) {
    if (c.scheme == "cc") return HarqScheme::ChaseCombining;
    if (c.scheme == "ir") return HarqScheme::IncrementalRedundancy;
    throw ValidationError("unknown scheme '" + c.scheme + "'");
}

Table run_simulate(const RunConfig& c) {
    SimSpec spec;
    spec.scheme = make_scheme(c);
    spec.model = make_fading(c);
    spec.snr = c.snr;
    spec.deadline = c.deadline;
    spec.n_samples = c.samples;
    spec.seed = c.seed;
    spec.theta = c.theta;
    detail::require(c.deadline >= 1, "deadline M must be at least 1");
    detail::require(c.snr >= 0.0, "snr must be nonnegative");
    if (c.rate) {
        spec.rate = *c.rate;
    } else {
        detail::require(c.eps > 0.0 && c.eps < 1.0, "outage probability must lie in (0, 1)");
        spec.rate = rate_for_threshold(sum_quantile(spec.model, c.deadline, c.eps), c.snr);
    }
    spec.validate();

    std::vector<double> analytic(static_cast<std::size_t>(c.deadline), std::nan(""));
    double analytic_mu = std::nan("");
    if (spec.scheme == HarqScheme::ChaseCombining) {
        const double threshold = spec.rate == 0.0 ? 0.0
                                                  : std::expm1(spec.rate * std::numbers::ln2) / spec.snr;
        const TransmissionStats stats = pmf_from_threshold(spec.model, spec.deadline, threshold);
        analytic = stats.pmf;
        if (stats.outage < 1.0) analytic_mu = moments_total_time(stats).mu;
    }

    const SimResult result = simulate(spec);
    Table t;
    t.columns = {"t", "pmf_analytic", "pmf_empirical", "stderr"};
    for (int i = 0; i < c.deadline; ++i) {
        const auto k = static_cast<std::size_t>(i);
        t.rows.push_back({Cell::of(i + 1), Cell::of(analytic[k]), Cell::of(result.empirical_pmf[k]),
                          Cell::of(result.pmf_stderr[k])});
    }
    t.summary["rate"] = json_number(spec.rate);
    t.summary["outage_rate"] = json_number(result.outage_rate);
    t.summary["outage_stderr"] = json_number(result.outage_stderr);
    t.summary["mu_hat"] = json_number(result.mu_hat);
    t.summary["mu_stderr"] = json_number(result.mu_stderr);
    t.summary["mu_analytic"] = json_number(analytic_mu);
    t.summary["sigma2_hat"] = json_number(result.sigma2_hat);
    t.summary["sigma2_stderr"] = json_number(result.sigma2_stderr);
    t.summary["r_avg_hat"] = json_number(result.r_avg_hat.value_or(std::nan("")));
    t.summary["r_avg_stderr"] = json_number(result.r_avg_stderr.value_or(std::nan("")));
    return t;
}

Table run_queue(const RunConfig& c) {
    QueueSpec spec;
    spec.link = make_link(c);
    spec.snr = c.snr;
    spec.rate = c.rate;
    spec.eps = c.eps;
    spec.load = c.load;
    spec.n_blocks = c.blocks;
    spec.seed = c.seed;
    if (c.abandon == "requeue") {
        spec.abandon = AbandonPolicy::Requeue;
    } else if (c.abandon == "drop") {
        spec.abandon = AbandonPolicy::Drop;
    } else {
        throw ValidationError("unknown abandon policy '" + c.abandon + "'");
    }

    const QueueTrace trace = simulate_queue(spec);
    Table t;
    t.columns = {"q", "overflow_prob"};
    for (std::size_t i = 0; i < trace.thresholds.size(); ++i) {
        t.rows.push_back({Cell::of(trace.thresholds[i]), Cell::of(trace.overflow_prob[i])});
    }
    t.summary["theta_hat"] = json_number(trace.theta_hat);
    t.summary["fit_r2"] = json_number(trace.fit_r2);
    t.summary["fit_window"] = {json_number(trace.fit_lo), json_number(trace.fit_hi)};
    t.summary["varsigma_hat"] = json_number(trace.varsigma_hat);
    t.summary["rate"] = json_number(trace.rate);
    t.summary["arrival_rate_param"] = json_number(trace.arrival_rate_param);
    t.summary["mean_arrival"] = json_number(trace.mean_arrival);
    t.summary["mean_service"] = json_number(trace.mean_service);
    t.summary["arrived_bits"] = json_number(trace.arrived_bits);
    t.summary["delivered_bits"] = json_number(trace.delivered_bits);
    t.summary["abandoned_bits"] = json_number(trace.abandoned_bits);
    t.summary["delivered_messages"] = trace.delivered_messages;
    t.summary["abandoned_messages"] = trace.abandoned_messages;
    return t;
}

std::string serialize(const RunConfig& c, const Table& t) {
    if (c.format == "json") {
        json doc;
        doc["version"] = kVersion;
        doc["command"] = c.command;
        doc["config"] = config_to_json(c);
        doc["columns"] = t.columns;
        json rows = json::array();
        for (const auto& row : t.rows) {
            json r = json::object();
            for (std::size_t i = 0; i < row.size(); ++i) r[t.columns[i]] = json_cell(row[i]);
            rows.push_back(std::move(r));
        }
        doc["rows"] = std::move(rows);
        if (!t.summary.empty()) doc["summary"] = t.summary;
        return doc.dump(2) + "\n";
    }
    std::string text;
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
        text += (i ? "," : "") + t.columns[i];
    }
    text += "\n";
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            text += (i ? "," : "") + csv_cell(row[i]);
        }
        text += "\n";
    }
    return text;
}

} // namespace

std::vector<double> parse_snr_grid(const std::string& spec) {
    std::vector<std::string> parts;
    std::stringstream stream(spec);
    for (std::string item; std::getline(stream, item, ':');) parts.push_back(item);
    detail::require(parts.size() == 3 || (parts.size() == 4 && (parts[3] == "log" || parts[3] == "lin")),
                    "snr grid must look like lo:hi:n or lo:hi:n:lin");
    double lo = 0.0;
    double hi = 0.0;
    int n = 0;
    try {
        std::size_t used = 0;
        lo = std::stod(parts[0], &used);
        detail::require(used == parts[0].size(), "bad snr grid lower bound");
        hi = std::stod(parts[1], &used);
        detail::require(used == parts[1].size(), "bad snr grid upper bound");
        n = std::stoi(parts[2], &used);
        detail::require(used == parts[2].size(), "bad snr grid point count");
    } catch (const std::logic_error& e) {
        if (dynamic_cast<const ValidationError*>(&e) != nullptr) throw;
        throw ValidationError("snr grid '" + spec + "' is not numeric");
    }
    if (parts.size() == 4 && parts[3] == "lin") {
        detail::require(lo > 0.0 && hi >= lo && n >= 1, "linear snr grid needs 0 < lo <= hi and n >= 1");
        std::vector<double> grid(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) grid[static_cast<std::size_t>(i)] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
        return grid;
    }
    return log_grid(lo, hi, n);
}

std::string render(const RunConfig& config) {
    detail::require(config.format == "csv" || config.format == "json", "format must be csv or json");
    Table table;
    if (config.command == "ee") {
        table = run_ee(config);
    } else if (config.command == "curve") {
        table = run_curve(config);
    } else if (config.command == "optrate") {
        table = run_optrate(config);
    } else if (config.command == "simulate") {
        table = run_simulate(config);
    } else if (config.command == "queue") {
        table = run_queue(config);
    } else {
        throw ValidationError("unknown command '" + config.command +
                              "' (expected ee, curve, optrate, simulate or queue)");
    }
    return serialize(config, table);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig config;

    // The config file supplies defaults; flags parsed afterwards override it.
    for (std::size_t i = 0; i < args.size(); ++i) {
        std::string path;
        if (args[i] == "--config" && i + 1 < args.size()) {
            path = args[i + 1];
        } else if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
        } else {
            continue;
        }
        std::ifstream file(path);
        if (!file) {
            err << "error: cannot open config file '" << path << "'\n";
            return kValidationError;
        }
        try {
            apply_config_file(config, json::parse(file));
        } catch (const json::parse_error& e) {
            err << "error: config file '" << path << "' is not valid JSON: " << e.what() << "\n";
            return kValidationError;
        } catch (const ValidationError& e) {
            err << "error: " << e.what() << "\n";
            return kValidationError;
        }
    }

    CLI::App app{"Energy efficiency of HARQ-CC links under statistical queuing constraints", "harq-ee"};
    app.set_version_flag("--version", kVersion);
    std::string config_path;
    app.add_option("--config", config_path, "JSON file with default parameters (flags override)");
    app.add_option("--source", config.source, "arrival source")
        ->check(CLI::IsMember({"constant", "dmarkov", "fluid", "mmps"}));
    app.add_option("--p11", config.p11, "discrete source: OFF stay probability");
    app.add_option("--p22", config.p22, "discrete source: ON stay probability");
    app.add_option("--alpha", config.alpha, "fluid/MMPS: OFF -> ON rate per block");
    app.add_option("--beta", config.beta, "fluid/MMPS: ON -> OFF rate per block");
    app.add_option("--fading", config.fading, "fading family")->check(CLI::IsMember({"rayleigh", "nakagami"}));
    app.add_option("--mean-power", config.mean_power, "E{z}");
    app.add_option("--m-shape", config.m_shape, "Nakagami shape m");
    app.add_option("--M", config.deadline, "HARQ deadline (maximum rounds)");
    app.add_option("--eps", config.eps, "outage probability target");
    app.add_option("--theta", config.theta, "QoS exponent");
    app.add_option("--snr-grid", config.snr_grid, "lo:hi:n (log-spaced) or lo:hi:n:lin");
    app.add_option("--scheme", config.scheme, "HARQ scheme for simulate")->check(CLI::IsMember({"cc", "ir"}));
    app.add_option("--rate", config.rate, "explicit transmission rate R (bits/s/Hz)");
    app.add_option("--snr", config.snr, "snr for simulate/queue (linear)");
    app.add_option("--samples", config.samples, "Monte Carlo samples");
    app.add_option("--seed", config.seed, "random seed");
    app.add_option("--policy", config.policy, "rate policy")->check(CLI::IsMember({"fixed", "optimal"}));
    app.add_option("--out", config.out, "output file (default: standard output)");
    app.add_option("--format", config.format, "output format")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--blocks", config.blocks, "queue simulation length in blocks");
    app.add_option("--load", config.load, "arrival load factor in (0, 1]");
    app.add_option("--abandon", config.abandon, "deadline-missed bits: requeue or drop")
        ->check(CLI::IsMember({"requeue", "drop"}));

    for (const char* name : {"ee", "curve", "optrate", "simulate", "queue"}) {
        app.add_subcommand(name)->fallthrough();
    }
    app.require_subcommand(0, 1);

    std::vector<const char*> argv{"harq-ee"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForVersion&) {
        out << kVersion << "\n";
        return kOk;
    } catch (const CLI::Success&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kValidationError;
    }
    if (!app.get_subcommands().empty()) config.command = app.get_subcommands().front()->get_name();

    try {
        const std::string artifact = render(config);
        if (config.out.empty()) {
            out << artifact;
        } else {
            std::ofstream file(config.out, std::ios::binary);
            if (!file) {
                err << "error: cannot write '" << config.out << "'\n";
                return kValidationError;
            }
            file << artifact;
        }
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kValidationError;
    } catch (const NumericError& e) {
        err << "numeric failure: " << e.what() << "\n";
        return kNumericError;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return kInternalError;
    }
    return kOk;
}

} // namespace harq_ee::cli
