// stepcast: simulate | fit | forecast | evaluate | serve
//
// Every subcommand reads a key = value config (--config), applies --set
// overrides and path flags on top, and writes the resolved configuration
// next to its outputs.

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <regex>

#include <CLI11.hpp>

#include "stepcast/service_http.hpp"
#include "stepcast/stepcast.hpp"

namespace fs = std::filesystem;
using namespace stepcast;
using io::json;

namespace {

struct CommonArgs {
    std::string config;
    std::vector<std::string> sets;
    std::map<std::string, std::string> flags;  // config key -> value from a dedicated flag
};

void add_common(CLI::App* cmd, CommonArgs& args, const std::vector<std::pair<std::string, std::string>>& path_flags) {
    cmd->add_option("-c,--config", args.config, "key = value config file")->check(CLI::ExistingFile);
    cmd->add_option("-s,--set", args.sets, "override a config key, e.g. --set seed=7");
    cmd->add_option_function<std::string>(
        "--seed", [&args](const std::string& v) { args.flags["seed"] = v; }, "master seed");
    for (const auto& [flag, key] : path_flags) {
        const std::string k = key;
        cmd->add_option_function<std::string>(
            "--" + flag, [&args, k](const std::string& v) { args.flags[k] = v; }, "sets " + k);
    }
}

RunConfig resolve(const CommonArgs& args) {
    RunConfig cfg = args.config.empty() ? RunConfig{} : RunConfig::from_file(args.config);
    for (const auto& s : args.sets) cfg.set_assignment(s);
    for (const auto& [k, v] : args.flags) cfg.set(k, v);
    return cfg;
}

fs::path out_dir(const RunConfig& cfg) {
    fs::path p = cfg.text("path.out");
    fs::create_directories(p);
    return p;
}

void write_snapshot(const RunConfig& cfg, const fs::path& dir, const std::string& cmd) {
    std::ofstream out(dir / (cmd + ".config"));
    out << "# stepcast " << cmd << '\n' << cfg.snapshot();
}

std::uint64_t seed_of(const RunConfig& cfg) { return static_cast<std::uint64_t>(cfg.integer("seed")); }

// Independent seeds for the parts of one command.
std::uint64_t derived_seed(std::uint64_t seed, std::uint64_t tag) { return Rng::substream(seed, tag)(); }

Side side_of(const RunConfig& cfg) { return parse_side(cfg.text("market.side")); }

std::vector<market::MarketDay> load_days(const RunConfig& cfg, const std::string& key = "path.bids") {
    const double cap = cfg.real("market.cap");
    return market::build_all_days(market::read_bids_file(cfg.text(key), cap), cap);
}

std::size_t train_length(const RunConfig& cfg, std::size_t available) {
    const std::size_t k = cfg.count("fit.train");
    if (k == 0) return available;
    if (k < 2 || k > available) {
        throw ValidationError("fit.train = " + std::to_string(k) + " but the data has " + std::to_string(available) +
                              " curves (need 2..N)");
    }
    return k;
}

// ---- simulate

int cmd_simulate(const RunConfig& cfg) {
    const auto dir = out_dir(cfg);
    const std::uint64_t seed = seed_of(cfg);
    const std::string model = cfg.text("model");
    const std::size_t T = cfg.count("sim.T");
    json manifest = {{"schema_version", io::kSchemaVersion}, {"command", "simulate"}, {"model", model}, {"seed", seed}};
    CurveSeries series;
    if (model == "wellspecified") {
        const ParamVector p(cfg.real("sim.theta"), cfg.real("sim.p"), cfg.real("sim.alpha"), cfg.real("sim.beta"));
        const EngineConfig e{cfg.count("sim.n"), T, seed};
        series = synthetic::generate_wellspecified(p, e);
        manifest["params"] = io::to_json(p);
        manifest["n"] = e.n;
    } else {
        synthetic::MisspecConfig m;
        m.a = cfg.real("sim.a");
        m.noise_sample_size = cfg.count("sim.noise_size");
        m.noise_alpha = cfg.real("sim.noise_alpha");
        m.noise_beta = cfg.real("sim.noise_beta");
        m.horizon = T;
        m.seed = seed;
        series = synthetic::generate_misspecified(m);
        manifest["a"] = m.a;
        manifest["noise"] = {{"size", m.noise_sample_size}, {"alpha", m.noise_alpha}, {"beta", m.noise_beta}};
    }
    series.dates = io::daily_dates(cfg.text("sim.start_date"), series.size());
    manifest["T"] = T;
    manifest["curves"] = series.size();
    manifest["summary"] = io::to_json(summarize(series, cfg.count("grid_size")));
    io::write_json_file((dir / "series.json").string(), io::to_json(series));
    io::write_json_file((dir / "manifest.json").string(), manifest);
    write_snapshot(cfg, dir, "simulate");
    std::cout << "wrote " << series.size() << " curves to " << (dir / "series.json").string() << '\n';
    return 0;
}

// ---- fit

struct FitInput {
    CurveSeries series;
    json source;
    std::string chain_name = "chain.ndjson";
};

FitInput load_fit_input(const RunConfig& cfg) {
    FitInput in;
    if (cfg.has("path.data")) {
        in.series = io::series_from_json(io::read_json_file(cfg.text("path.data")));
        in.source = {{"data", cfg.text("path.data")}};
    } else if (cfg.has("path.bids")) {
        const Side side = side_of(cfg);
        const auto days = load_days(cfg);
        in.series = market::normalized_series(days, side).curves;
        in.source = {{"bids", cfg.text("path.bids")}, {"side", to_string(side)}};
        in.chain_name = std::string("chain_") + to_string(side) + ".ndjson";
    } else {
        throw ValidationError("fit needs path.data (curve series) or path.bids (bid table)");
    }
    return in;
}

int cmd_fit(const RunConfig& cfg) {
    FitInput in = load_fit_input(cfg);
    const std::size_t train = train_length(cfg, in.series.size());
    CurveSeries data = in.series.head(train);
    const std::size_t grid = cfg.count("grid_size");
    const std::size_t n = cfg.count("fit.n") > 0 ? cfg.count("fit.n") : calibrate_n(data, cfg.real("fit.tol"));
    if (cfg.flag("fit.lattice")) data = quantize(data, n);

    std::optional<Thresholds> eps;
    if (cfg.has("abc.eps")) {
        const auto e = cfg.reals("abc.eps");
        eps = Thresholds{};
        eps->eps1 = e[0];
        eps->eps2 = e[1];
        eps->eps3 = e[2];
    }
    const auto c = cfg.reals("abc.c");
    ChainOptions opt;
    opt.iterations = cfg.count("abc.iterations");
    opt.max_bootstrap_attempts = cfg.count("abc.max_bootstrap");
    opt.seed = seed_of(cfg);

    const auto dir = out_dir(cfg);
    write_snapshot(cfg, dir, "fit");
    ChainRecord rec;
    try {
        rec = run_chain(opt, cfg.prior_spec(), cfg.proposal_spec(), data, n, eps, {c[0], c[1], c[2]}, grid);
    } catch (const BootstrapFailure& e) {
        std::cerr << "fit: " << e.what() << "\n"
                  << "fit: loosen abc.c / abc.eps or raise abc.max_bootstrap\n";
        return 3;
    }
    json extra = {{"n", n}, {"grid_size", grid}, {"train", train}, {"source", in.source}};
    extra["lattice"] = cfg.flag("fit.lattice");
    if (!data.dates.empty()) extra["last_date"] = data.dates.back();
    extra["data_summary"] = io::to_json(summarize(data, grid));
    const auto path = dir / in.chain_name;
    std::ofstream out(path);
    io::write_chain_ndjson(out, rec, extra);

    const auto& d = rec.diagnostics;
    std::cout << "n = " << n << ", iterations = " << rec.samples.size() << ", bootstrap attempts = "
              << d.bootstrap_attempts << '\n'
              << "accepted " << d.accepted << ", mh_rejected " << d.mh_rejected << ", gate rejections "
              << d.gate_rejected[0] << '/' << d.gate_rejected[1] << '/' << d.gate_rejected[2]
              << ", acceptance rate " << rec.acceptance_rate << '\n'
              << "wrote " << path.string() << '\n';
    return 0;
}

// ---- forecast

Reconstruction pick_reconstruction(const RunConfig& cfg, const StepCurve& last, std::size_t n, std::string& note) {
    const auto mode = cfg.text("forecast.reconstruction");
    if (mode == "exact") return Reconstruction::exact;
    if (mode == "quantile") return Reconstruction::quantile;
    try {
        (void)reconstruct_particles(last, n);
        return Reconstruction::exact;
    } catch (const ArgumentError& e) {
        note = e.what();
        return Reconstruction::quantile;
    }
}

ForecastOptions forecast_options(const RunConfig& cfg, std::size_t n, std::uint64_t seed) {
    ForecastOptions o;
    o.horizons = cfg.counts("forecast.horizons");
    o.members = cfg.count("forecast.members");
    o.n = n;
    o.grid_size = cfg.count("grid_size");
    o.coverage = cfg.real("forecast.coverage");
    o.seed = seed;
    o.validate();
    return o;
}

struct LoadedDraws {
    std::vector<ParamVector> draws;
    std::size_t n = 0;
    std::size_t train = 0;
};

LoadedDraws load_draws(const RunConfig& cfg, const std::string& key) {
    std::ifstream in(cfg.text(key));
    if (!in) throw ValidationError("cannot open chain " + cfg.text(key));
    const auto chain = io::read_chain_ndjson(in);
    LoadedDraws out;
    out.n = chain.header.value("n", std::size_t{0});
    if (cfg.count("fit.n") > 0) {
        if (out.n && out.n != cfg.count("fit.n")) {
            throw ValidationError("fit.n = " + cfg.raw("fit.n") + " disagrees with n = " + std::to_string(out.n) +
                                  " recorded in the chain");
        }
        out.n = cfg.count("fit.n");
    }
    if (out.n == 0) throw ValidationError("chain header has no n; set fit.n");
    out.train = chain.header.value("train", std::size_t{0});
    out.draws = chain.record.draws(cfg.count("forecast.burn_in"), cfg.count("forecast.thin"));
    if (out.draws.empty()) throw ValidationError("forecast.burn_in leaves no chain samples");
    return out;
}

int forecast_series(const RunConfig& cfg, const fs::path& dir) {
    const auto series = io::series_from_json(io::read_json_file(cfg.text("path.data")));
    const auto chain = load_draws(cfg, "path.chain");
    const std::size_t train = cfg.count("fit.train") > 0 ? train_length(cfg, series.size())
                              : chain.train > 0       ? std::min(chain.train, series.size())
                                                      : series.size();
    const std::size_t origin = train - 1;
    const StepCurve& last = series[origin];

    std::string note;
    ForecastOptions o = forecast_options(cfg, chain.n, derived_seed(seed_of(cfg), 1));
    o.reconstruction = pick_reconstruction(cfg, last, chain.n, note);
    if (!note.empty()) std::cerr << "forecast: exact reconstruction failed (" << note << "); using quantile\n";
    const bool members = cfg.flag("forecast.include_members");

    for (const auto& e : forecast(last, chain.draws, o)) {
        json j = io::to_json(e, members);
        j["origin_index"] = origin;
        j["n"] = chain.n;
        j["reconstruction"] = o.reconstruction == Reconstruction::exact ? "exact" : "quantile";
        if (!series.dates.empty()) {
            j["origin_date"] = series.dates[origin];
            j["target_date"] = add_days(series.dates[origin], static_cast<int>(e.horizon));
        }
        const auto stem = "forecast_h" + std::to_string(e.horizon);
        io::write_json_file((dir / (stem + ".json")).string(), j);
        std::ofstream csv(dir / ("bands_h" + std::to_string(e.horizon) + ".csv"));
        io::write_bands_csv(csv, e);
        std::cout << "h = " << e.horizon << ": mean band width " << mean_band_width(e) << '\n';
    }
    return 0;
}

int forecast_market(const RunConfig& cfg, const fs::path& dir) {
    const auto all_days = load_days(cfg);
    const std::size_t train = train_length(cfg, all_days.size());
    const std::vector<market::MarketDay> days(all_days.begin(), all_days.begin() + static_cast<long>(train));
    const std::string origin_date = days.back().date;
    const std::uint64_t seed = seed_of(cfg);
    const double cap = cfg.real("market.cap");
    const auto horizons = cfg.counts("forecast.horizons");
    const std::size_t max_h = *std::max_element(horizons.begin(), horizons.end());

    ar::ARModelSpec spec;
    spec.coef_prior = cfg.real("ar.coef_prior");
    spec.coef_prior_scale =
        cfg.text("ar.coef_prior_scale") == "precision" ? ar::NormalScale::precision : ar::NormalScale::variance;
    spec.var_shape = cfg.real("ar.var_shape");
    spec.var_scale = cfg.real("ar.var_scale");
    spec.chain_length = cfg.count("ar.chain_length");
    spec.burn_in = cfg.count("ar.burn_in");

    std::map<std::size_t, io::MarketEnsemble> bundle;
    for (auto h : horizons) bundle[h] = {h, add_days(origin_date, static_cast<int>(h)), {}};
    std::map<std::size_t, std::vector<AuctionCurve>> demand_members;

    for (Side side : {Side::demand, Side::supply}) {
        const std::uint64_t tag = side == Side::demand ? 10 : 20;
        const auto ss = market::normalized_series(days, side);
        const auto chain = load_draws(cfg, side == Side::demand ? "path.demand_chain" : "path.supply_chain");
        const StepCurve& last = ss.curves.back();

        std::string note;
        ForecastOptions o = forecast_options(cfg, chain.n, derived_seed(seed, tag + 1));
        o.reconstruction = pick_reconstruction(cfg, last, chain.n, note);
        const auto ensembles = forecast(last, chain.draws, o);

        spec.seed = derived_seed(seed, tag + 2);
        const auto fit = ar::fit_levels(ss.R, ar::Transform::log_diff, spec);
        Rng ar_rng = Rng::substream(seed, tag + 3);
        const auto paths = ar::forecast_levels(fit, max_h, o.members, ar_rng);
        const std::string l_key = side == Side::demand ? "market.L_demand" : "market.L_supply";
        const double L = cfg.has(l_key) ? cfg.real(l_key) : ss.L.back();
        const double tail = ss.tail_ratio.back();
        io::write_json_file((dir / (std::string("ar_") + to_string(side) + ".json")).string(), io::to_json(fit));

        Rng den_rng = Rng::substream(seed, tag + 4);
        for (const auto& e : ensembles) {
            std::vector<double> r_draws;
            r_draws.reserve(paths.size());
            for (const auto& p : paths) r_draws.push_back(p[e.horizon - 1]);
            const auto den = market::denormalize_forecast(e.members, side, L, r_draws, tail, den_rng, cap);

            json j = io::to_json(e, cfg.flag("forecast.include_members"));
            j["side"] = to_string(side);
            j["n"] = chain.n;
            j["reconstruction"] = o.reconstruction == Reconstruction::exact ? "exact" : "quantile";
            j["origin_date"] = origin_date;
            j["target_date"] = bundle[e.horizon].date;
            j["L"] = L;
            j["tail_ratio"] = tail;
            j["R_resampled"] = den.resampled;
            io::write_json_file(
                (dir / ("forecast_" + std::string(to_string(side)) + "_h" + std::to_string(e.horizon) + ".json"))
                    .string(),
                j);
            if (side == Side::demand) {
                demand_members[e.horizon] = den.members;
            } else {
                auto& target = bundle[e.horizon].members;
                const auto& dm = demand_members.at(e.horizon);
                for (std::size_t i = 0; i < den.members.size(); ++i) target.push_back({dm[i], den.members[i]});
            }
        }
        if (!note.empty()) std::cerr << "forecast: " << to_string(side) << " side uses quantile particles (" << note << ")\n";
    }

    std::vector<io::MarketEnsemble> out;
    for (auto& [h, e] : bundle) out.push_back(std::move(e));
    const TieRule rule = parse_tie_rule(cfg.text("market.tie_rule"));
    io::write_json_file((dir / "market_ensemble.json").string(), io::market_bundle_to_json(out, rule));
    for (const auto& e : out) {
        const auto prices = service::clearing_prices(e, std::nullopt, rule);
        const auto s = service::summarize_prices(prices, e.members.size(), cap);
        std::cout << "h = " << e.horizon << " (" << e.date << "): mean clearing price "
                  << (s.mean ? std::to_string(*s.mean) : std::string("n/a")) << ", " << (e.members.size() - prices.size())
                  << " members without a crossing\n";
    }
    return 0;
}

int cmd_forecast(const RunConfig& cfg) {
    const auto dir = out_dir(cfg);
    write_snapshot(cfg, dir, "forecast");
    if (cfg.has("path.chain")) {
        if (!cfg.has("path.data")) throw ValidationError("forecast needs path.data with path.chain");
        return forecast_series(cfg, dir);
    }
    if (cfg.has("path.demand_chain") && cfg.has("path.supply_chain") && cfg.has("path.bids")) {
        return forecast_market(cfg, dir);
    }
    throw ValidationError("forecast needs path.chain + path.data, or path.demand_chain + path.supply_chain + path.bids");
}

// ---- evaluate

std::vector<std::pair<std::size_t, fs::path>> forecast_files(const fs::path& dir, const std::string& prefix) {
    const std::regex re(prefix + "_h([0-9]+)\\.json");
    std::vector<std::pair<std::size_t, fs::path>> out;
    for (const auto& entry : fs::directory_iterator(dir)) {
        std::smatch m;
        const auto name = entry.path().filename().string();
        if (std::regex_match(name, m, re)) out.emplace_back(std::stoul(m[1].str()), entry.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

ForecastEnsemble load_checked(const fs::path& p) {
    const auto e = io::ensemble_from_json(io::read_json_file(p.string()));
    if (!point_estimate_consistent(e)) {
        throw ValidationError(p.string() + ": stored point estimate is not the member closest to the mean");
    }
    return e;
}

std::vector<MetricRow> evaluate_series(const RunConfig& cfg, const fs::path& fdir) {
    const auto truth = io::series_from_json(io::read_json_file(cfg.text("path.truth")));
    const auto files = forecast_files(fdir, "forecast");
    if (files.empty()) throw ValidationError("no forecast_h*.json in " + fdir.string());
    std::vector<MetricRow> rows;
    for (const auto& [h, path] : files) {
        const json j = io::read_json_file(path.string());
        const auto e = load_checked(path);
        std::size_t idx = 0;
        std::string date;
        if (j.contains("target_date") && !truth.dates.empty()) {
            date = j["target_date"].get<std::string>();
            const auto it = std::find(truth.dates.begin(), truth.dates.end(), date);
            if (it == truth.dates.end()) throw ValidationError("date misalignment: truth has no curve for " + date);
            idx = static_cast<std::size_t>(it - truth.dates.begin());
        } else {
            idx = j.at("origin_index").get<std::size_t>() + h;
            if (idx >= truth.size()) {
                throw ValidationError("date misalignment: truth ends before index " + std::to_string(idx));
            }
        }
        const auto s = score_curve(e, truth[idx]);
        rows.push_back({h, "curve", date, s.l2, s.l2, s.coverage, s.band_width, std::nullopt, std::nullopt});
    }
    return rows;
}

std::vector<MetricRow> evaluate_market(const RunConfig& cfg, const fs::path& fdir) {
    const auto days = load_days(cfg, "path.truth");
    auto day_at = [&](const std::string& date) -> const market::MarketDay& {
        for (const auto& d : days) {
            if (d.date == date) return d;
        }
        throw ValidationError("date misalignment: truth has no auction on " + date);
    };
    const auto bundle = io::market_bundle_from_json(io::read_json_file((fdir / "market_ensemble.json").string()));
    const double cap = cfg.real("market.cap");
    std::vector<MetricRow> rows;
    for (Side side : {Side::demand, Side::supply}) {
        for (const auto& [h, path] : forecast_files(fdir, std::string("forecast_") + to_string(side))) {
            const json j = io::read_json_file(path.string());
            const auto e = load_checked(path);
            const std::string date = j.at("target_date").get<std::string>();
            const auto& day = day_at(date);
            const auto truth_norm = market::normalize(day.curve(side));
            const auto s = score_curve(e, truth_norm.curve);

            const io::MarketEnsemble* me = nullptr;
            for (const auto& x : bundle.ensembles) {
                if (x.horizon == h) me = &x;
            }
            if (!me || me->date != date) throw ValidationError("market_ensemble.json does not match " + path.string());
            const auto& point = side == Side::demand ? me->members.at(e.point_index).demand
                                                     : me->members.at(e.point_index).supply;
            const auto ends = day.ends(side);
            MetricRow row{h, to_string(side), date, s.l2, auction_l2(point, day.curve(side), ends.L, ends.R),
                          s.coverage, s.band_width, std::nullopt, std::nullopt};
            const auto prices = service::clearing_prices(*me, std::nullopt, bundle.tie_rule);
            const auto summary = service::summarize_prices(prices, me->members.size(), cap);
            row.price_forecast = summary.mean;
            try {
                row.price_truth = market::clearing_price(day, bundle.tie_rule).price;
            } catch (const NoIntersectionError&) {
            }
            rows.push_back(row);
        }
    }
    if (rows.empty()) throw ValidationError("no forecast_{demand,supply}_h*.json in " + fdir.string());
    return rows;
}

int cmd_evaluate(const RunConfig& cfg) {
    if (!cfg.has("path.forecasts") || !cfg.has("path.truth")) {
        throw ValidationError("evaluate needs path.forecasts and path.truth");
    }
    const fs::path fdir = cfg.text("path.forecasts");
    const bool market_mode = fs::exists(fdir / "market_ensemble.json");
    const auto rows = market_mode ? evaluate_market(cfg, fdir) : evaluate_series(cfg, fdir);
    const auto dir = out_dir(cfg);
    write_snapshot(cfg, dir, "evaluate");
    {
        std::ofstream out(dir / "metrics.csv");
        write_metrics_csv(out, rows);
    }
    json summary = {{"schema_version", io::kSchemaVersion}, {"rows", rows.size()}};
    std::map<std::size_t, std::vector<double>> l2_by_h;
    std::map<std::size_t, std::vector<double>> price_err_by_h;
    std::set<std::pair<std::size_t, std::string>> priced;
    for (const auto& r : rows) {
        l2_by_h[r.horizon].push_back(r.l2_normalized);
        // One price per horizon and target date, not per side.
        if (r.price_forecast && r.price_truth && priced.insert({r.horizon, r.target_date}).second) {
            price_err_by_h[r.horizon].push_back(*r.price_forecast - *r.price_truth);
        }
    }
    json per_h = json::array();
    for (const auto& [h, v] : l2_by_h) {
        double m = 0.0;
        for (double x : v) m += x;
        json row = {{"horizon", h}, {"mean_l2_normalized", m / static_cast<double>(v.size())}};
        if (price_err_by_h.count(h)) row["price_rmse"] = rmse(price_err_by_h[h]);
        per_h.push_back(row);
        std::cout << "h = " << h << ": mean L2 " << m / static_cast<double>(v.size());
        if (price_err_by_h.count(h)) std::cout << ", price RMSE " << rmse(price_err_by_h[h]);
        std::cout << '\n';
    }
    summary["horizons"] = per_h;
    io::write_json_file((dir / "metrics_summary.json").string(), summary);
    return 0;
}

// ---- serve

httplib::Server* g_server = nullptr;

int cmd_serve(const RunConfig& cfg) {
    service::ServiceOptions opt;
    opt.coverage = cfg.real("serve.coverage");
    service::WhatIfService svc;
    if (cfg.has("path.artifacts")) {
        svc = service::WhatIfService(io::market_bundle_from_json(io::read_json_file(cfg.text("path.artifacts"))), opt);
    } else {
        std::cerr << "serve: no path.artifacts; data endpoints will answer 409\n";
    }
    auto server = service::make_server(svc);
    const auto host = cfg.text("serve.host");
    int port = static_cast<int>(cfg.integer("serve.port"));
    if (port == 0) {
        port = server->bind_to_any_port(host);
    } else if (!server->bind_to_port(host, port)) {
        port = -1;
    }
    if (port <= 0) {
        std::cerr << "serve: cannot bind " << host << '\n';
        return 1;
    }
    g_server = server.get();
    std::signal(SIGINT, [](int) { g_server->stop(); });
    std::signal(SIGTERM, [](int) { g_server->stop(); });
    std::cout << "listening on http://" << host << ':' << port << std::endl;
    server->listen_after_bind();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Step-curve forecasting with MCMC-ABC and what-if auction clearing"};
    app.require_subcommand(1);
    CommonArgs args;

    auto* sim = app.add_subcommand("simulate", "generate a synthetic curve series");
    add_common(sim, args, {{"out", "path.out"}, {"model", "model"}});

    auto* fit = app.add_subcommand("fit", "run the MCMC-ABC sampler on a curve series or one side of a bid table");
    add_common(fit, args, {{"data", "path.data"}, {"bids", "path.bids"}, {"side", "market.side"}, {"out", "path.out"}});

    auto* fc = app.add_subcommand("forecast", "h-step-ahead ensembles from a fitted chain");
    add_common(fc, args,
               {{"data", "path.data"},
                {"chain", "path.chain"},
                {"bids", "path.bids"},
                {"demand-chain", "path.demand_chain"},
                {"supply-chain", "path.supply_chain"},
                {"out", "path.out"}});

    auto* ev = app.add_subcommand("evaluate", "score forecasts against realized curves");
    add_common(ev, args, {{"forecasts", "path.forecasts"}, {"truth", "path.truth"}, {"out", "path.out"}});

    auto* sv = app.add_subcommand("serve", "HTTP what-if service over a market ensemble");
    add_common(sv, args, {{"artifacts", "path.artifacts"}, {"port", "serve.port"}, {"host", "serve.host"}});

    auto* keys = app.add_subcommand("config", "print every config key with its default and meaning");

    CLI11_PARSE(app, argc, argv);
    try {
        if (keys->parsed()) {
            for (const auto& k : RunConfig::schema()) {
                std::cout << k.key << " = " << k.default_value << "\n    " << k.help << '\n';
            }
            return 0;
        }
        const RunConfig cfg = resolve(args);
        if (sim->parsed()) return cmd_simulate(cfg);
        if (fit->parsed()) return cmd_fit(cfg);
        if (fc->parsed()) return cmd_forecast(cfg);
        if (ev->parsed()) return cmd_evaluate(cfg);
        if (sv->parsed()) return cmd_serve(cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
