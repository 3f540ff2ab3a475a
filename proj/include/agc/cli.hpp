// Command-line front end. Subcommands: gen-weather, gen-data, train-sim,
// eval-sim, optimize {ega|sac}, bilevel, report, replay.
// Exit codes: 0 success, 1 validation/usage error, 2 runtime failure.
#pragma once

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "agc/config.hpp"
#include "agc/metrics.hpp"

#include "CLI11.hpp"

namespace agc {

namespace detail {

inline ExperimentConfig resolve_config(const std::string& config_path) {
    if (config_path.empty()) return ExperimentConfig{};
    return load_config(config_path);
}

inline std::uint64_t resolve_seed(bool seed_given, std::uint64_t cli_seed,
                                  const ExperimentConfig& cfg) {
    return seed_given ? cli_seed : cfg.seed;
}

}  // namespace detail

inline int cli_dispatch(const std::vector<std::string>& args) {
    CLI::App app{"Greenhouse control sandbox: reference world, learned twin simulator, "
                 "strategy optimizers, and the closed-loop bi-level deployment loop"};
    app.require_subcommand(1);

    std::string config_path;
    std::uint64_t seed = 0;
    bool seed_given = false;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "experiment config JSON ({} = all defaults)");
        sub->add_option("--seed", seed, "master seed")->each([&](const std::string&) {
            seed_given = true;
        });
    };

    // gen-weather
    auto* gw = app.add_subcommand("gen-weather", "generate a seeded hourly weather series");
    int gw_days = 60;
    std::string gw_profile, gw_out;
    gw->add_option("--days", gw_days, "episode length in days")->required();
    gw->add_option("--profile", gw_profile, "weather profile id");
    gw->add_option("--out", gw_out, "output JSON file")->required();
    add_common(gw);

    // gen-data
    auto* gd = app.add_subcommand("gen-data",
                                  "roll out seeded random strategies on the reference world");
    int gd_episodes = 0, gd_days = 60;
    std::string gd_out, gd_profile;
    gd->add_option("--episodes", gd_episodes, "number of episodes")->required();
    gd->add_option("--days", gd_days, "episode length in days")->required();
    gd->add_option("--profile", gd_profile, "weather profile id");
    gd->add_option("--out", gd_out, "output dataset directory")->required();
    add_common(gd);

    // train-sim
    auto* ts = app.add_subcommand("train-sim", "train the three-stage twin simulator");
    std::string ts_data, ts_out;
    ts->add_option("--data", ts_data, "training dataset directory")->required();
    ts->add_option("--out", ts_out, "output simulator bundle directory")->required();
    add_common(ts);

    // eval-sim
    auto* es = app.add_subcommand("eval-sim", "one-step R2 of a simulator on a test dataset");
    std::string es_sim, es_data, es_out;
    es->add_option("--sim", es_sim, "simulator bundle directory")->required();
    es->add_option("--data", es_data, "test dataset directory")->required();
    es->add_option("--out", es_out, "output R2 CSV")->required();
    add_common(es);

    // optimize {ega|sac}
    auto* opt = app.add_subcommand("optimize", "search for a control strategy");
    opt->require_subcommand(1);
    auto* oe = opt->add_subcommand("ega", "elitist genetic algorithm over a setpoint schedule");
    std::string oe_weather, oe_sim, oe_env = "twin", oe_out, oe_history;
    int oe_interval = 1, oe_block = 5, oe_generations = -1;
    oe->add_option("--weather", oe_weather, "weather series JSON")->required();
    oe->add_option("--env", oe_env, "fitness environment: twin|world")
        ->check(CLI::IsMember({"twin", "world"}));
    oe->add_option("--sim", oe_sim, "simulator bundle (required for --env twin)");
    oe->add_option("--out", oe_out, "output schedule JSON")->required();
    oe->add_option("--history", oe_history, "fitness history CSV");
    oe->add_option("--interval", oe_interval, "control interval, hours");
    oe->add_option("--day-block", oe_block, "days sharing one daily pattern");
    oe->add_option("--generations", oe_generations, "override generation count");
    add_common(oe);

    auto* os = opt->add_subcommand("sac", "soft actor-critic policy on the twin simulator");
    std::string os_weather, os_sim, os_out, os_curve;
    int os_horizon_days = 14, os_steps = -1;
    os->add_option("--weather", os_weather, "weather series JSON")->required();
    os->add_option("--sim", os_sim, "simulator bundle directory")->required();
    os->add_option("--out", os_out, "output policy bundle directory")->required();
    os->add_option("--curve", os_curve, "evaluation return curve CSV");
    os->add_option("--horizon-days", os_horizon_days, "episode length in days");
    os->add_option("--steps", os_steps, "override total environment steps");
    add_common(os);

    // bilevel
    auto* bl = app.add_subcommand("bilevel",
                                  "closed-loop run: re-optimize strategy and recalibrate the "
                                  "twin against the reference world");
    std::string bl_sim, bl_data, bl_weather, bl_out;
    bl->add_option("--sim", bl_sim, "initial simulator bundle")->required();
    bl->add_option("--data", bl_data, "initial dataset directory (replay source)")->required();
    bl->add_option("--weather", bl_weather, "weather series JSON")->required();
    bl->add_option("--out", bl_out, "output directory")->required();
    add_common(bl);

    // report
    auto* rp = app.add_subcommand("report", "render R2/economics/curve artifacts");
    std::string rp_r2, rp_truth, rp_sim, rp_control, rp_experiment, rp_out;
    rp->add_option("--r2", rp_r2, "R2 CSV from eval-sim")->required();
    rp->add_option("--truth", rp_truth, "ground-truth trajectory JSON")->required();
    rp->add_option("--sim-traj", rp_sim, "simulated trajectory JSON")->required();
    rp->add_option("--control", rp_control, "control-group dataset directory")->required();
    rp->add_option("--experiment", rp_experiment, "experimental-group dataset directory")
        ->required();
    rp->add_option("--out", rp_out, "output directory")->required();
    add_common(rp);

    // replay
    auto* rl = app.add_subcommand("replay",
                                  "recompute a trajectory's ledger from its logged actions");
    std::string rl_traj;
    rl->add_option("--trajectory", rl_traj, "trajectory JSON")->required();
    add_common(rl);

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("agc");
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        std::cerr << app.help() << "\n";
        return 1;
    }

    try {
        const ExperimentConfig cfg = detail::resolve_config(config_path);
        const std::uint64_t run_seed = detail::resolve_seed(seed_given, seed, cfg);

        if (gw->parsed()) {
            const std::string profile =
                gw_profile.empty() ? cfg.weather_profile : gw_profile;
            const WeatherSeries ws = generate_weather(gw_days, run_seed, profile);
            save_weather(ws, gw_out);
            std::printf("wrote %zu hourly records (%d days, profile %s) to %s\n", ws.size(),
                        gw_days, profile.c_str(), gw_out.c_str());
            return 0;
        }

        if (gd->parsed()) {
            const std::string profile =
                gd_profile.empty() ? cfg.weather_profile : gd_profile;
            const Dataset ds =
                generate_dataset(gd_episodes, gd_days, random_strategy_sampler(cfg.bounds),
                                 run_seed, cfg.world, cfg.econ, cfg.bounds, profile);
            save_dataset(ds, gd_out);
            std::printf("wrote %zu episodes x %d days to %s\n", ds.size(), gd_days,
                        gd_out.c_str());
            return 0;
        }

        if (ts->parsed()) {
            const Dataset ds = load_dataset(ts_data);
            const TwinTrainResult res = train_simulator(ds, cfg.twin, run_seed);
            save_simulator(res.sim, ts_out);
            std::printf("trained on %zu episodes; version %d\n", ds.size(), res.sim.version);
            std::printf("  climate: train %.6g val %.6g\n", res.climate.final_train_loss,
                        res.climate.final_val_loss);
            std::printf("  growth:  train %.6g val %.6g\n", res.growth.final_train_loss,
                        res.growth.final_val_loss);
            std::printf("  yield:   train %.6g val %.6g\n", res.yield.final_train_loss,
                        res.yield.final_val_loss);
            return 0;
        }

        if (es->parsed()) {
            const TwinSimulator sim = load_simulator(es_sim);
            const Dataset test = load_dataset(es_data);
            const R2Table table = evaluate_r2(sim, test);
            write_r2_csv(table, es_out);
            for (const auto& row : table.rows)
                std::printf("  %-10s R2 = %.4f\n", row.variable.c_str(),
                            row.defined ? row.r2_clamped : -1.0);
            std::printf("mean R2 = %.4f -> %s\n", table.mean_clamped(), es_out.c_str());
            return 0;
        }

        if (oe->parsed()) {
            const WeatherSeries ws = load_weather(oe_weather);
            EgaConfig ega = cfg.ega;
            ega.seed = run_seed;
            if (oe_generations >= 0) ega.generations = oe_generations;
            ScheduleOptResult res;
            if (oe_env == "twin") {
                if (oe_sim.empty())
                    throw ValidationError("optimize ega: --sim is required with --env twin");
                const TwinSimulator sim = load_simulator(oe_sim);
                res = ega_optimize(ega, sim, ws, make_initial_state(cfg.world, ws), cfg.econ,
                                   cfg.bounds, oe_interval, oe_block);
            } else {
                res = ega_optimize_world(ega, cfg.world, ws, cfg.econ, cfg.bounds, oe_interval,
                                         oe_block);
            }
            save_schedule(res.schedule, oe_out);
            if (!oe_history.empty()) save_fitness_history(res.history, oe_history);
            std::printf("best fitness %.4f EUR/m2 after %d generations -> %s\n", res.fitness,
                        ega.generations, oe_out.c_str());
            return 0;
        }

        if (os->parsed()) {
            const WeatherSeries ws = load_weather(os_weather);
            const TwinSimulator sim = load_simulator(os_sim);
            const int horizon = os_horizon_days * 24;
            if (static_cast<size_t>(horizon) > ws.size())
                throw ValidationError("optimize sac: horizon exceeds weather length");
            TwinMdpEnv env(sim, ws.records, make_initial_state(cfg.world, ws), cfg.econ,
                           cfg.bounds, horizon);
            SacConfig sac = cfg.sac;
            sac.seed = run_seed;
            if (os_steps > 0) sac.total_steps = os_steps;
            const SacResult res = sac_train(env, sac);
            save_policy(res.policy, os_out);
            if (!os_curve.empty()) {
                std::string csv = "env_step,mean_return\n";
                char line[64];
                for (const auto& [st, ret] : res.return_curve) {
                    std::snprintf(line, sizeof(line), "%d,%.10g\n", st, ret);
                    csv += line;
                }
                write_text_file(os_curve, csv);
            }
            const double final_ret =
                evaluate_policy(res.policy, env, 1, split_seed(run_seed, 0xe7a));
            std::printf("trained %d steps; deterministic return %.4f EUR/m2 -> %s\n",
                        sac.total_steps, final_ret, os_out.c_str());
            return 0;
        }

        if (bl->parsed()) {
            const TwinSimulator sim = load_simulator(bl_sim);
            const Dataset d0 = load_dataset(bl_data);
            const WeatherSeries ws = load_weather(bl_weather);
            BilevelConfig bcfg = cfg.bilevel;
            bcfg.seed = run_seed;
            bcfg.horizon_hours = std::min<int>(bcfg.horizon_hours, static_cast<int>(ws.size()));
            const BilevelResult res =
                run_bilevel(bcfg, sim, d0, cfg.world, ws, cfg.econ, cfg.bounds);
            const std::filesystem::path out(bl_out);
            save_trajectory(res.trajectory, out / "trajectory.json");
            save_simulator(res.sim, out / "sim");
            write_bilevel_log(res.log, out / "log.jsonl");
            Dataset delta;
            delta.episodes.push_back(res.trajectory);
            delta.meta = {{"source", "bilevel-delta"}, {"seed", bcfg.seed}};
            save_dataset(delta, out / "data_delta");
            std::printf("bilevel run: T=%d K1=%d K2=%d, final net profit %.4f EUR/m2, "
                        "sim version %d -> %s\n",
                        bcfg.horizon_hours, bcfg.k1, bcfg.k2,
                        res.trajectory.final_net_profit(), res.sim.version, bl_out.c_str());
            return 0;
        }

        if (rp->parsed()) {
            MetricsReport m;
            m.r2 = read_r2_csv(rp_r2);
            const Trajectory truth = load_trajectory(rp_truth);
            const Trajectory simt = load_trajectory(rp_sim);
            m.truth_net_profit = net_profit_curve(truth);
            m.sim_net_profit = net_profit_curve(simt);
            m.cum_abs_error = cumulative_abs_error(m.sim_net_profit, m.truth_net_profit);
            const Dataset control = load_dataset(rp_control);
            const Dataset experiment = load_dataset(rp_experiment);
            m.econ = build_econ_table(control.episodes, experiment.episodes,
                                      cfg.econ.greenhouse_area);
            render_report(m, rp_out);
            std::printf("report written to %s\n", rp_out.c_str());
            return 0;
        }

        if (rl->parsed()) {
            const Trajectory tr = load_trajectory(rl_traj);
            const ReplayCheck chk = replay_trajectory(tr);
            if (chk.ok) {
                std::printf("replay OK: ledger and %zu rewards reproduced bitwise "
                            "(net profit %.4f EUR/m2)\n",
                            chk.rewards.size(), chk.recomputed.net_profit());
                return 0;
            }
            std::fprintf(stderr, "replay MISMATCH: %s\n", chk.detail.c_str());
            return 2;
        }

        std::cerr << app.help() << "\n";
        return 1;
    } catch (const ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "failure: %s\n", e.what());
        return 2;
    }
}

}  // namespace agc
