// Closed-loop deployment against the reference world: every K1 steps the
// strategy is re-optimized on the current twin over the remaining horizon
// (warm-started from the incumbent), every K2 steps the twin is fine-tuned on
// the trajectory buffer collected so far, and the chosen action is then
// executed on the world. Within a step the order is: re-optimize, fine-tune,
// act — matching how the deployment loop is stated.
#pragma once

#include <string>
#include <variant>

#include "agc/ega.hpp"
#include "agc/sac.hpp"

namespace agc {

struct BilevelConfig {
    int k1 = 360;             // steps between strategy re-optimizations
    int k2 = 360;             // steps between simulator fine-tunes
    int horizon_hours = 1440; // T
    std::string optimizer = "ega"; // "ega" or "sac"
    int reopt_generations = 50;    // EGA budget per re-optimization
    int sac_steps_per_reopt = 4000;
    bool warm_start = true; // seed the re-optimization around the incumbent
    std::string initial_baseline = "expert_like";
    int control_interval = 1;
    int day_block = 5;
    std::uint64_t seed = 0;
    EgaConfig ega;
    SacConfig sac;
    double ft_lr = 0.01;
    int ft_epochs = 12;
    double ft_replay_fraction = 0.5;
};

inline void to_json(nlohmann::json& j, const BilevelConfig& c) {
    j = nlohmann::json{{"k1", c.k1},
                       {"k2", c.k2},
                       {"horizon_hours", c.horizon_hours},
                       {"optimizer", c.optimizer},
                       {"reopt_generations", c.reopt_generations},
                       {"sac_steps_per_reopt", c.sac_steps_per_reopt},
                       {"warm_start", c.warm_start},
                       {"initial_baseline", c.initial_baseline},
                       {"control_interval", c.control_interval},
                       {"day_block", c.day_block},
                       {"seed", c.seed},
                       {"ega", c.ega},
                       {"sac", c.sac},
                       {"ft_lr", c.ft_lr},
                       {"ft_epochs", c.ft_epochs},
                       {"ft_replay_fraction", c.ft_replay_fraction}};
}

inline void from_json(const nlohmann::json& j, BilevelConfig& c) {
    BilevelConfig d;
    c.k1 = j.value("k1", d.k1);
    c.k2 = j.value("k2", d.k2);
    c.horizon_hours = j.value("horizon_hours", d.horizon_hours);
    c.optimizer = j.value("optimizer", d.optimizer);
    c.reopt_generations = j.value("reopt_generations", d.reopt_generations);
    c.sac_steps_per_reopt = j.value("sac_steps_per_reopt", d.sac_steps_per_reopt);
    c.warm_start = j.value("warm_start", d.warm_start);
    c.initial_baseline = j.value("initial_baseline", d.initial_baseline);
    c.control_interval = j.value("control_interval", d.control_interval);
    c.day_block = j.value("day_block", d.day_block);
    c.seed = j.value("seed", d.seed);
    c.ega = j.value("ega", d.ega);
    c.sac = j.value("sac", d.sac);
    c.ft_lr = j.value("ft_lr", d.ft_lr);
    c.ft_epochs = j.value("ft_epochs", d.ft_epochs);
    c.ft_replay_fraction = j.value("ft_replay_fraction", d.ft_replay_fraction);
}

struct BilevelEvent {
    int step = 0;
    std::string type; // "reopt" | "finetune" | "act"
    double value = 0.0;
    int sim_version = 0;
};

struct BilevelLog {
    std::vector<BilevelEvent> events;
};

inline void write_bilevel_log(const BilevelLog& log, const std::filesystem::path& path) {
    std::string out;
    for (const auto& e : log.events) {
        nlohmann::json j{{"step", e.step},
                         {"event", e.type},
                         {"value", e.value},
                         {"sim_version", e.sim_version}};
        out += j.dump();
        out += '\n';
    }
    write_text_file(path, out);
}

struct BilevelResult {
    Trajectory trajectory;
    TwinSimulator sim;
    Dataset dataset; // input dataset plus the newly collected trajectory
    BilevelLog log;
};

// Projects an hourly schedule onto a coarser gene layout by sampling the first
// hour each gene covers.
inline Schedule project_to_layout(const Schedule& hourly, int control_interval, int day_block) {
    Schedule out = make_schedule(hourly.horizon_hours, control_interval, day_block);
    for (int b = 0; b < out.blocks(); ++b)
        for (int s = 0; s < out.slots_per_day(); ++s) {
            const auto [first, last] = out.gene_hours(b, s);
            (void)last;
            const Action a = hourly.action_at(std::min(first, hourly.horizon_hours - 1));
            double buf[4];
            action_to(a, buf);
            for (int v = 0; v < 4; ++v) out.genes[out.gene_index(b, s, v)] = buf[v];
        }
    return out;
}

// Re-optimizes only the genes that still cover future hours; elapsed genes are
// frozen to their executed values. The incumbent always joins the population,
// so the result never scores below it on the same simulator version.
inline ScheduleOptResult reoptimize_strategy(const TwinSimulator& sim, const Schedule& incumbent,
                                             int t_now, const State& s_now,
                                             const WeatherSeries& weather, const EconConfig& econ,
                                             const ActionBounds& bounds, EgaConfig ega,
                                             int budget_generations, bool warm_start,
                                             std::uint64_t seed) {
    if (t_now < 0 || t_now >= incumbent.horizon_hours)
        throw ValidationError("reoptimize_strategy: t_now outside horizon");
    if (budget_generations <= 0) {
        ScheduleOptResult r;
        r.schedule = incumbent;
        r.fitness = evaluate_schedule(incumbent, TwinDynamics{&sim},
                                      std::vector<Weather>(weather.records.begin() + t_now,
                                                           weather.records.end()),
                                      s_now, econ, bounds, t_now);
        return r;
    }
    ega.generations = budget_generations;
    ega.seed = seed;

    std::vector<std::vector<double>> warm;
    warm.push_back(incumbent.genes); // first member also supplies frozen gene values
    if (warm_start) {
        std::vector<double> lo, hi;
        schedule_gene_bounds(incumbent, bounds, lo, hi);
        const std::vector<bool> frozen = schedule_frozen_mask(incumbent, t_now);
        auto rng = make_rng(split_seed(seed, 0x3a9));
        const int variants = std::max(1, ega.population / 4);
        for (int v = 0; v < variants; ++v) {
            std::vector<double> g = incumbent.genes;
            for (size_t i = 0; i < g.size(); ++i)
                if (!frozen[i] && rand_uniform(rng, 0.0, 1.0) < 0.3)
                    g[i] = clamp(g[i] + rand_normal(rng, 0.0, 0.25 * (hi[i] - lo[i])), lo[i],
                                 hi[i]);
            warm.push_back(std::move(g));
        }
    }

    const std::vector<Weather> tail(weather.records.begin() + t_now,
                                    weather.records.begin() + incumbent.horizon_hours);
    return ega_optimize_schedule(ega, TwinDynamics{&sim}, tail, s_now, econ, bounds, incumbent,
                                 t_now, warm);
}

namespace detail {

inline std::vector<double> policy_features(const State& s, int t, int reopt_t, int horizon) {
    std::vector<double> f = state_observables(s);
    f.push_back(std::sin(2.0 * std::numbers::pi * s.hour_of_day / 24.0));
    f.push_back(std::cos(2.0 * std::numbers::pi * s.hour_of_day / 24.0));
    const int span = std::max(1, horizon - reopt_t);
    f.push_back(static_cast<double>(t - reopt_t) / span);
    return f;
}

}  // namespace detail

inline BilevelResult run_bilevel(const BilevelConfig& cfg, TwinSimulator sim, const Dataset& d0,
                                 const WorldParams& world, const WeatherSeries& weather,
                                 const EconConfig& econ, const ActionBounds& bounds) {
    if (cfg.k1 < 1 || cfg.k2 < 1) throw ValidationError("run_bilevel: K1 and K2 must be >= 1");
    if (cfg.horizon_hours < 1) throw ValidationError("run_bilevel: horizon must be >= 1");
    if (weather.size() < static_cast<size_t>(cfg.horizon_hours))
        throw ValidationError("run_bilevel: weather does not cover the horizon");
    if (sim.version < 1) throw ValidationError("run_bilevel: simulator has not been trained");
    const bool use_sac = cfg.optimizer == "sac";
    if (!use_sac && cfg.optimizer != "ega")
        throw ValidationError("run_bilevel: unknown optimizer \"" + cfg.optimizer + "\"");

    const int T = cfg.horizon_hours;
    Schedule incumbent = project_to_layout(
        baseline_schedule(cfg.initial_baseline, T, bounds, split_seed(cfg.seed, 0xb0)),
        cfg.control_interval, cfg.day_block);
    Policy policy; // SAC alternative
    bool policy_ready = false;
    int last_reopt_t = 0;

    RolloutCursor<WorldDynamics> cursor(WorldDynamics{&world}, weather.records,
                                        make_initial_state(world, weather), econ, bounds, T);
    BilevelLog log;
    auto rng_exec = make_rng(split_seed(cfg.seed, 0xac7));

    for (int t = 0; t < T; ++t) {
        if (t % cfg.k1 == 0) {
            if (use_sac) {
                const int remaining = T - t;
                TwinMdpEnv env(sim,
                               std::vector<Weather>(weather.records.begin() + t,
                                                    weather.records.begin() + T),
                               cursor.state(), econ, bounds, remaining);
                SacConfig sc = cfg.sac;
                sc.total_steps = cfg.sac_steps_per_reopt;
                sc.seed = split_seed(cfg.seed, 1000 + t);
                sc.eval_every = 0;
                const SacResult r =
                    sac_train(env, sc, (policy_ready && cfg.warm_start) ? &policy : nullptr);
                policy = r.policy;
                policy_ready = true;
                last_reopt_t = t;
                const double fit =
                    evaluate_policy(policy, env, 1, split_seed(cfg.seed, 2000 + t));
                log.events.push_back({t, "reopt", fit, sim.version});
            } else {
                const ScheduleOptResult r = reoptimize_strategy(
                    sim, incumbent, t, cursor.state(), weather, econ, bounds, cfg.ega,
                    cfg.reopt_generations, cfg.warm_start, split_seed(cfg.seed, 3000 + t));
                incumbent = r.schedule;
                last_reopt_t = t;
                log.events.push_back({t, "reopt", r.fitness, sim.version});
            }
        }
        if (t % cfg.k2 == 0 && t > 0) { // empty buffer at t = 0 has nothing to calibrate on
            FineTuneOptions ft;
            ft.lr = cfg.ft_lr;
            ft.epochs = cfg.ft_epochs;
            ft.replay_fraction = cfg.ft_replay_fraction;
            ft.replay = d0.episodes.empty() ? nullptr : &d0.episodes;
            ft.seed = split_seed(cfg.seed, 4000 + t);
            const std::vector<Trajectory> buffer{cursor.snapshot({{"source", "bilevel-buffer"}})};
            const FineTuneReport rep = fine_tune(sim, buffer, ft);
            log.events.push_back({t, "finetune", 0.5 * (rep.post_climate + rep.post_growth),
                                  sim.version});
        }

        Action a;
        if (use_sac) {
            a = action_from(
                policy_act(policy, detail::policy_features(cursor.state(), t, last_reopt_t, T),
                           true, rng_exec)
                    .data());
        } else {
            a = incumbent.action_at(t);
        }
        const double r = cursor.step(a);
        log.events.push_back({t, "act", r, sim.version});
    }

    BilevelResult out;
    out.trajectory = std::move(cursor).take({{"source", "bilevel"},
                                             {"seed", cfg.seed},
                                             {"optimizer", cfg.optimizer},
                                             {"params_hash", params_hash(world)}});
    out.dataset = d0;
    out.dataset.episodes.push_back(out.trajectory);
    out.dataset.meta["bilevel_appended"] = true;
    out.sim = std::move(sim);
    out.log = std::move(log);
    return out;
}

}  // namespace agc
