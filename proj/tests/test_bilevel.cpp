#include <catch2/catch_amalgamated.hpp>

#include "agc/bilevel.hpp"

using namespace agc;

namespace {

struct BilevelFixture {
    WorldParams world;
    EconConfig econ;
    ActionBounds bounds;
    Dataset d0;
    TwinSimulator sim0;
    WeatherSeries weather;

    explicit BilevelFixture(int days = 4, std::uint64_t seed = 101) {
        TwinConfig tc;
        tc.climate_hidden = {24, 24};
        tc.growth_hidden = {24, 24};
        tc.yield_hidden = {12, 12};
        tc.epochs = 12;
        d0 = generate_dataset(8, days, random_strategy_sampler(bounds), seed, world, econ,
                              bounds);
        sim0 = train_simulator(d0, tc, seed).sim;
        weather = generate_weather(days, split_seed(seed, 7), "temperate-spring");
    }

    BilevelConfig config(int k1, int k2) const {
        BilevelConfig cfg;
        cfg.horizon_hours = static_cast<int>(weather.size());
        cfg.k1 = k1;
        cfg.k2 = k2;
        cfg.reopt_generations = 6;
        cfg.ega.population = 16;
        cfg.control_interval = 4;
        cfg.day_block = 2;
        cfg.ft_epochs = 3;
        cfg.seed = 5;
        return cfg;
    }
};

}  // namespace

TEST_CASE("run_bilevel: degenerate periods give one re-optimization and no fine-tune") {
    BilevelFixture fx;
    const int T = static_cast<int>(fx.weather.size());
    const BilevelResult res = run_bilevel(fx.config(T, T), fx.sim0, fx.d0, fx.world, fx.weather,
                                          fx.econ, fx.bounds);

    int reopts = 0, finetunes = 0, acts = 0;
    for (const auto& e : res.log.events) {
        if (e.type == "reopt") ++reopts;
        if (e.type == "finetune") ++finetunes;
        if (e.type == "act") ++acts;
    }
    CHECK(reopts == 1);
    CHECK(finetunes == 0); // t = 0 fine-tune is skipped on an empty buffer
    CHECK(acts == T);
    CHECK(res.sim.version == fx.sim0.version); // never fine-tuned
    CHECK(res.trajectory.horizon() == T);
    CHECK(res.dataset.size() == fx.d0.size() + 1);
}

TEST_CASE("run_bilevel: events fire on schedule and the sim version only moves on fine-tunes") {
    BilevelFixture fx;
    const int T = static_cast<int>(fx.weather.size());
    const int K = T / 4;
    const BilevelResult res = run_bilevel(fx.config(K, K), fx.sim0, fx.d0, fx.world, fx.weather,
                                          fx.econ, fx.bounds);

    int reopts = 0, finetunes = 0;
    int last_step = -1;
    int version = fx.sim0.version;
    for (const auto& e : res.log.events) {
        CHECK(e.step >= last_step); // ordered by step
        last_step = e.step;
        CHECK(e.sim_version >= version - 1);
        if (e.type == "reopt") {
            ++reopts;
            CHECK(e.step % K == 0);
        }
        if (e.type == "finetune") {
            ++finetunes;
            CHECK(e.step % K == 0);
            CHECK(e.step > 0);
            CHECK(e.sim_version == ++version - 0); // bumped exactly here
        }
        CHECK(e.sim_version <= version);
    }
    CHECK(reopts == 4);
    CHECK(finetunes == 3); // t = 0 skipped
    CHECK(res.sim.version == fx.sim0.version + 3);

    // re-optimization at step t saw the simulator as of t (before that step's fine-tune)
    int v_seen = fx.sim0.version;
    for (const auto& e : res.log.events) {
        if (e.type == "reopt") CHECK(e.sim_version == v_seen);
        if (e.type == "finetune") v_seen = e.sim_version;
    }
}

TEST_CASE("run_bilevel: executed actions replay open-loop to the same trajectory") {
    BilevelFixture fx;
    const int T = static_cast<int>(fx.weather.size());
    const BilevelResult res = run_bilevel(fx.config(T / 2, T / 2), fx.sim0, fx.d0, fx.world,
                                          fx.weather, fx.econ, fx.bounds);

    const Trajectory replayed = world_rollout(actions_controller(res.trajectory.actions),
                                              fx.weather, fx.world, fx.econ, fx.bounds,
                                              res.trajectory.meta);
    CHECK(trajectory_to_json(replayed).dump() == trajectory_to_json(res.trajectory).dump());
}

TEST_CASE("run_bilevel validates its inputs") {
    BilevelFixture fx;
    BilevelConfig bad = fx.config(0, 1);
    CHECK_THROWS_AS(run_bilevel(bad, fx.sim0, fx.d0, fx.world, fx.weather, fx.econ, fx.bounds),
                    ValidationError);
    BilevelConfig huge = fx.config(4, 4);
    huge.horizon_hours = static_cast<int>(fx.weather.size()) + 1;
    CHECK_THROWS_AS(run_bilevel(huge, fx.sim0, fx.d0, fx.world, fx.weather, fx.econ, fx.bounds),
                    ValidationError);
    TwinConfig tc;
    TwinSimulator untrained = make_twin(tc, 1);
    BilevelConfig ok = fx.config(4, 4);
    CHECK_THROWS_AS(run_bilevel(ok, untrained, fx.d0, fx.world, fx.weather, fx.econ, fx.bounds),
                    ValidationError);
    BilevelConfig unknown = fx.config(4, 4);
    unknown.optimizer = "annealing";
    CHECK_THROWS_AS(
        run_bilevel(unknown, fx.sim0, fx.d0, fx.world, fx.weather, fx.econ, fx.bounds),
        ValidationError);
}

TEST_CASE("reoptimize_strategy: budget zero returns the incumbent unchanged") {
    BilevelFixture fx;
    const int T = static_cast<int>(fx.weather.size());
    const Schedule incumbent = project_to_layout(
        baseline_schedule("expert_like", T, fx.bounds), 4, 2);
    const ScheduleOptResult r = reoptimize_strategy(fx.sim0, incumbent, T / 2,
                                                    fx.d0.episodes[0].states[T / 2], fx.weather,
                                                    fx.econ, fx.bounds, EgaConfig{}, 0, true, 3);
    CHECK(r.schedule.genes == incumbent.genes);
}

TEST_CASE("reoptimize_strategy: frozen prefix, warm-start floor, full-horizon reduction") {
    BilevelFixture fx;
    const int T = static_cast<int>(fx.weather.size());
    Schedule incumbent = project_to_layout(baseline_schedule("expert_like", T, fx.bounds), 4, 2);

    EgaConfig ega;
    ega.population = 16;
    const int t_now = T / 2;
    const State s_now = fx.d0.episodes[0].states[t_now];

    const double incumbent_fitness = evaluate_schedule(
        incumbent, TwinDynamics{&fx.sim0},
        std::vector<Weather>(fx.weather.records.begin() + t_now, fx.weather.records.end()),
        s_now, fx.econ, fx.bounds, t_now);

    const ScheduleOptResult r = reoptimize_strategy(fx.sim0, incumbent, t_now, s_now, fx.weather,
                                                    fx.econ, fx.bounds, ega, 8, true, 3);
    // elapsed genes untouched
    for (int b = 0; b < incumbent.blocks(); ++b)
        for (int s = 0; s < incumbent.slots_per_day(); ++s) {
            const auto [first, last] = incumbent.gene_hours(b, s);
            (void)first;
            if (last < t_now)
                for (int v = 0; v < 4; ++v)
                    CHECK(r.schedule.genes[incumbent.gene_index(b, s, v)] ==
                          incumbent.genes[incumbent.gene_index(b, s, v)]);
        }
    // warm start + elitism: never below the incumbent on the same sim version
    CHECK(r.fitness >= incumbent_fitness - 1e-12);

    // t_now = 0 optimizes the full horizon (no frozen genes)
    const ScheduleOptResult full = reoptimize_strategy(
        fx.sim0, incumbent, 0, make_initial_state(fx.world, fx.weather), fx.weather, fx.econ,
        fx.bounds, ega, 4, true, 4);
    bool any_changed = false;
    for (size_t g = 0; g < incumbent.genes.size(); ++g)
        any_changed |= full.schedule.genes[g] != incumbent.genes[g];
    CHECK(any_changed);
}

TEST_CASE("run_bilevel with the sac optimizer executes a policy") {
    BilevelFixture fx(2, 303);
    BilevelConfig cfg = fx.config(24, 24);
    cfg.optimizer = "sac";
    cfg.sac_steps_per_reopt = 250;
    cfg.sac.actor_hidden = {16, 16};
    cfg.sac.critic_hidden = {16, 16};
    cfg.sac.warmup_steps = 60;
    cfg.sac.batch = 32;
    const BilevelResult res =
        run_bilevel(cfg, fx.sim0, fx.d0, fx.world, fx.weather, fx.econ, fx.bounds);
    CHECK(res.trajectory.horizon() == static_cast<int>(fx.weather.size()));
    for (const auto& a : res.trajectory.actions) CHECK(action_in_bounds(a, fx.bounds));
}

TEST_CASE("bilevel log serializes as JSON lines") {
    BilevelLog log;
    log.events.push_back({0, "reopt", 1.5, 1});
    log.events.push_back({12, "finetune", 0.01, 2});
    log.events.push_back({12, "act", -0.001, 2});
    const auto path = std::filesystem::temp_directory_path() / "agc_test_log.jsonl";
    write_bilevel_log(log, path);
    const std::string text = read_text_file(path);
    CHECK(std::count(text.begin(), text.end(), '\n') == 3);
    const auto first = nlohmann::json::parse(text.substr(0, text.find('\n')));
    CHECK(first.at("event") == "reopt");
    CHECK(first.at("sim_version") == 1);
}
