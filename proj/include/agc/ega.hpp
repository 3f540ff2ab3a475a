// Elitist genetic algorithm over box-bounded real genomes, plus the
// schedule-optimization wrapper used for greenhouse strategy search.
// Top elites survive unchanged every generation, so best fitness never drops.
#pragma once

#include <algorithm>
#include <functional>
#include <numeric>

#include "agc/schedule.hpp"
#include "agc/twin.hpp"
#include "agc/world.hpp"

namespace agc {

struct EgaConfig {
    int population = 64;
    double elite_fraction = 0.125; // elite count = max(1, round(pop * fraction))
    int tournament = 3;
    double crossover_rate = 0.9;      // uniform crossover
    double mutation_rate = -1.0;      // per gene; < 0 means 2 / genome_length
    double mutation_sigma_frac = 0.10; // Gaussian sigma as fraction of gene range
    int generations = 200;
    std::uint64_t seed = 0;
};

inline void to_json(nlohmann::json& j, const EgaConfig& c) {
    j = nlohmann::json{{"population", c.population},
                       {"elite_fraction", c.elite_fraction},
                       {"tournament", c.tournament},
                       {"crossover_rate", c.crossover_rate},
                       {"mutation_rate", c.mutation_rate},
                       {"mutation_sigma_frac", c.mutation_sigma_frac},
                       {"generations", c.generations},
                       {"seed", c.seed}};
}

inline void from_json(const nlohmann::json& j, EgaConfig& c) {
    EgaConfig d;
    c.population = j.value("population", d.population);
    c.elite_fraction = j.value("elite_fraction", d.elite_fraction);
    c.tournament = j.value("tournament", d.tournament);
    c.crossover_rate = j.value("crossover_rate", d.crossover_rate);
    c.mutation_rate = j.value("mutation_rate", d.mutation_rate);
    c.mutation_sigma_frac = j.value("mutation_sigma_frac", d.mutation_sigma_frac);
    c.generations = j.value("generations", d.generations);
    c.seed = j.value("seed", d.seed);
}

inline int ega_elite_count(const EgaConfig& cfg) {
    return std::max(1, static_cast<int>(std::lround(cfg.population * cfg.elite_fraction)));
}

struct GenerationStats {
    int generation = 0;
    double best = 0.0;
    double mean = 0.0;
    double stddev = 0.0;
};

struct EgaResult {
    std::vector<double> best_genome;
    double best_fitness = 0.0;
    std::vector<GenerationStats> history;
};

using GenomeFitness = std::function<double(const std::vector<double>&)>;

// Maximizes `fitness` over the box [lo, hi]. Optional `initial` genomes seed
// the first population (clamped; the remainder is uniform random). Genes with
// `frozen[g]` set keep their value from the first initial genome.
inline EgaResult ega_optimize_genome(const GenomeFitness& fitness, const std::vector<double>& lo,
                                     const std::vector<double>& hi, const EgaConfig& cfg,
                                     const std::vector<std::vector<double>>& initial = {},
                                     const std::vector<bool>* frozen = nullptr) {
    const int G = static_cast<int>(lo.size());
    if (G < 1 || hi.size() != lo.size()) throw ValidationError("ega: empty or mismatched bounds");
    for (int g = 0; g < G; ++g)
        if (!(lo[g] <= hi[g])) throw ValidationError("ega: inverted gene bounds");
    const int elites = ega_elite_count(cfg);
    if (cfg.population <= elites)
        throw ValidationError("ega: population must exceed elite count");
    if (cfg.tournament < 1 || cfg.generations < 0 || cfg.crossover_rate < 0.0 ||
        cfg.crossover_rate > 1.0)
        throw ValidationError("ega: bad configuration");
    if (frozen && static_cast<int>(frozen->size()) != G)
        throw ValidationError("ega: frozen mask size mismatch");

    const double mut_rate = cfg.mutation_rate >= 0.0 ? cfg.mutation_rate : 2.0 / G;
    auto rng = make_rng(split_seed(cfg.seed, 0xe6a));

    auto random_genome = [&]() {
        std::vector<double> g(G);
        for (int i = 0; i < G; ++i) g[i] = rand_uniform(rng, lo[i], hi[i]);
        if (frozen && !initial.empty())
            for (int i = 0; i < G; ++i)
                if ((*frozen)[i]) g[i] = initial.front()[i];
        return g;
    };

    std::vector<std::vector<double>> pop;
    pop.reserve(cfg.population);
    for (const auto& seed_genome : initial) {
        if (static_cast<int>(pop.size()) >= cfg.population) break;
        std::vector<double> g = seed_genome;
        if (static_cast<int>(g.size()) != G)
            throw ValidationError("ega: initial genome size mismatch");
        for (int i = 0; i < G; ++i) g[i] = clamp(g[i], lo[i], hi[i]);
        if (frozen && !initial.empty())
            for (int i = 0; i < G; ++i)
                if ((*frozen)[i]) g[i] = initial.front()[i];
        pop.push_back(std::move(g));
    }
    while (static_cast<int>(pop.size()) < cfg.population) pop.push_back(random_genome());

    std::vector<double> fit(cfg.population);
    for (int i = 0; i < cfg.population; ++i) fit[i] = fitness(pop[i]);

    EgaResult result;
    auto record = [&](int gen) {
        GenerationStats st;
        st.generation = gen;
        st.best = *std::max_element(fit.begin(), fit.end());
        st.mean = std::accumulate(fit.begin(), fit.end(), 0.0) / fit.size();
        double var = 0.0;
        for (double f : fit) var += (f - st.mean) * (f - st.mean);
        st.stddev = std::sqrt(var / fit.size());
        result.history.push_back(st);
    };
    record(0);

    std::vector<int> order(cfg.population);
    auto tournament_pick = [&]() {
        int best = std::uniform_int_distribution<int>(0, cfg.population - 1)(rng);
        for (int k = 1; k < cfg.tournament; ++k) {
            const int c = std::uniform_int_distribution<int>(0, cfg.population - 1)(rng);
            if (fit[c] > fit[best]) best = c;
        }
        return best;
    };

    for (int gen = 1; gen <= cfg.generations; ++gen) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) { return fit[a] > fit[b]; });

        std::vector<std::vector<double>> next;
        std::vector<double> next_fit;
        next.reserve(cfg.population);
        next_fit.reserve(cfg.population);
        for (int e = 0; e < elites; ++e) {
            next.push_back(pop[order[e]]);
            next_fit.push_back(fit[order[e]]); // fitness is deterministic; reuse
        }
        while (static_cast<int>(next.size()) < cfg.population) {
            const auto& pa = pop[tournament_pick()];
            const auto& pb = pop[tournament_pick()];
            std::vector<double> child = pa;
            if (rand_uniform(rng, 0.0, 1.0) < cfg.crossover_rate)
                for (int g = 0; g < G; ++g)
                    if (rand_uniform(rng, 0.0, 1.0) < 0.5) child[g] = pb[g];
            for (int g = 0; g < G; ++g) {
                if (frozen && (*frozen)[g]) continue;
                if (rand_uniform(rng, 0.0, 1.0) < mut_rate) {
                    child[g] += rand_normal(rng, 0.0, cfg.mutation_sigma_frac * (hi[g] - lo[g]));
                    child[g] = clamp(child[g], lo[g], hi[g]);
                }
            }
            next_fit.push_back(fitness(child));
            next.push_back(std::move(child));
        }
        pop = std::move(next);
        fit = std::move(next_fit);
        record(gen);
    }

    const int best = static_cast<int>(
        std::max_element(fit.begin(), fit.end()) - fit.begin());
    result.best_genome = pop[best];
    result.best_fitness = fit[best];
    return result;
}

// --- schedule optimization -------------------------------------------------

struct ScheduleOptResult {
    Schedule schedule;
    double fitness = 0.0;
    std::vector<GenerationStats> history;
};

// Optimizes the genes of `layout` against one environment rollout per
// candidate. `start_hour` > 0 restricts fitness to the remaining horizon and
// freezes genes that only cover elapsed hours; `warm_members` seed the
// population (the first one supplies frozen gene values).
template <class Dyn>
ScheduleOptResult ega_optimize_schedule(const EgaConfig& cfg, Dyn dyn,
                                        const std::vector<Weather>& weather, const State& s0,
                                        const EconConfig& econ, const ActionBounds& bounds,
                                        const Schedule& layout, int start_hour = 0,
                                        const std::vector<std::vector<double>>& warm_members = {}) {
    if (start_hour < 0 || start_hour >= layout.horizon_hours)
        throw ValidationError("ega_optimize_schedule: start_hour outside horizon");
    std::vector<double> lo, hi;
    schedule_gene_bounds(layout, bounds, lo, hi);

    const std::vector<bool> frozen = schedule_frozen_mask(layout, start_hour);
    const bool any_frozen =
        std::find(frozen.begin(), frozen.end(), true) != frozen.end();

    Schedule work = layout;
    const GenomeFitness fitness = [&](const std::vector<double>& genome) {
        work.genes = genome;
        return evaluate_schedule(work, dyn, weather, s0, econ, bounds, start_hour);
    };

    EgaResult r = ega_optimize_genome(fitness, lo, hi, cfg, warm_members,
                                      any_frozen ? &frozen : nullptr);
    ScheduleOptResult out;
    out.schedule = layout;
    out.schedule.genes = std::move(r.best_genome);
    out.fitness = r.best_fitness;
    out.history = std::move(r.history);
    return out;
}

// Full-horizon strategy search on a trained twin.
inline ScheduleOptResult ega_optimize(const EgaConfig& cfg, const TwinSimulator& sim,
                                      const WeatherSeries& weather, const State& initial,
                                      const EconConfig& econ, const ActionBounds& bounds,
                                      int control_interval = 1, int day_block = 5) {
    check_arities(sim);
    const Schedule layout =
        make_schedule(static_cast<int>(weather.size()), control_interval, day_block);
    return ega_optimize_schedule(cfg, TwinDynamics{&sim}, weather.records, initial, econ,
                                 bounds, layout);
}

// Same search against the reference world.
inline ScheduleOptResult ega_optimize_world(const EgaConfig& cfg, const WorldParams& params,
                                            const WeatherSeries& weather, const EconConfig& econ,
                                            const ActionBounds& bounds, int control_interval = 1,
                                            int day_block = 5) {
    const Schedule layout =
        make_schedule(static_cast<int>(weather.size()), control_interval, day_block);
    return ega_optimize_schedule(cfg, WorldDynamics{&params}, weather.records,
                                 make_initial_state(params, weather), econ, bounds, layout);
}

inline void save_fitness_history(const std::vector<GenerationStats>& history,
                                 const std::filesystem::path& path) {
    std::string csv = "generation,best,mean,std\n";
    char line[128];
    for (const auto& st : history) {
        std::snprintf(line, sizeof(line), "%d,%.10g,%.10g,%.10g\n", st.generation, st.best,
                      st.mean, st.stddev);
        csv += line;
    }
    write_text_file(path, csv);
}

}  // namespace agc
