// Open-loop setpoint schedules: a full-horizon genome of per-interval actions
// with optional day-block sharing, plus fixed baselines and fitness evaluation.
#pragma once

#include <string>
#include <vector>

#include "agc/rollout.hpp"

namespace agc {

// Genome layout: one daily pattern per block of `day_block` consecutive days,
// `24 / control_interval` slots per day, 4 genes (temp, co2, light, irrigation)
// per slot. Genes are ordered block-major, then slot, then variable.
struct Schedule {
    int horizon_hours = 0;
    int control_interval = 1; // hours per slot; must divide 24
    int day_block = 1;        // days sharing one daily pattern
    std::vector<double> genes;

    int days() const { return (horizon_hours + 23) / 24; }
    int slots_per_day() const { return 24 / control_interval; }
    int blocks() const { return (days() + day_block - 1) / day_block; }
    int genome_size() const { return blocks() * slots_per_day() * 4; }

    int gene_index(int block, int slot, int var) const {
        return (block * slots_per_day() + slot) * 4 + var;
    }

    Action action_at(int hour) const {
        if (hour < 0 || hour >= horizon_hours)
            throw ValidationError("Schedule: hour outside horizon");
        const int block = (hour / 24) / day_block;
        const int slot = (hour % 24) / control_interval;
        const double* g = genes.data() + gene_index(block, slot, 0);
        return Action{g[0], g[1], g[2], g[3]};
    }

    // Covered hour range [first, last] of one gene, clipped to the horizon.
    std::pair<int, int> gene_hours(int block, int slot) const {
        const int first = block * day_block * 24 + slot * control_interval;
        const int last_day = std::min((block + 1) * day_block, days()) - 1;
        const int last = std::min(horizon_hours - 1,
                                  last_day * 24 + (slot + 1) * control_interval - 1);
        return {first, last};
    }
};

inline Schedule make_schedule(int horizon_hours, int control_interval = 1, int day_block = 1) {
    if (horizon_hours < 1) throw ValidationError("Schedule: horizon must be >= 1 hour");
    if (control_interval < 1 || 24 % control_interval != 0)
        throw ValidationError("Schedule: control_interval must divide 24");
    if (day_block < 1) throw ValidationError("Schedule: day_block must be >= 1");
    Schedule s;
    s.horizon_hours = horizon_hours;
    s.control_interval = control_interval;
    s.day_block = day_block;
    s.genes.assign(s.genome_size(), 0.0);
    return s;
}

// Per-gene box bounds induced by the action bounds.
inline void schedule_gene_bounds(const Schedule& s, const ActionBounds& b,
                                 std::vector<double>& lo, std::vector<double>& hi) {
    const auto lows = b.lows();
    const auto highs = b.highs();
    lo.resize(s.genome_size());
    hi.resize(s.genome_size());
    for (int g = 0; g < s.genome_size(); ++g) {
        lo[g] = lows[g % 4];
        hi[g] = highs[g % 4];
    }
}

inline bool schedule_in_bounds(const Schedule& s, const ActionBounds& b, double tol = 1e-9) {
    std::vector<double> lo, hi;
    schedule_gene_bounds(s, b, lo, hi);
    for (int g = 0; g < s.genome_size(); ++g)
        if (s.genes[g] < lo[g] - tol || s.genes[g] > hi[g] + tol) return false;
    return true;
}

// Genes whose covered hours all precede `t_now` (true = frozen).
inline std::vector<bool> schedule_frozen_mask(const Schedule& s, int t_now) {
    std::vector<bool> frozen(s.genome_size(), false);
    if (t_now <= 0) return frozen;
    for (int b = 0; b < s.blocks(); ++b)
        for (int slot = 0; slot < s.slots_per_day(); ++slot) {
            const auto [first, last] = s.gene_hours(b, slot);
            (void)first;
            if (last < t_now)
                for (int v = 0; v < 4; ++v) frozen[s.gene_index(b, slot, v)] = true;
        }
    return frozen;
}

// Controller executing the schedule from `start_hour` onward; the rollout's
// local step i maps to schedule hour start_hour + i.
inline Controller schedule_controller(Schedule s, int start_hour = 0) {
    return [s = std::move(s), start_hour](const State&, int t) {
        return s.action_at(start_hour + t);
    };
}

// expert_like: day/night temperature split, daytime CO2 enrichment, lamps on a
// fixed 16 h photoperiod, constant irrigation. random: seeded piecewise-constant
// draws. minimal: every setpoint at its lower bound.
inline Schedule baseline_schedule(const std::string& kind, int horizon_hours,
                                  const ActionBounds& bounds, std::uint64_t seed = 0) {
    Schedule s = make_schedule(horizon_hours, 1, 1);
    auto set_hour = [&](int day, int hour, const Action& a) {
        const int g = s.gene_index(day, hour, 0);
        s.genes[g] = a.temp_sp;
        s.genes[g + 1] = a.co2_sp;
        s.genes[g + 2] = a.light;
        s.genes[g + 3] = a.irrigation;
    };
    if (kind == "minimal") {
        for (int d = 0; d < s.days(); ++d)
            for (int h = 0; h < 24; ++h)
                set_hour(d, h, Action{bounds.temp_lo, bounds.co2_lo, bounds.light_lo,
                                      bounds.irr_lo});
    } else if (kind == "expert_like") {
        for (int d = 0; d < s.days(); ++d) {
            for (int h = 0; h < 24; ++h) {
                const bool daytime = h >= 6 && h < 22;
                const bool photoperiod = h >= 4 && h < 20; // 16 h
                Action a;
                a.temp_sp = clamp(daytime ? 21.0 : 17.0, bounds.temp_lo, bounds.temp_hi);
                a.co2_sp = clamp(daytime ? 800.0 : bounds.co2_lo, bounds.co2_lo, bounds.co2_hi);
                a.light = clamp(photoperiod ? 1.0 : 0.0, bounds.light_lo, bounds.light_hi);
                a.irrigation = clamp(0.25, bounds.irr_lo, bounds.irr_hi);
                set_hour(d, h, a);
            }
        }
    } else if (kind == "random") {
        auto rng = make_rng(split_seed(seed, fnv1a64("baseline-random")));
        const auto acts = piecewise_constant_actions(horizon_hours, bounds, rng);
        for (int h = 0; h < s.days() * 24; ++h)
            set_hour(h / 24, h % 24, acts[std::min(h, horizon_hours - 1)]);
    } else {
        throw ValidationError("baseline_schedule: unknown kind \"" + kind + "\"");
    }
    return s;
}

// Fitness of a schedule: final net profit of one rollout in the given
// environment (reference world or twin), starting from `s0` at `start_hour`.
template <class Dyn>
double evaluate_schedule(const Schedule& s, Dyn dyn, const std::vector<Weather>& weather,
                         const State& s0, const EconConfig& econ, const ActionBounds& bounds,
                         int start_hour = 0) {
    const int hours = s.horizon_hours - start_hour;
    if (hours < 0) throw ValidationError("evaluate_schedule: start beyond horizon");
    const Trajectory tr =
        rollout(dyn, schedule_controller(s, start_hour), weather, s0, econ, bounds, hours);
    return tr.final_net_profit();
}

inline void save_schedule(const Schedule& s, const std::filesystem::path& path) {
    nlohmann::json j{{"format", "schedule-v1"},
                     {"horizon_hours", s.horizon_hours},
                     {"control_interval", s.control_interval},
                     {"day_block", s.day_block},
                     {"genes", s.genes}};
    save_json_file(path, j);
}

inline Schedule load_schedule(const std::filesystem::path& path) {
    const auto j = load_json_file(path);
    require_format(j, "schedule-v1", path.string());
    Schedule s = make_schedule(j.at("horizon_hours").get<int>(),
                               j.at("control_interval").get<int>(),
                               j.at("day_block").get<int>());
    j.at("genes").get_to(s.genes);
    if (static_cast<int>(s.genes.size()) != s.genome_size())
        throw IoError(path.string() + ": genome size does not match layout");
    return s;
}

}  // namespace agc
