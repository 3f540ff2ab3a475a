// Episode rollout engine, shared by the reference world and the learned twin.
//
// A Dynamics type provides the one-hour climate/growth transition and the
// daily yield increment; the engine owns everything both environments share:
// action clamping, cost/gain accounting, reward telescoping, day boundaries,
// and finalization (depreciation lands inside the last step's reward, so the
// reward sum over a full episode equals the finalized net profit).
#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "agc/domain.hpp"
#include "agc/trajectory.hpp"

namespace agc {

using Controller = std::function<Action(const State&, int)>;

template <class Dyn>
class RolloutCursor {
public:
    RolloutCursor(Dyn dyn, const std::vector<Weather>& weather, State s0, EconConfig econ,
                  ActionBounds bounds, int hours)
        : dyn_(std::move(dyn)), weather_(&weather), econ_(econ), bounds_(bounds), hours_(hours) {
        if (hours < 0) throw ValidationError("rollout: negative horizon");
        if (hours > 0 && static_cast<size_t>(hours) > weather.size())
            throw ValidationError("rollout: horizon exceeds weather length");
        validate(econ_);
        if (hours > 0) s0.weather = weather.front();
        states_.push_back(s0);
        if (hours_ == 0) ledger_ = finalize_ledger(ledger_, econ_);
    }

    bool done() const { return t_ >= hours_; }
    int step_index() const { return t_; }
    const State& state() const { return states_.back(); }
    const EconomicLedger& ledger() const { return ledger_; }

    // Applies one action (clamped into the box) and returns the step reward.
    double step(const Action& raw_action) {
        if (done()) throw ValidationError("rollout: step past horizon");
        const State s = states_.back();
        const Action a = clamp_action(raw_action, bounds_);
        const double prev_np = ledger_.net_profit();

        ledger_.accrue(step_cost_components(a, s.weather, 1.0, econ_));

        const size_t next_idx = std::min<size_t>(t_ + 1, weather_->size() - 1);
        auto [c_next, g_next] = dyn_.step(s, a, (*weather_)[next_idx]);

        State ns;
        ns.weather = (*weather_)[next_idx];
        ns.climate = c_next;
        ns.growth = g_next;
        ns.yield = s.yield;
        ns.hour_of_day = (s.hour_of_day + 1) % 24;
        ns.day = s.day + (s.hour_of_day == 23 ? 1 : 0);

        day_sum_pos_ng_ += std::max(0.0, g_next.net_growth);
        if (ns.hour_of_day == 0) {
            const double inc_raw = std::max(
                0.0, dyn_.daily_yield_increment(s.growth, s.yield.fw, day_sum_pos_ng_, s.day));
            ns.yield.fw = s.yield.fw + inc_raw;
            // gains are priced off the stored difference, so replaying a saved
            // trajectory reproduces the ledger bit for bit
            const double inc = ns.yield.fw - s.yield.fw;
            if (inc > 0.0) ledger_.gains += step_gain(inc, econ_);
            daily_yield_.push_back(ns.yield.fw);
            day_sum_pos_ng_ = 0.0;
        }

        ++t_;
        if (t_ == hours_) ledger_ = finalize_ledger(ledger_, econ_);

        const double r = ledger_.net_profit() - prev_np;
        states_.push_back(ns);
        actions_.push_back(a);
        rewards_.push_back(r);
        return r;
    }

    Trajectory take(nlohmann::json meta = nlohmann::json::object()) && {
        Trajectory tr;
        tr.states = std::move(states_);
        tr.actions = std::move(actions_);
        tr.rewards = std::move(rewards_);
        tr.daily_yield = std::move(daily_yield_);
        tr.ledger = ledger_;
        meta["econ"] = econ_;
        tr.meta = std::move(meta);
        return tr;
    }

    // Copy of everything recorded so far (ledger not yet finalized mid-run).
    Trajectory snapshot(nlohmann::json meta = nlohmann::json::object()) const {
        Trajectory tr;
        tr.states = states_;
        tr.actions = actions_;
        tr.rewards = rewards_;
        tr.daily_yield = daily_yield_;
        tr.ledger = ledger_;
        meta["econ"] = econ_;
        tr.meta = std::move(meta);
        return tr;
    }

private:
    Dyn dyn_;
    const std::vector<Weather>* weather_;
    EconConfig econ_;
    ActionBounds bounds_;
    int hours_ = 0;
    int t_ = 0;
    EconomicLedger ledger_;
    std::vector<State> states_;
    std::vector<Action> actions_;
    std::vector<double> rewards_;
    std::vector<double> daily_yield_;
    double day_sum_pos_ng_ = 0.0;
};

template <class Dyn, class Ctl>
Trajectory rollout(Dyn dyn, Ctl&& controller, const std::vector<Weather>& weather, State s0,
                   const EconConfig& econ, const ActionBounds& bounds, int hours,
                   nlohmann::json meta = nlohmann::json::object()) {
    RolloutCursor<Dyn> cur(std::move(dyn), weather, std::move(s0), econ, bounds, hours);
    while (!cur.done()) cur.step(controller(cur.state(), cur.step_index()));
    return std::move(cur).take(std::move(meta));
}

// Piecewise-constant random actions: segments of 6..24 hours, each uniform in
// the action box. Used for dataset-generation strategies and the random baseline.
inline std::vector<Action> piecewise_constant_actions(int hours, const ActionBounds& bounds,
                                                      std::mt19937_64& rng, int min_seg = 6,
                                                      int max_seg = 24) {
    if (hours < 0) throw ValidationError("piecewise_constant_actions: negative horizon");
    std::vector<Action> out;
    out.reserve(hours);
    while (static_cast<int>(out.size()) < hours) {
        const int seg = static_cast<int>(
            std::uniform_int_distribution<int>(min_seg, max_seg)(rng));
        Action a;
        a.temp_sp = rand_uniform(rng, bounds.temp_lo, bounds.temp_hi);
        a.co2_sp = rand_uniform(rng, bounds.co2_lo, bounds.co2_hi);
        a.light = rand_uniform(rng, bounds.light_lo, bounds.light_hi);
        a.irrigation = rand_uniform(rng, bounds.irr_lo, bounds.irr_hi);
        for (int i = 0; i < seg && static_cast<int>(out.size()) < hours; ++i) out.push_back(a);
    }
    return out;
}

inline Controller actions_controller(std::vector<Action> actions) {
    return [acts = std::move(actions)](const State&, int t) -> Action {
        if (t < 0 || t >= static_cast<int>(acts.size()))
            throw ValidationError("controller: step outside prescribed action sequence");
        return acts[t];
    };
}

inline std::string actions_hash(const std::vector<Action>& actions) {
    std::string buf;
    buf.reserve(actions.size() * 64);
    char line[128];
    for (const auto& a : actions) {
        std::snprintf(line, sizeof(line), "%.17g,%.17g,%.17g,%.17g;", a.temp_sp, a.co2_sp,
                      a.light, a.irrigation);
        buf += line;
    }
    return hash_hex(buf);
}

}  // namespace agc
