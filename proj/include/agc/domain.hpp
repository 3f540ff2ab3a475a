// Greenhouse MDP domain: state/action types, physical bounds, economics
// ledger, and the per-step reward r_t = net_profit(t+1) - net_profit(t).
#pragma once

#include <cmath>
#include <vector>

#include "agc/common.hpp"

#include "json.hpp"

namespace agc {

// --- observable state --------------------------------------------------

struct Weather {
    double t_out = 10.0;    // outside air temperature, degC
    double rh_out = 70.0;   // outside relative humidity, %
    double i_glob = 0.0;    // global radiation, W/m2
    double wind = 2.0;      // wind speed, m/s
    double t_sky = -5.0;    // effective sky temperature, degC
    double co2_out = 410.0; // outside CO2, ppm
};

struct Climate {
    double air_t = 18.0;    // indoor air temperature, degC
    double air_rh = 70.0;   // indoor relative humidity, %
    double air_co2 = 420.0; // indoor CO2, ppm
    double par = 0.0;       // photosynthetically active radiation, umol/m2/s
};

struct Growth {
    double lai = 0.5;        // leaf area index, m2 leaf / m2 ground
    double plant_load = 0.0; // developing fruit per m2
    double net_growth = 0.0; // net assimilate production, g/m2/h
};

struct YieldState {
    double fw = 0.0; // cumulative fresh fruit weight, kg/m2
};

struct Action {
    double temp_sp = 13.0;   // heating setpoint, degC
    double co2_sp = 400.0;   // CO2 setpoint, ppm
    double light = 0.0;      // lamp fraction, 0..1
    double irrigation = 0.0; // irrigation rate, L/m2/h
};

struct State {
    Weather weather;
    Climate climate;
    Growth growth;
    YieldState yield;
    int hour_of_day = 0; // 0..23
    int day = 0;         // >= 0
};

constexpr int kWeatherDim = 6;
constexpr int kClimateDim = 4;
constexpr int kGrowthDim = 3;
constexpr int kObservableDim = kWeatherDim + kClimateDim + kGrowthDim + 1; // 14

inline void weather_to(const Weather& w, double* out) {
    out[0] = w.t_out;
    out[1] = w.rh_out;
    out[2] = w.i_glob;
    out[3] = w.wind;
    out[4] = w.t_sky;
    out[5] = w.co2_out;
}

inline void climate_to(const Climate& c, double* out) {
    out[0] = c.air_t;
    out[1] = c.air_rh;
    out[2] = c.air_co2;
    out[3] = c.par;
}

inline void growth_to(const Growth& g, double* out) {
    out[0] = g.lai;
    out[1] = g.plant_load;
    out[2] = g.net_growth;
}

inline void action_to(const Action& a, double* out) {
    out[0] = a.temp_sp;
    out[1] = a.co2_sp;
    out[2] = a.light;
    out[3] = a.irrigation;
}

inline Weather weather_from(const double* v) {
    return Weather{v[0], v[1], v[2], v[3], v[4], v[5]};
}
inline Climate climate_from(const double* v) { return Climate{v[0], v[1], v[2], v[3]}; }
inline Growth growth_from(const double* v) { return Growth{v[0], v[1], v[2]}; }
inline Action action_from(const double* v) { return Action{v[0], v[1], v[2], v[3]}; }

// The 14 observable factors: weather(6), climate(4), growth(3), yield(1).
inline std::vector<double> state_observables(const State& s) {
    std::vector<double> v(kObservableDim);
    weather_to(s.weather, v.data());
    climate_to(s.climate, v.data() + 6);
    growth_to(s.growth, v.data() + 10);
    v[13] = s.yield.fw;
    return v;
}

// --- bounds -------------------------------------------------------------

struct ActionBounds {
    double temp_lo = 13.0, temp_hi = 32.0;    // degC
    double co2_lo = 400.0, co2_hi = 1200.0;   // ppm
    double light_lo = 0.0, light_hi = 1.0;    // lamp fraction
    double irr_lo = 0.0, irr_hi = 2.0;        // L/m2/h

    std::vector<double> lows() const { return {temp_lo, co2_lo, light_lo, irr_lo}; }
    std::vector<double> highs() const { return {temp_hi, co2_hi, light_hi, irr_hi}; }
};

// Clips raw setpoints into the action box. Idempotent; rejects non-finite input.
inline Action clamp_action(const Action& a, const ActionBounds& b) {
    if (!std::isfinite(a.temp_sp) || !std::isfinite(a.co2_sp) || !std::isfinite(a.light) ||
        !std::isfinite(a.irrigation))
        throw ValidationError("clamp_action: non-finite action component");
    Action out;
    out.temp_sp = clamp(a.temp_sp, b.temp_lo, b.temp_hi);
    out.co2_sp = clamp(a.co2_sp, b.co2_lo, b.co2_hi);
    out.light = clamp(a.light, b.light_lo, b.light_hi);
    out.irrigation = clamp(a.irrigation, b.irr_lo, b.irr_hi);
    return out;
}

inline bool action_in_bounds(const Action& a, const ActionBounds& b, double tol = 0.0) {
    return a.temp_sp >= b.temp_lo - tol && a.temp_sp <= b.temp_hi + tol &&
           a.co2_sp >= b.co2_lo - tol && a.co2_sp <= b.co2_hi + tol &&
           a.light >= b.light_lo - tol && a.light <= b.light_hi + tol &&
           a.irrigation >= b.irr_lo - tol && a.irrigation <= b.irr_hi + tol;
}

// --- economics ----------------------------------------------------------

struct EconConfig {
    double fruit_price = 0.49;            // EUR/kg
    double elec_price = 0.08;             // EUR/kWh
    double lamp_power = 100.0;            // W/m2 at light = 1
    double heat_coeff = 4e-4;             // EUR/(degC*h*m2) of heating demand
    double co2_price = 0.10;              // EUR/kg injected CO2
    double water_price = 5e-4;            // EUR/L
    double maintenance_per_day = 0.0154;  // EUR/m2/day
    double depreciation_per_episode = 2.566; // EUR/m2, charged once at finalization
    double greenhouse_area = 667.0;       // m2, used to scale per-m2 figures in reports
};

// Sustained CO2 enrichment demand: kg CO2 per m2 per ppm of elevation per hour
// (~4 m3 air per m2 ground at ~1 air change per hour).
constexpr double kCo2KgPerPpmHour = 7.3e-6;

inline void validate(const EconConfig& c) {
    const double fields[] = {c.fruit_price, c.elec_price, c.lamp_power, c.heat_coeff,
                             c.co2_price, c.water_price, c.maintenance_per_day,
                             c.depreciation_per_episode, c.greenhouse_area};
    for (double f : fields)
        if (!(f > 0.0) || !std::isfinite(f))
            throw ValidationError("EconConfig: all fields must be positive and finite");
}

struct StepCost {
    double heating = 0.0;
    double lighting = 0.0;
    double co2 = 0.0;
    double water = 0.0;
    double maintenance = 0.0;

    AGC_NOINLINE double total() const { return heating + lighting + co2 + water + maintenance; }
};

// Per-step actuation cost in EUR/m2 over dt hours. Heating demand is priced
// against the outside temperature; lighting against lamp power draw.
AGC_NOINLINE inline StepCost step_cost_components(const Action& a, const Weather& w, double dt,
                                     const EconConfig& cfg) {
    if (!(dt > 0.0)) throw ValidationError("step_cost: dt must be positive");
    StepCost c;
    c.heating = cfg.heat_coeff * std::max(0.0, a.temp_sp - w.t_out) * dt;
    c.lighting = cfg.lamp_power * a.light * dt * cfg.elec_price / 1000.0;
    c.co2 = cfg.co2_price * kCo2KgPerPpmHour * std::max(0.0, a.co2_sp - w.co2_out) * dt;
    c.water = cfg.water_price * a.irrigation * dt;
    c.maintenance = cfg.maintenance_per_day * dt / 24.0;
    return c;
}

inline double step_cost(const Action& a, const Weather& w, double dt, const EconConfig& cfg) {
    return step_cost_components(a, w, dt, cfg).total();
}

// Fruit gains from a (non-negative) daily fresh-weight increment.
AGC_NOINLINE inline double step_gain(double delta_fw, const EconConfig& cfg) {
    if (delta_fw < 0.0 || !std::isfinite(delta_fw))
        throw ValidationError("step_gain: delta_fw must be non-negative and finite");
    return delta_fw * cfg.fruit_price;
}

struct EconomicLedger {
    double energy_cost = 0.0;
    double co2_cost = 0.0;
    double water_cost = 0.0;
    double maintenance_cost = 0.0;
    double depreciation = 0.0;
    double gains = 0.0;
    bool finalized = false;

    AGC_NOINLINE double total_cost() const {
        return energy_cost + co2_cost + water_cost + maintenance_cost + depreciation;
    }
    AGC_NOINLINE double net_profit() const { return gains - total_cost(); }

    AGC_NOINLINE void accrue(const StepCost& c) {
        energy_cost += c.heating + c.lighting;
        co2_cost += c.co2;
        water_cost += c.water;
        maintenance_cost += c.maintenance;
    }
};

// Episode return with gamma = 1: the reward telescopes over net profit.
inline double reward(const EconomicLedger& prev, const EconomicLedger& next) {
    return next.net_profit() - prev.net_profit();
}

// Charges equipment depreciation exactly once, at episode end.
inline EconomicLedger finalize_ledger(const EconomicLedger& ledger, const EconConfig& cfg) {
    if (ledger.finalized) throw ValidationError("finalize_ledger: ledger already finalized");
    EconomicLedger out = ledger;
    out.depreciation += cfg.depreciation_per_episode;
    out.finalized = true;
    return out;
}

// --- invariant checks (used by tests and file-load validation) ----------

inline void validate(const Weather& w) {
    if (!(w.rh_out >= 0.0 && w.rh_out <= 100.0)) throw ValidationError("Weather: rh_out out of [0,100]");
    if (!(w.i_glob >= 0.0)) throw ValidationError("Weather: i_glob must be >= 0");
    if (!(w.co2_out > 0.0)) throw ValidationError("Weather: co2_out must be > 0");
    if (!(w.wind >= 0.0)) throw ValidationError("Weather: wind must be >= 0");
}

inline void validate(const Climate& c) {
    if (!(c.air_rh >= 0.0 && c.air_rh <= 100.0)) throw ValidationError("Climate: air_rh out of [0,100]");
    if (!(c.air_co2 >= 0.0)) throw ValidationError("Climate: air_co2 must be >= 0");
    if (!(c.par >= 0.0)) throw ValidationError("Climate: par must be >= 0");
    if (!(c.air_t >= -10.0 && c.air_t <= 60.0)) throw ValidationError("Climate: air_t out of [-10,60]");
}

inline void validate(const Growth& g, double lai_max) {
    if (!(g.lai >= 0.0 && g.plant_load >= 0.0))
        throw ValidationError("Growth: lai and plant_load must be >= 0");
    if (lai_max > 0.0 && g.lai > lai_max + 1e-9) throw ValidationError("Growth: lai above lai_max");
}

// --- JSON ---------------------------------------------------------------

inline void to_json(nlohmann::json& j, const ActionBounds& b) {
    j = nlohmann::json{{"temp", {b.temp_lo, b.temp_hi}},
                       {"co2", {b.co2_lo, b.co2_hi}},
                       {"light", {b.light_lo, b.light_hi}},
                       {"irrigation", {b.irr_lo, b.irr_hi}}};
}

inline void from_json(const nlohmann::json& j, ActionBounds& b) {
    auto pair = [&](const char* key, double& lo, double& hi) {
        const auto& p = j.at(key);
        lo = p.at(0).get<double>();
        hi = p.at(1).get<double>();
        if (!(lo < hi)) throw ValidationError(std::string("ActionBounds: empty range for ") + key);
    };
    pair("temp", b.temp_lo, b.temp_hi);
    pair("co2", b.co2_lo, b.co2_hi);
    pair("light", b.light_lo, b.light_hi);
    pair("irrigation", b.irr_lo, b.irr_hi);
}

inline void to_json(nlohmann::json& j, const EconConfig& c) {
    j = nlohmann::json{{"fruit_price", c.fruit_price},
                       {"elec_price", c.elec_price},
                       {"lamp_power", c.lamp_power},
                       {"heat_coeff", c.heat_coeff},
                       {"co2_price", c.co2_price},
                       {"water_price", c.water_price},
                       {"maintenance_per_day", c.maintenance_per_day},
                       {"depreciation_per_episode", c.depreciation_per_episode},
                       {"greenhouse_area", c.greenhouse_area}};
}

inline void from_json(const nlohmann::json& j, EconConfig& c) {
    j.at("fruit_price").get_to(c.fruit_price);
    j.at("elec_price").get_to(c.elec_price);
    j.at("lamp_power").get_to(c.lamp_power);
    j.at("heat_coeff").get_to(c.heat_coeff);
    j.at("co2_price").get_to(c.co2_price);
    j.at("water_price").get_to(c.water_price);
    j.at("maintenance_per_day").get_to(c.maintenance_per_day);
    j.at("depreciation_per_episode").get_to(c.depreciation_per_episode);
    j.at("greenhouse_area").get_to(c.greenhouse_area);
    validate(c);
}

inline void to_json(nlohmann::json& j, const EconomicLedger& l) {
    j = nlohmann::json{{"energy_cost", l.energy_cost},     {"co2_cost", l.co2_cost},
                       {"water_cost", l.water_cost},       {"maintenance_cost", l.maintenance_cost},
                       {"depreciation", l.depreciation},   {"gains", l.gains},
                       {"finalized", l.finalized}};
}

inline void from_json(const nlohmann::json& j, EconomicLedger& l) {
    j.at("energy_cost").get_to(l.energy_cost);
    j.at("co2_cost").get_to(l.co2_cost);
    j.at("water_cost").get_to(l.water_cost);
    j.at("maintenance_cost").get_to(l.maintenance_cost);
    j.at("depreciation").get_to(l.depreciation);
    j.at("gains").get_to(l.gains);
    j.at("finalized").get_to(l.finalized);
}

}  // namespace agc
