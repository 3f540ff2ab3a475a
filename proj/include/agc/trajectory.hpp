// Episode trajectories and the on-disk trajectory/dataset formats.
//
// A trajectory holds states s_0..s_T, actions a_0..a_{T-1}, per-step rewards,
// end-of-day cumulative yields, and the finalized economics ledger. The JSON
// layout stores the initial state once and then per-step arrays of length T;
// cumulative fresh weight inside states is recovered from daily_yield, so the
// round trip is exact.
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "agc/domain.hpp"
#include "agc/io.hpp"

namespace agc {

struct Trajectory {
    std::vector<State> states;       // length T+1
    std::vector<Action> actions;     // length T
    std::vector<double> rewards;     // length T
    std::vector<double> daily_yield; // fw after each completed day, length floor(T/24)
    EconomicLedger ledger;
    nlohmann::json meta = nlohmann::json::object();

    int horizon() const { return static_cast<int>(actions.size()); }
    double final_net_profit() const { return ledger.net_profit(); }
};

// Net-profit level after each step (the reward prefix sums).
inline std::vector<double> net_profit_curve(const Trajectory& tr) {
    std::vector<double> curve(tr.rewards.size());
    double acc = 0.0;
    for (size_t t = 0; t < tr.rewards.size(); ++t) {
        acc += tr.rewards[t];
        curve[t] = acc;
    }
    return curve;
}

inline nlohmann::json trajectory_to_json(const Trajectory& tr) {
    const int T = tr.horizon();
    if (static_cast<int>(tr.states.size()) != T + 1)
        throw ValidationError("trajectory_to_json: states must have length T+1");
    if (!tr.states.empty() && tr.states.front().hour_of_day != 0)
        throw ValidationError("trajectory_to_json: episodes must start at hour 0");

    nlohmann::json j;
    j["format"] = "trajectory-v1";
    j["meta"] = tr.meta;

    const State& s0 = tr.states.front();
    double w0[kWeatherDim], c0[kClimateDim], g0[kGrowthDim];
    weather_to(s0.weather, w0);
    climate_to(s0.climate, c0);
    growth_to(s0.growth, g0);
    j["initial"] = {{"weather", std::vector<double>(w0, w0 + kWeatherDim)},
                    {"climate", std::vector<double>(c0, c0 + kClimateDim)},
                    {"growth", std::vector<double>(g0, g0 + kGrowthDim)},
                    {"fw", s0.yield.fw},
                    {"day", s0.day}};

    auto weather = nlohmann::json::array();
    auto climate = nlohmann::json::array();
    auto growth = nlohmann::json::array();
    auto action = nlohmann::json::array();
    for (int t = 0; t < T; ++t) {
        const State& s = tr.states[t + 1];
        double w[kWeatherDim], c[kClimateDim], g[kGrowthDim], a[4];
        weather_to(s.weather, w);
        climate_to(s.climate, c);
        growth_to(s.growth, g);
        action_to(tr.actions[t], a);
        weather.push_back(std::vector<double>(w, w + kWeatherDim));
        climate.push_back(std::vector<double>(c, c + kClimateDim));
        growth.push_back(std::vector<double>(g, g + kGrowthDim));
        action.push_back(std::vector<double>(a, a + 4));
    }
    j["weather"] = std::move(weather);
    j["climate"] = std::move(climate);
    j["growth"] = std::move(growth);
    j["action"] = std::move(action);
    j["reward"] = tr.rewards;
    j["daily_yield"] = tr.daily_yield;
    j["ledger"] = tr.ledger;
    return j;
}

inline Trajectory trajectory_from_json(const nlohmann::json& j, const std::string& context) {
    require_format(j, "trajectory-v1", context);
    try {
        Trajectory tr;
        tr.meta = j.value("meta", nlohmann::json::object());

        const auto& init = j.at("initial");
        State s0;
        std::vector<double> buf;
        init.at("weather").get_to(buf);
        s0.weather = weather_from(buf.data());
        init.at("climate").get_to(buf);
        s0.climate = climate_from(buf.data());
        init.at("growth").get_to(buf);
        s0.growth = growth_from(buf.data());
        s0.yield.fw = init.at("fw").get<double>();
        s0.day = init.value("day", 0);
        s0.hour_of_day = 0;

        const auto& weather = j.at("weather");
        const auto& climate = j.at("climate");
        const auto& growth = j.at("growth");
        const auto& action = j.at("action");
        j.at("reward").get_to(tr.rewards);
        j.at("daily_yield").get_to(tr.daily_yield);
        tr.ledger = j.at("ledger").get<EconomicLedger>();

        const size_t T = weather.size();
        if (climate.size() != T || growth.size() != T || action.size() != T ||
            tr.rewards.size() != T)
            throw IoError(context + ": per-step arrays have mismatched lengths");

        tr.states.reserve(T + 1);
        tr.states.push_back(s0);
        tr.actions.reserve(T);
        for (size_t t = 0; t < T; ++t) {
            State s;
            weather.at(t).get_to(buf);
            s.weather = weather_from(buf.data());
            climate.at(t).get_to(buf);
            s.climate = climate_from(buf.data());
            growth.at(t).get_to(buf);
            s.growth = growth_from(buf.data());
            const size_t k = t + 1;
            s.hour_of_day = static_cast<int>(k % 24);
            s.day = s0.day + static_cast<int>(k / 24);
            const size_t completed = k / 24;
            s.yield.fw = completed == 0 ? s0.yield.fw : tr.daily_yield.at(completed - 1);
            tr.states.push_back(s);

            action.at(t).get_to(buf);
            tr.actions.push_back(action_from(buf.data()));
        }
        return tr;
    } catch (const nlohmann::json::exception& e) {
        throw IoError(context + ": bad trajectory document: " + e.what());
    }
}

inline void save_trajectory(const Trajectory& tr, const std::filesystem::path& path) {
    save_json_file(path, trajectory_to_json(tr));
}

inline Trajectory load_trajectory(const std::filesystem::path& path) {
    return trajectory_from_json(load_json_file(path), path.string());
}

inline std::string trajectory_hash(const Trajectory& tr) {
    return hash_hex(trajectory_to_json(tr).dump());
}

// --- dataset ------------------------------------------------------------

struct Dataset {
    std::vector<Trajectory> episodes;
    nlohmann::json meta = nlohmann::json::object();

    size_t size() const { return episodes.size(); }
};

inline std::string dataset_hash(const Dataset& ds) {
    std::string acc;
    acc.reserve(ds.episodes.size() * 17);
    for (const auto& ep : ds.episodes) acc += trajectory_hash(ep);
    return hash_hex(acc);
}

inline void save_dataset(const Dataset& ds, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    nlohmann::json manifest;
    manifest["format"] = "dataset-v1";
    manifest["meta"] = ds.meta;
    manifest["n_episodes"] = ds.episodes.size();
    auto entries = nlohmann::json::array();
    for (size_t i = 0; i < ds.episodes.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "episode_%05zu.json", i);
        const nlohmann::json doc = trajectory_to_json(ds.episodes[i]);
        const std::string text = doc.dump() + "\n";
        write_text_file(dir / name, text);
        entries.push_back({{"file", name}, {"hash", hash_hex(text)}});
    }
    manifest["episodes"] = std::move(entries);
    save_json_file(dir / "manifest.json", manifest, 2);
}

inline Dataset load_dataset(const std::filesystem::path& dir) {
    const auto manifest = load_json_file(dir / "manifest.json");
    require_format(manifest, "dataset-v1", (dir / "manifest.json").string());
    Dataset ds;
    ds.meta = manifest.value("meta", nlohmann::json::object());
    for (const auto& entry : manifest.at("episodes")) {
        const std::filesystem::path p = dir / entry.at("file").get<std::string>();
        ds.episodes.push_back(load_trajectory(p));
    }
    return ds;
}

}  // namespace agc
