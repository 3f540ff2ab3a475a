// Learned three-stage greenhouse simulator: an hourly climate net
// (weather x action x climate -> climate), an hourly growth net
// (climate x growth -> growth), and a daily yield net predicting a
// non-negative fresh-weight increment from the hour-23 growth state.
// The hourly nets regress one-step state increments (the prediction is
// previous state plus the net output); absolute-value regression lets small
// systematic biases in slow variables compound over multi-week rollouts.
// Trained from trajectory datasets; supports streaming fine-tune passes
// on newly collected data with optional replay mixing.
#pragma once

#include <array>
#include <string>
#include <vector>

#include "agc/net.hpp"
#include "agc/rollout.hpp"
#include "agc/trajectory.hpp"

namespace agc {

constexpr int kClimateNetIn = kWeatherDim + 4 + kClimateDim; // 14
constexpr int kGrowthNetIn = kClimateDim + kGrowthDim;       // 7
constexpr int kYieldNetIn = kGrowthDim + 1;                  // 4

struct TwinConfig {
    std::vector<int> climate_hidden = {64, 64};
    std::vector<int> growth_hidden = {64, 64};
    std::vector<int> yield_hidden = {64, 64};
    double lr = 0.03;
    int epochs = 8;
    int batch = 64;
    double val_fraction = 0.1;
    // caps keep training time bounded on large datasets; sampling is seeded
    int max_climate_samples = 300000;
    int max_growth_samples = 300000;
    int max_yield_samples = 200000;
};

inline void to_json(nlohmann::json& j, const TwinConfig& c) {
    j = nlohmann::json{{"climate_hidden", c.climate_hidden},
                       {"growth_hidden", c.growth_hidden},
                       {"yield_hidden", c.yield_hidden},
                       {"lr", c.lr},
                       {"epochs", c.epochs},
                       {"batch", c.batch},
                       {"val_fraction", c.val_fraction},
                       {"max_climate_samples", c.max_climate_samples},
                       {"max_growth_samples", c.max_growth_samples},
                       {"max_yield_samples", c.max_yield_samples}};
}

inline void from_json(const nlohmann::json& j, TwinConfig& c) {
    TwinConfig d;
    c.climate_hidden = j.value("climate_hidden", d.climate_hidden);
    c.growth_hidden = j.value("growth_hidden", d.growth_hidden);
    c.yield_hidden = j.value("yield_hidden", d.yield_hidden);
    c.lr = j.value("lr", d.lr);
    c.epochs = j.value("epochs", d.epochs);
    c.batch = j.value("batch", d.batch);
    c.val_fraction = j.value("val_fraction", d.val_fraction);
    c.max_climate_samples = j.value("max_climate_samples", d.max_climate_samples);
    c.max_growth_samples = j.value("max_growth_samples", d.max_growth_samples);
    c.max_yield_samples = j.value("max_yield_samples", d.max_yield_samples);
}

struct TwinSimulator {
    Net climate_net;
    Net growth_net;
    Net yield_net;
    int version = 0;
    std::vector<std::string> finetune_history; // hashes of every dataset seen
    TwinConfig config;
};

inline void check_arities(const TwinSimulator& sim) {
    if (sim.climate_net.input_size() != kClimateNetIn || sim.climate_net.output_size() != 4)
        throw ValidationError("twin: climate net must map 14 inputs to 4 outputs");
    if (sim.growth_net.input_size() != kGrowthNetIn || sim.growth_net.output_size() != 3)
        throw ValidationError("twin: growth net must map 7 inputs to 3 outputs");
    if (sim.yield_net.input_size() != kYieldNetIn || sim.yield_net.output_size() != 1)
        throw ValidationError("twin: yield net must map 4 inputs to 1 output");
}

inline TwinSimulator make_twin(const TwinConfig& cfg, std::uint64_t seed) {
    auto widths = [](int in, const std::vector<int>& hidden, int out) {
        std::vector<int> sizes{in};
        sizes.insert(sizes.end(), hidden.begin(), hidden.end());
        sizes.push_back(out);
        return sizes;
    };
    TwinSimulator sim;
    sim.config = cfg;
    sim.climate_net = net_init(widths(kClimateNetIn, cfg.climate_hidden, 4), split_seed(seed, 1));
    sim.growth_net = net_init(widths(kGrowthNetIn, cfg.growth_hidden, 3), split_seed(seed, 2));
    sim.yield_net = net_init(widths(kYieldNetIn, cfg.yield_hidden, 1), split_seed(seed, 3));
    check_arities(sim);
    return sim;
}

// --- one-step predictions -----------------------------------------------

inline Climate predict_climate(const TwinSimulator& sim, const Weather& w_prev,
                               const Action& a_prev, const Climate& c_prev) {
    std::vector<double> x(kClimateNetIn);
    weather_to(w_prev, x.data());
    action_to(a_prev, x.data() + kWeatherDim);
    climate_to(c_prev, x.data() + kWeatherDim + 4);
    const auto dy = forward(sim.climate_net, x);
    Climate c;
    c.air_t = clamp(c_prev.air_t + dy[0], -10.0, 60.0);
    c.air_rh = clamp(c_prev.air_rh + dy[1], 0.0, 100.0);
    c.air_co2 = std::max(0.0, c_prev.air_co2 + dy[2]);
    c.par = std::max(0.0, c_prev.par + dy[3]);
    return c;
}

inline Growth predict_growth(const TwinSimulator& sim, const Climate& c, const Growth& g_prev) {
    std::vector<double> x(kGrowthNetIn);
    climate_to(c, x.data());
    growth_to(g_prev, x.data() + kClimateDim);
    const auto dy = forward(sim.growth_net, x);
    Growth g;
    g.lai = std::max(0.0, g_prev.lai + dy[0]);
    g.plant_load = std::max(0.0, g_prev.plant_load + dy[1]);
    g.net_growth = std::max(0.0, g_prev.net_growth + dy[2]);
    return g;
}

// Daily yield from the hour-23 growth state of the completed day; the head
// predicts an increment clamped at zero, so cumulative yield never decreases.
inline YieldState predict_yield_day(const TwinSimulator& sim, const Growth& g_last,
                                    const YieldState& y_prev) {
    std::vector<double> x(kYieldNetIn);
    growth_to(g_last, x.data());
    x[kGrowthDim] = y_prev.fw;
    const auto y = forward(sim.yield_net, x);
    return YieldState{y_prev.fw + std::max(0.0, y[0])};
}

struct TwinDynamics {
    const TwinSimulator* sim;

    std::pair<Climate, Growth> step(const State& s, const Action& a, const Weather&) const {
        const Climate c = predict_climate(*sim, s.weather, a, s.climate);
        return {c, predict_growth(*sim, c, s.growth)};
    }

    double daily_yield_increment(const Growth& g_h23, double fw, double, int) const {
        return predict_yield_day(*sim, g_h23, YieldState{fw}).fw - fw;
    }
};

template <class Ctl>
Trajectory sim_rollout(const TwinSimulator& sim, Ctl&& controller,
                       const std::vector<Weather>& weather, const State& initial,
                       const EconConfig& econ, const ActionBounds& bounds, int hours,
                       nlohmann::json meta = nlohmann::json::object()) {
    check_arities(sim);
    meta["sim_version"] = sim.version;
    return rollout(TwinDynamics{&sim}, std::forward<Ctl>(controller), weather, initial, econ,
                   bounds, hours, std::move(meta));
}

// --- transition extraction ----------------------------------------------

struct TransitionSets {
    Matrix climate_x, climate_y;
    Matrix growth_x, growth_y;
    Matrix yield_x, yield_y;
};

namespace detail {

// Seeded uniform subsample: marks `keep` of `total` indices.
inline std::vector<bool> choose_indices(size_t total, size_t keep, std::mt19937_64& rng) {
    std::vector<bool> mark(total, false);
    if (keep >= total) {
        mark.assign(total, true);
        return mark;
    }
    // Floyd's algorithm
    for (size_t j = total - keep; j < total; ++j) {
        const size_t t = std::uniform_int_distribution<size_t>(0, j)(rng);
        if (mark[t]) mark[j] = true;
        else mark[t] = true;
    }
    return mark;
}

}  // namespace detail

template <class TrajRange>
TransitionSets extract_transitions(const TrajRange& episodes, const TwinConfig& cfg,
                                   std::uint64_t seed) {
    size_t n_hourly = 0, n_daily = 0;
    for (const auto& ep : episodes) {
        if (ep.states.size() < 2)
            throw ValidationError("extract_transitions: episode with fewer than 2 timesteps");
        n_hourly += ep.states.size() - 1;
        n_daily += ep.daily_yield.size();
    }
    auto rng = make_rng(split_seed(seed, 0xda7a));
    const auto keep_c = detail::choose_indices(
        n_hourly, std::min<size_t>(n_hourly, cfg.max_climate_samples), rng);
    const auto keep_g = detail::choose_indices(
        n_hourly, std::min<size_t>(n_hourly, cfg.max_growth_samples), rng);
    const auto keep_y = detail::choose_indices(
        n_daily, std::min<size_t>(n_daily, cfg.max_yield_samples), rng);

    TransitionSets ts;
    ts.climate_x = Matrix(static_cast<int>(std::count(keep_c.begin(), keep_c.end(), true)),
                          kClimateNetIn);
    ts.climate_y = Matrix(ts.climate_x.rows, 4);
    ts.growth_x = Matrix(static_cast<int>(std::count(keep_g.begin(), keep_g.end(), true)),
                         kGrowthNetIn);
    ts.growth_y = Matrix(ts.growth_x.rows, 3);
    ts.yield_x = Matrix(static_cast<int>(std::count(keep_y.begin(), keep_y.end(), true)),
                        kYieldNetIn);
    ts.yield_y = Matrix(ts.yield_x.rows, 1);

    size_t ih = 0, id = 0;
    int rc = 0, rg = 0, ry = 0;
    for (const auto& ep : episodes) {
        const auto& st = ep.states;
        for (size_t t = 0; t + 1 < st.size(); ++t, ++ih) {
            if (keep_c[ih]) {
                double* x = ts.climate_x.row(rc);
                weather_to(st[t].weather, x);
                action_to(ep.actions[t], x + kWeatherDim);
                climate_to(st[t].climate, x + kWeatherDim + 4);
                double* y = ts.climate_y.row(rc);
                climate_to(st[t + 1].climate, y);
                for (int k = 0; k < kClimateDim; ++k) y[k] -= x[kWeatherDim + 4 + k];
                ++rc;
            }
            if (keep_g[ih]) {
                double* x = ts.growth_x.row(rg);
                climate_to(st[t + 1].climate, x);
                growth_to(st[t].growth, x + kClimateDim);
                double* y = ts.growth_y.row(rg);
                growth_to(st[t + 1].growth, y);
                for (int k = 0; k < kGrowthDim; ++k) y[k] -= x[kClimateDim + k];
                ++rg;
            }
        }
        for (size_t d = 0; d < ep.daily_yield.size(); ++d, ++id) {
            if (!keep_y[id]) continue;
            const State& pre = st[24 * d + 23]; // hour-23 state of day d
            double* x = ts.yield_x.row(ry);
            growth_to(pre.growth, x);
            x[kGrowthDim] = pre.yield.fw;
            ts.yield_y.row(ry)[0] = st[24 * (d + 1)].yield.fw - pre.yield.fw;
            ++ry;
        }
    }
    return ts;
}

// --- training ------------------------------------------------------------

struct TwinTrainResult {
    TwinSimulator sim;
    TrainReport climate, growth, yield;
};

namespace detail {

struct SplitSet {
    Matrix train_x, train_y, val_x, val_y;
};

inline SplitSet split_train_val(const Matrix& X, const Matrix& Y, double val_fraction,
                                std::mt19937_64& rng) {
    std::vector<int> order(X.rows);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    const int n_val = std::min(X.rows - 1, static_cast<int>(X.rows * val_fraction));
    SplitSet s;
    s.val_x = Matrix(n_val, X.cols);
    s.val_y = Matrix(n_val, Y.cols);
    s.train_x = Matrix(X.rows - n_val, X.cols);
    s.train_y = Matrix(X.rows - n_val, Y.cols);
    for (int i = 0; i < n_val; ++i) {
        std::copy(X.row(order[i]), X.row(order[i]) + X.cols, s.val_x.row(i));
        std::copy(Y.row(order[i]), Y.row(order[i]) + Y.cols, s.val_y.row(i));
    }
    for (int i = n_val; i < X.rows; ++i) {
        std::copy(X.row(order[i]), X.row(order[i]) + X.cols, s.train_x.row(i - n_val));
        std::copy(Y.row(order[i]), Y.row(order[i]) + Y.cols, s.train_y.row(i - n_val));
    }
    return s;
}

inline TrainReport train_one(Net& net, const Matrix& X, const Matrix& Y, const TwinConfig& cfg,
                             std::uint64_t seed) {
    auto rng = make_rng(split_seed(seed, 0x5911));
    const SplitSet s = split_train_val(X, Y, cfg.val_fraction, rng);
    TrainOptions opts;
    opts.lr = cfg.lr;
    opts.epochs = cfg.epochs;
    opts.batch = cfg.batch;
    opts.seed = split_seed(seed, 0x7a11);
    opts.val_inputs = &s.val_x;
    opts.val_targets = &s.val_y;
    return train_mse(net, s.train_x, s.train_y, opts);
}

}  // namespace detail

template <class TrajRange>
TwinTrainResult train_simulator_on(const TrajRange& episodes, const TwinConfig& cfg,
                                   std::uint64_t seed, const std::string& data_hash) {
    TwinTrainResult out{make_twin(cfg, split_seed(seed, 0x1217)), {}, {}, {}};
    const TransitionSets ts = extract_transitions(episodes, cfg, seed);
    if (ts.climate_x.rows < 2 || ts.growth_x.rows < 2)
        throw ValidationError("train_simulator: not enough transitions");
    if (ts.yield_x.rows < 1)
        throw ValidationError("train_simulator: dataset has no completed days");
    out.climate = detail::train_one(out.sim.climate_net, ts.climate_x, ts.climate_y, cfg,
                                    split_seed(seed, 11));
    out.growth = detail::train_one(out.sim.growth_net, ts.growth_x, ts.growth_y, cfg,
                                   split_seed(seed, 12));
    out.yield = detail::train_one(out.sim.yield_net, ts.yield_x, ts.yield_y, cfg,
                                  split_seed(seed, 13));
    out.sim.version = 1;
    out.sim.finetune_history.push_back(data_hash);
    return out;
}

inline TwinTrainResult train_simulator(const Dataset& dataset, const TwinConfig& cfg,
                                       std::uint64_t seed) {
    if (dataset.episodes.empty()) throw ValidationError("train_simulator: empty dataset");
    return train_simulator_on(dataset.episodes, cfg, seed, dataset_hash(dataset));
}

// --- fine-tuning ----------------------------------------------------------

struct FineTuneOptions {
    double lr = 0.01;
    int epochs = 15;
    int batch = 64;
    std::uint64_t seed = 0;
    // Fraction of each fine-tune batch drawn from older data, when provided.
    double replay_fraction = 0.5;
    const std::vector<Trajectory>* replay = nullptr;
};

struct FineTuneReport {
    // normalized-space MSE on the new data, before and after
    double pre_climate = 0, post_climate = 0;
    double pre_growth = 0, post_growth = 0;
    double pre_yield = 0, post_yield = 0;
};

namespace detail {

inline Matrix vstack(const Matrix& a, const Matrix& b) {
    if (a.empty()) return b;
    if (b.empty()) return a;
    if (a.cols != b.cols) throw ValidationError("vstack: column mismatch");
    Matrix m(a.rows + b.rows, a.cols);
    std::copy(a.a.begin(), a.a.end(), m.a.begin());
    std::copy(b.a.begin(), b.a.end(), m.a.begin() + a.a.size());
    return m;
}

// Continues SGD from the current weights, keeping the best epoch as measured
// on the new data alone, so a fine-tune pass never ends worse than it started.
inline std::pair<double, double> finetune_one(Net& net, const Matrix& new_x, const Matrix& new_y,
                                              const Matrix& mix_x, const Matrix& mix_y,
                                              const FineTuneOptions& opts) {
    const double pre = mse_loss(net, new_x, new_y);
    if (opts.epochs <= 0) return {pre, pre};
    Net best = net;
    double best_mse = pre;
    for (int e = 0; e < opts.epochs; ++e) {
        TrainOptions t;
        t.lr = opts.lr;
        t.epochs = 1;
        t.batch = opts.batch;
        t.seed = split_seed(opts.seed, 100 + e);
        t.refit_normalization = false;
        train_mse(net, mix_x, mix_y, t);
        const double mse = mse_loss(net, new_x, new_y);
        if (mse < best_mse) {
            best_mse = mse;
            best = net;
        }
    }
    net = best;
    return {pre, best_mse};
}

}  // namespace detail

inline FineTuneReport fine_tune(TwinSimulator& sim, const std::vector<Trajectory>& new_trajs,
                                const FineTuneOptions& opts) {
    if (sim.version < 1) throw ValidationError("fine_tune: simulator has not been trained");
    if (new_trajs.empty()) throw ValidationError("fine_tune: no new trajectories");
    check_arities(sim);

    const TransitionSets fresh = extract_transitions(new_trajs, sim.config, opts.seed);
    TransitionSets mix = fresh;
    if (opts.replay && !opts.replay->empty() && opts.replay_fraction > 0.0) {
        TwinConfig replay_cfg = sim.config;
        const double ratio = opts.replay_fraction / std::max(1e-9, 1.0 - opts.replay_fraction);
        replay_cfg.max_climate_samples =
            std::max(1, static_cast<int>(fresh.climate_x.rows * ratio));
        replay_cfg.max_growth_samples =
            std::max(1, static_cast<int>(fresh.growth_x.rows * ratio));
        replay_cfg.max_yield_samples = std::max(1, static_cast<int>(fresh.yield_x.rows * ratio));
        const TransitionSets old =
            extract_transitions(*opts.replay, replay_cfg, split_seed(opts.seed, 0x01d));
        mix.climate_x = detail::vstack(fresh.climate_x, old.climate_x);
        mix.climate_y = detail::vstack(fresh.climate_y, old.climate_y);
        mix.growth_x = detail::vstack(fresh.growth_x, old.growth_x);
        mix.growth_y = detail::vstack(fresh.growth_y, old.growth_y);
        mix.yield_x = detail::vstack(fresh.yield_x, old.yield_x);
        mix.yield_y = detail::vstack(fresh.yield_y, old.yield_y);
    }

    FineTuneReport rep;
    std::tie(rep.pre_climate, rep.post_climate) = detail::finetune_one(
        sim.climate_net, fresh.climate_x, fresh.climate_y, mix.climate_x, mix.climate_y, opts);
    std::tie(rep.pre_growth, rep.post_growth) = detail::finetune_one(
        sim.growth_net, fresh.growth_x, fresh.growth_y, mix.growth_x, mix.growth_y, opts);
    if (fresh.yield_x.rows > 0)
        std::tie(rep.pre_yield, rep.post_yield) = detail::finetune_one(
            sim.yield_net, fresh.yield_x, fresh.yield_y, mix.yield_x, mix.yield_y, opts);

    sim.version += 1;
    std::string acc;
    for (const auto& tr : new_trajs) acc += trajectory_hash(tr);
    sim.finetune_history.push_back(hash_hex(acc));
    return rep;
}

// --- evaluation -----------------------------------------------------------

inline const std::array<const char*, 8>& r2_variable_names() {
    static const std::array<const char*, 8> names = {"AirT",      "AirRH",     "AirCO2",
                                                     "PAR",       "LAI",       "PlantLoad",
                                                     "NetGrowth", "FW"};
    return names;
}

struct R2Entry {
    std::string variable;
    double r2_raw = 0.0;
    double r2_clamped = 0.0;
    bool defined = true; // false when the target variable has zero variance
    size_t n = 0;
};

struct R2Table {
    std::vector<R2Entry> rows;

    double mean_clamped() const {
        double acc = 0.0;
        size_t n = 0;
        for (const auto& r : rows)
            if (r.defined) {
                acc += r.r2_clamped;
                ++n;
            }
        return n ? acc / n : 0.0;
    }
    const R2Entry& at(const std::string& var) const {
        for (const auto& r : rows)
            if (r.variable == var) return r;
        throw ValidationError("R2Table: unknown variable " + var);
    }
};

// Direct-formula R^2 = 1 - SS_res/SS_tot over paired vectors.
inline R2Entry r_squared(const std::string& name, const std::vector<double>& truth,
                         const std::vector<double>& pred) {
    if (truth.size() != pred.size() || truth.empty())
        throw ValidationError("r_squared: mismatched or empty vectors");
    R2Entry e;
    e.variable = name;
    e.n = truth.size();
    double mean = 0.0;
    for (double y : truth) mean += y;
    mean /= truth.size();
    double ss_tot = 0.0, ss_res = 0.0;
    for (size_t i = 0; i < truth.size(); ++i) {
        ss_tot += (truth[i] - mean) * (truth[i] - mean);
        ss_res += (truth[i] - pred[i]) * (truth[i] - pred[i]);
    }
    if (ss_tot < 1e-12) {
        e.defined = false;
        e.r2_raw = std::numeric_limits<double>::quiet_NaN();
        e.r2_clamped = std::numeric_limits<double>::quiet_NaN();
        return e;
    }
    e.r2_raw = 1.0 - ss_res / ss_tot;
    e.r2_clamped = clamp(e.r2_raw, 0.0, 1.0);
    return e;
}

// One-step-ahead (teacher-forced) R^2 per state variable over a test dataset.
template <class TrajRange>
R2Table evaluate_r2_on(const TwinSimulator& sim, const TrajRange& episodes) {
    check_arities(sim);
    std::array<std::vector<double>, 8> truth, pred;
    for (const auto& ep : episodes) {
        const auto& st = ep.states;
        if (st.size() < 2) throw ValidationError("evaluate_r2: episode with fewer than 2 states");
        for (size_t t = 0; t + 1 < st.size(); ++t) {
            const Climate c_hat = predict_climate(sim, st[t].weather, ep.actions[t], st[t].climate);
            const Climate& c_true = st[t + 1].climate;
            const Growth g_hat = predict_growth(sim, c_true, st[t].growth);
            const Growth& g_true = st[t + 1].growth;
            double cb[4], gb[3];
            climate_to(c_hat, cb);
            growth_to(g_hat, gb);
            truth[0].push_back(c_true.air_t);
            pred[0].push_back(cb[0]);
            truth[1].push_back(c_true.air_rh);
            pred[1].push_back(cb[1]);
            truth[2].push_back(c_true.air_co2);
            pred[2].push_back(cb[2]);
            truth[3].push_back(c_true.par);
            pred[3].push_back(cb[3]);
            truth[4].push_back(g_true.lai);
            pred[4].push_back(gb[0]);
            truth[5].push_back(g_true.plant_load);
            pred[5].push_back(gb[1]);
            truth[6].push_back(g_true.net_growth);
            pred[6].push_back(gb[2]);
        }
        for (size_t d = 0; d < ep.daily_yield.size(); ++d) {
            const State& pre = st[24 * d + 23];
            const YieldState y_hat = predict_yield_day(sim, pre.growth, pre.yield);
            truth[7].push_back(st[24 * (d + 1)].yield.fw);
            pred[7].push_back(y_hat.fw);
        }
    }
    R2Table table;
    for (size_t v = 0; v < truth.size(); ++v)
        table.rows.push_back(r_squared(r2_variable_names()[v], truth[v], pred[v]));
    return table;
}

inline R2Table evaluate_r2(const TwinSimulator& sim, const Dataset& test) {
    if (test.episodes.empty()) throw ValidationError("evaluate_r2: empty test dataset");
    return evaluate_r2_on(sim, test.episodes);
}

// --- bundle I/O -----------------------------------------------------------

inline void save_simulator(const TwinSimulator& sim, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    save_net(sim.climate_net, dir / "climate.json");
    save_net(sim.growth_net, dir / "growth.json");
    save_net(sim.yield_net, dir / "yield.json");
    nlohmann::json manifest{{"format", "twin-v1"},
                            {"version", sim.version},
                            {"finetune_history", sim.finetune_history},
                            {"config", sim.config}};
    save_json_file(dir / "manifest.json", manifest, 2);
}

inline TwinSimulator load_simulator(const std::filesystem::path& dir) {
    const auto manifest = load_json_file(dir / "manifest.json");
    require_format(manifest, "twin-v1", (dir / "manifest.json").string());
    TwinSimulator sim;
    sim.version = manifest.at("version").get<int>();
    manifest.at("finetune_history").get_to(sim.finetune_history);
    sim.config = manifest.value("config", TwinConfig{});
    sim.climate_net = load_net(dir / "climate.json");
    sim.growth_net = load_net(dir / "growth.json");
    sim.yield_net = load_net(dir / "yield.json");
    check_arities(sim);
    return sim;
}

}  // namespace agc
