#include <catch2/catch_amalgamated.hpp>

#include <filesystem>

#include "agc/cli.hpp"

using namespace agc;

namespace {

namespace fs = std::filesystem;

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    std::string operator/(const std::string& leaf) const { return (path / leaf).string(); }
};

int run(std::initializer_list<std::string> args) {
    return cli_dispatch(std::vector<std::string>(args));
}

}  // namespace

TEST_CASE("cli: no arguments prints usage and exits 1") {
    CHECK(run({}) == 1);
    CHECK(run({"frobnicate"}) == 1);
}

TEST_CASE("cli: gen-weather and gen-data are deterministic end to end") {
    TempDir tmp("agc_cli_gen");
    CHECK(run({"gen-weather", "--days", "2", "--seed", "7", "--out", tmp / "w.json"}) == 0);
    CHECK(run({"gen-weather", "--days", "2", "--seed", "7", "--out", tmp / "w2.json"}) == 0);
    CHECK(read_text_file(tmp / "w.json") == read_text_file(tmp / "w2.json"));
    const WeatherSeries ws = load_weather(tmp / "w.json");
    CHECK(ws.size() == 48);

    CHECK(run({"gen-data", "--episodes", "2", "--days", "1", "--seed", "3", "--out",
               tmp / "data_a"}) == 0);
    CHECK(run({"gen-data", "--episodes", "2", "--days", "1", "--seed", "3", "--out",
               tmp / "data_b"}) == 0);
    CHECK(read_text_file(tmp / "data_a/episode_00000.json") ==
          read_text_file(tmp / "data_b/episode_00000.json"));
    CHECK(read_text_file(tmp / "data_a/manifest.json") ==
          read_text_file(tmp / "data_b/manifest.json"));

    // bad input -> validation exit code
    CHECK(run({"gen-data", "--episodes", "0", "--days", "1", "--out", tmp / "x"}) == 1);
}

TEST_CASE("cli: train-sim, eval-sim, replay round-trip") {
    TempDir tmp("agc_cli_train");

    // a small config keeps this test quick
    ExperimentConfig cfg;
    cfg.twin.climate_hidden = {24, 24};
    cfg.twin.growth_hidden = {24, 24};
    cfg.twin.yield_hidden = {12, 12};
    cfg.twin.epochs = 10;
    save_config(cfg, tmp / "config.json");

    CHECK(run({"gen-data", "--episodes", "6", "--days", "3", "--seed", "11", "--out",
               tmp / "train", "--config", tmp / "config.json"}) == 0);
    CHECK(run({"gen-data", "--episodes", "2", "--days", "3", "--seed", "12", "--out",
               tmp / "test", "--config", tmp / "config.json"}) == 0);

    CHECK(run({"train-sim", "--data", tmp / "train", "--out", tmp / "sim", "--seed", "1",
               "--config", tmp / "config.json"}) == 0);
    CHECK(fs::exists(tmp.path / "sim" / "manifest.json"));

    // identical training run produces byte-identical model files
    CHECK(run({"train-sim", "--data", tmp / "train", "--out", tmp / "sim2", "--seed", "1",
               "--config", tmp / "config.json"}) == 0);
    CHECK(read_text_file(tmp / "sim/climate.json") == read_text_file(tmp / "sim2/climate.json"));
    CHECK(read_text_file(tmp / "sim/yield.json") == read_text_file(tmp / "sim2/yield.json"));

    CHECK(run({"eval-sim", "--sim", tmp / "sim", "--data", tmp / "test", "--out",
               tmp / "r2.csv"}) == 0);
    const R2Table table = read_r2_csv(tmp / "r2.csv");
    CHECK(table.rows.size() == 8); // 8-row CSV contract

    // replay a generated episode: ledger reproduced bitwise
    CHECK(run({"replay", "--trajectory", tmp / "train/episode_00000.json"}) == 0);

    // tampering flips the exit code to runtime failure
    auto doc = load_json_file(tmp / "train/episode_00000.json");
    doc["ledger"]["gains"] = doc["ledger"]["gains"].get<double>() + 1e-9;
    save_json_file(tmp / "tampered.json", doc);
    CHECK(run({"replay", "--trajectory", tmp / "tampered.json"}) == 2);

    // missing files are runtime failures
    CHECK(run({"eval-sim", "--sim", tmp / "nope", "--data", tmp / "test", "--out",
               tmp / "r.csv"}) == 2);
}

TEST_CASE("cli: optimize ega on the world, then report") {
    TempDir tmp("agc_cli_opt");
    CHECK(run({"gen-weather", "--days", "6", "--seed", "5", "--out", tmp / "w.json"}) == 0);
    CHECK(run({"optimize", "ega", "--weather", tmp / "w.json", "--env", "world", "--out",
               tmp / "schedule.json", "--history", tmp / "fitness.csv", "--generations", "15",
               "--interval", "4", "--day-block", "3", "--seed", "2"}) == 0);
    const Schedule s = load_schedule(tmp / "schedule.json");
    CHECK(s.horizon_hours == 144);
    const std::string hist = read_text_file(tmp / "fitness.csv");
    CHECK(hist.rfind("generation,best,mean,std", 0) == 0);
    CHECK(std::count(hist.begin(), hist.end(), '\n') == 17); // header + 16 generations

    // optimize ega on the twin requires --sim
    CHECK(run({"optimize", "ega", "--weather", tmp / "w.json", "--out", tmp / "s2.json"}) == 1);

    // report needs data; build the inputs
    CHECK(run({"gen-data", "--episodes", "2", "--days", "2", "--seed", "21", "--out",
               tmp / "ctrl"}) == 0);
    CHECK(run({"gen-data", "--episodes", "2", "--days", "2", "--seed", "22", "--out",
               tmp / "exp"}) == 0);
    R2Table r2;
    r2.rows.push_back({"AirT", 0.97, 0.97, true, 48});
    write_r2_csv(r2, tmp / "r2.csv");
    CHECK(run({"report", "--r2", tmp / "r2.csv", "--truth", tmp / "ctrl/episode_00000.json",
               "--sim-traj", tmp / "ctrl/episode_00001.json", "--control", tmp / "ctrl",
               "--experiment", tmp / "exp", "--out", tmp / "report"}) == 0);
    CHECK(fs::exists(tmp.path / "report" / "econ_table.md"));
    CHECK(fs::exists(tmp.path / "report" / "net_profit.svg"));
}

TEST_CASE("cli: config file controls defaults and validates") {
    TempDir tmp("agc_cli_cfg");
    write_text_file(tmp / "empty.json", "{}\n");
    CHECK(run({"gen-weather", "--days", "1", "--out", tmp / "w.json", "--config",
               tmp / "empty.json"}) == 0);

    // custom profile through the config
    ExperimentConfig cfg;
    cfg.weather_profile = "cold-snap";
    cfg.seed = 9;
    save_config(cfg, tmp / "cold.json");
    CHECK(run({"gen-weather", "--days", "1", "--out", tmp / "w_cold.json", "--config",
               tmp / "cold.json"}) == 0);
    CHECK(load_weather(tmp / "w_cold.json").profile == "cold-snap");

    // invalid config -> validation error
    write_text_file(tmp / "bad.json", R"({"econ":{"fruit_price":-1,"elec_price":0.08,
        "lamp_power":100,"heat_coeff":0.0004,"co2_price":0.1,"water_price":0.0005,
        "maintenance_per_day":0.0154,"depreciation_per_episode":2.566,"greenhouse_area":667}})");
    CHECK(run({"gen-weather", "--days", "1", "--out", tmp / "w2.json", "--config",
               tmp / "bad.json"}) == 1);

    // config with a missing referenced path
    write_text_file(tmp / "paths.json", R"({"paths":{"dataset":"/definitely/not/here"}})");
    CHECK(run({"gen-weather", "--days", "1", "--out", tmp / "w3.json", "--config",
               tmp / "paths.json"}) == 1);

    // config round-trip
    const ExperimentConfig back = load_config(tmp / "cold.json");
    CHECK(back.weather_profile == "cold-snap");
    CHECK(back.seed == 9);
}
