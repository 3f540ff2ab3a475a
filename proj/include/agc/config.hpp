// Experiment configuration: all module configs in one JSON document.
#pragma once

#include <map>
#include <string>

#include "agc/bilevel.hpp"

namespace agc {

struct ExperimentConfig {
    WorldParams world;
    EconConfig econ;
    ActionBounds bounds;
    TwinConfig twin;
    EgaConfig ega;
    SacConfig sac;
    BilevelConfig bilevel;
    std::string weather_profile = "temperate-spring";
    std::uint64_t seed = 0;
    std::map<std::string, std::string> paths; // optional named inputs; must exist at load
};

inline void to_json(nlohmann::json& j, const ExperimentConfig& c) {
    j = nlohmann::json{{"format", "config-v1"},
                       {"world", c.world},
                       {"econ", c.econ},
                       {"bounds", c.bounds},
                       {"twin", c.twin},
                       {"ega", c.ega},
                       {"sac", c.sac},
                       {"bilevel", c.bilevel},
                       {"weather_profile", c.weather_profile},
                       {"seed", c.seed},
                       {"paths", c.paths}};
}

inline void from_json(const nlohmann::json& j, ExperimentConfig& c) {
    ExperimentConfig d;
    c.world = j.value("world", d.world);
    c.econ = j.value("econ", d.econ);
    c.bounds = j.value("bounds", d.bounds);
    c.twin = j.value("twin", d.twin);
    c.ega = j.value("ega", d.ega);
    c.sac = j.value("sac", d.sac);
    c.bilevel = j.value("bilevel", d.bilevel);
    c.weather_profile = j.value("weather_profile", d.weather_profile);
    c.seed = j.value("seed", d.seed);
    c.paths = j.value("paths", d.paths);
}

inline void validate(const ExperimentConfig& c) {
    validate(c.world);
    validate(c.econ);
    weather_profile(c.weather_profile); // throws on unknown id
    for (const auto& [name, path] : c.paths)
        if (!std::filesystem::exists(path))
            throw ValidationError("config path \"" + name + "\" does not exist: " + path);
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
    const auto j = load_json_file(path);
    if (j.contains("format")) require_format(j, "config-v1", path.string());
    ExperimentConfig c = j.get<ExperimentConfig>();
    validate(c);
    return c;
}

inline void save_config(const ExperimentConfig& c, const std::filesystem::path& path) {
    save_json_file(path, nlohmann::json(c), 2);
}

}  // namespace agc
