// Text/JSON file helpers with path-carrying errors.
#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "agc/common.hpp"

#include "json.hpp"

namespace agc {

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    if (!in.good() && !in.eof()) throw IoError("read failed: " + path.string());
    return ss.str();
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << content;
    out.flush();
    if (!out.good()) throw IoError("write failed: " + path.string());
}

inline nlohmann::json load_json_file(const std::filesystem::path& path) {
    const std::string text = read_text_file(path);
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw IoError("malformed JSON in " + path.string() + ": " + e.what());
    }
}

inline void save_json_file(const std::filesystem::path& path, const nlohmann::json& j,
                           int indent = -1) {
    write_text_file(path, j.dump(indent) + "\n");
}

// Checks a document's format tag and gives a precise error on mismatch.
inline void require_format(const nlohmann::json& j, const std::string& expected,
                           const std::string& context) {
    if (!j.is_object() || !j.contains("format"))
        throw IoError(context + ": missing format tag (expected \"" + expected + "\")");
    const std::string got = j.at("format").get<std::string>();
    if (got != expected)
        throw IoError(context + ": unsupported format version \"" + got + "\" (expected \"" +
                      expected + "\")");
}

}  // namespace agc
