#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "besov_ns/report.hpp"
#include "besov_ns/time_trace.hpp"

namespace besov_ns {

/// Writes `<base>.bin` (complex128 coefficients, component-major, native
/// byte order) and the sidecar `<base>.json` describing the layout.
inline void write_field(const std::filesystem::path& base, const FourierField& f) {
    if (base.has_parent_path()) std::filesystem::create_directories(base.parent_path());
    const auto bin = std::filesystem::path(base.string() + ".bin");
    std::ofstream os(bin, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + bin.string());
    const auto data = f.data();
    os.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size() * sizeof(Complex)));
    nlohmann::json side = {{"format", "besov-ns-field"},
                           {"layout", "complex128, component-major, grid flat mode order"},
                           {"dim", f.grid().dim()},
                           {"n", f.grid().points()},
                           {"components", f.components()},
                           {"divergence_free", f.divergence_free()},
                           {"data", bin.filename().string()}};
    write_json_file(base.string() + ".json", side);
}

/// Reads a field given the base path (with or without the .json/.bin suffix).
inline FourierField read_field(std::filesystem::path base) {
    if (base.extension() == ".json" || base.extension() == ".bin") base.replace_extension();
    const auto side = read_json_file(base.string() + ".json");
    if (side.value("format", std::string()) != "besov-ns-field") {
        throw std::runtime_error(base.string() + ".json is not a field sidecar");
    }
    const TorusGrid g(side.at("dim").get<int>(), side.at("n").get<int>());
    FourierField f(g, side.at("components").get<int>());
    const auto bin = std::filesystem::path(base.string() + ".bin");
    std::ifstream is(bin, std::ios::binary);
    if (!is) throw std::runtime_error("cannot read " + bin.string());
    auto data = f.data();
    const auto bytes = static_cast<std::streamsize>(data.size() * sizeof(Complex));
    is.read(reinterpret_cast<char*>(data.data()), bytes);
    if (is.gcount() != bytes) throw std::runtime_error(bin.string() + " is truncated");
    f.set_divergence_free(side.value("divergence_free", false));
    return f;
}

/// Trace directory: one field per sample (`sample_00000`, ...) plus
/// manifest.json with times, grid, config echo and diagnostics.
inline void write_trace(const std::filesystem::path& dir, const TimeTrace& u, const nlohmann::json& config,
                        const nlohmann::json& diagnostics) {
    std::filesystem::create_directories(dir);
    nlohmann::json files = nlohmann::json::array();
    for (std::size_t i = 0; i < u.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "sample_%05zu", i);
        write_field(dir / name, u.field(i));
        files.push_back(name);
    }
    nlohmann::json manifest = {{"format", "besov-ns-trace"},
                               {"dim", u.grid().dim()},
                               {"n", u.grid().points()},
                               {"times", u.times()},
                               {"samples", files},
                               {"config", config},
                               {"diagnostics", diagnostics}};
    write_json_file(dir / "manifest.json", manifest);
}

inline TimeTrace read_trace(const std::filesystem::path& dir) {
    const auto manifest = read_json_file(dir / "manifest.json");
    if (manifest.value("format", std::string()) != "besov-ns-trace") {
        throw std::runtime_error((dir / "manifest.json").string() + " is not a trace manifest");
    }
    const TorusGrid g(manifest.at("dim").get<int>(), manifest.at("n").get<int>());
    const auto times = manifest.at("times").get<std::vector<double>>();
    const auto& samples = manifest.at("samples");
    if (samples.size() != times.size()) throw std::runtime_error("trace manifest: times and samples differ in length");
    TimeTrace u(g);
    for (std::size_t i = 0; i < times.size(); ++i) u.push_back(times[i], read_field(dir / samples[i].get<std::string>()));
    return u;
}

}  // namespace besov_ns
