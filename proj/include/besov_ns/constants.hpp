#pragma once

#include <cmath>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "besov_ns/report.hpp"

namespace besov_ns {

#ifdef BESOV_NS_CONSTANTS_FILE
inline constexpr const char* kDefaultConstantsFile = BESOV_NS_CONSTANTS_FILE;
#else
inline constexpr const char* kDefaultConstantsFile = "data/constants.json";
#endif

/// A frozen constant. `value` is the reference; two-sided checks use
/// [lower, upper]. `band` is the multiplicative regression tolerance.
struct FrozenConstant {
    double value = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    double band = 0.2;
    std::string description;

    /// |x/value - 1| ≤ band.
    bool stable(double x) const { return std::abs(x / value - 1.0) <= band; }
    /// x ≤ value·(1 + band).
    bool below(double x) const { return x <= value * (1.0 + band); }
    /// lower·(1 - band) ≤ x ≤ upper·(1 + band).
    bool inside(double x) const { return x >= lower * (1.0 - band) && x <= upper * (1.0 + band); }
};

/// Map check-name → frozen constant, stored as JSON.
class ConstantsFile {
public:
    bool has(const std::string& name) const { return entries_.count(name) > 0; }

    const FrozenConstant& get(const std::string& name) const {
        auto it = entries_.find(name);
        if (it == entries_.end()) throw std::out_of_range("constants file has no entry '" + name + "'");
        return it->second;
    }

    double value(const std::string& name) const { return get(name).value; }

    void set(const std::string& name, FrozenConstant c) { entries_[name] = std::move(c); }

    const std::map<std::string, FrozenConstant>& entries() const { return entries_; }

    nlohmann::json to_json() const {
        nlohmann::json j = nlohmann::json::object();
        for (const auto& [k, c] : entries_) {
            j[k] = {{"value", c.value}, {"lower", c.lower}, {"upper", c.upper}, {"band", c.band},
                    {"description", c.description}};
        }
        return j;
    }

    static ConstantsFile from_json(const nlohmann::json& j) {
        ConstantsFile f;
        for (const auto& [k, v] : j.items()) {
            FrozenConstant c;
            c.value = v.at("value").get<double>();
            c.lower = v.value("lower", c.value);
            c.upper = v.value("upper", c.value);
            c.band = v.value("band", 0.2);
            c.description = v.value("description", std::string());
            f.set(k, c);
        }
        return f;
    }

    static ConstantsFile load(const std::filesystem::path& path = kDefaultConstantsFile) {
        return from_json(read_json_file(path));
    }

    void save(const std::filesystem::path& path) const {
        if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
        write_json_file(path, to_json());
    }

private:
    std::map<std::string, FrozenConstant> entries_;
};

}  // namespace besov_ns
