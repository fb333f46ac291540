#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace besov_ns {

inline constexpr const char* kVersion = "0.1.0";

/// Named (t, value) series.
struct Series {
    std::vector<double> t;
    std::vector<double> value;
};

/// Result of one experiment: series, scalar summaries and boolean verdicts.
/// Every verdict names the series or scalars it was decided from.
class ExperimentReport {
public:
    struct Verdict {
        bool value = false;
        std::vector<std::string> references;
    };

    ExperimentReport() = default;
    explicit ExperimentReport(std::string name) : name_(std::move(name)) {}

    const std::string& name() const { return name_; }
    void set_name(std::string n) { name_ = std::move(n); }

    void add_series(const std::string& key, std::vector<double> t, std::vector<double> v) {
        if (t.size() != v.size()) throw std::invalid_argument("ExperimentReport: series '" + key + "' length mismatch");
        series_[key] = Series{std::move(t), std::move(v)};
    }

    void add_scalar(const std::string& key, double v) { scalars_[key] = v; }

    void add_verdict(const std::string& key, bool value, std::vector<std::string> refs) {
        for (const auto& r : refs) {
            if (!series_.count(r) && !scalars_.count(r)) {
                throw std::invalid_argument("ExperimentReport: verdict '" + key + "' references unknown entry '" + r + "'");
            }
        }
        verdicts_[key] = Verdict{value, std::move(refs)};
    }

    bool has_series(const std::string& k) const { return series_.count(k) > 0; }
    bool has_scalar(const std::string& k) const { return scalars_.count(k) > 0; }
    bool has_verdict(const std::string& k) const { return verdicts_.count(k) > 0; }

    const Series& series(const std::string& k) const { return lookup(series_, k, "series"); }
    double scalar(const std::string& k) const { return lookup(scalars_, k, "scalar"); }
    bool verdict(const std::string& k) const { return lookup(verdicts_, k, "verdict").value; }

    const std::map<std::string, Series>& all_series() const { return series_; }
    const std::map<std::string, double>& scalars() const { return scalars_; }
    const std::map<std::string, Verdict>& verdicts() const { return verdicts_; }

    /// True when every verdict holds (vacuously true without verdicts).
    bool passed() const {
        for (const auto& [k, v] : verdicts_) {
            if (!v.value) return false;
        }
        return true;
    }

    nlohmann::json& config() { return config_; }
    const nlohmann::json& config() const { return config_; }
    nlohmann::json& provenance() { return provenance_; }
    const nlohmann::json& provenance() const { return provenance_; }

    /// Adds entries of another report under a key prefix.
    void merge(const ExperimentReport& other, const std::string& prefix) {
        for (const auto& [k, s] : other.series_) series_[prefix + k] = s;
        for (const auto& [k, v] : other.scalars_) scalars_[prefix + k] = v;
        for (const auto& [k, v] : other.verdicts_) {
            Verdict p = v;
            for (auto& r : p.references) r = prefix + r;
            verdicts_[prefix + k] = std::move(p);
        }
    }

private:
    template <typename M>
    static const typename M::mapped_type& lookup(const M& m, const std::string& k, const char* what) {
        auto it = m.find(k);
        if (it == m.end()) throw std::out_of_range(std::string("ExperimentReport: no ") + what + " named '" + k + "'");
        return it->second;
    }

    std::string name_;
    std::map<std::string, Series> series_;
    std::map<std::string, double> scalars_;
    std::map<std::string, Verdict> verdicts_;
    nlohmann::json config_ = nlohmann::json::object();
    nlohmann::json provenance_ = nlohmann::json::object();
};

/// JSON form; the provenance block is the only part allowed to differ between reruns.
inline nlohmann::json to_json(const ExperimentReport& rep, bool with_provenance = true) {
    nlohmann::json j;
    j["experiment"] = rep.name();
    j["config"] = rep.config();
    j["scalars"] = nlohmann::json::object();
    for (const auto& [k, v] : rep.scalars()) j["scalars"][k] = v;
    j["series"] = nlohmann::json::object();
    for (const auto& [k, s] : rep.all_series()) j["series"][k] = {{"t", s.t}, {"value", s.value}};
    j["verdicts"] = nlohmann::json::object();
    for (const auto& [k, v] : rep.verdicts()) j["verdicts"][k] = {{"value", v.value}, {"references", v.references}};
    if (with_provenance) j["provenance"] = rep.provenance();
    return j;
}

inline ExperimentReport report_from_json(const nlohmann::json& j) {
    ExperimentReport rep(j.at("experiment").get<std::string>());
    if (j.contains("config")) rep.config() = j["config"];
    if (j.contains("provenance")) rep.provenance() = j["provenance"];
    for (const auto& [k, v] : j.at("scalars").items()) rep.add_scalar(k, v.is_null() ? std::nan("") : v.get<double>());
    for (const auto& [k, v] : j.at("series").items()) {
        std::vector<double> t, val;
        for (const auto& x : v.at("t")) t.push_back(x.is_null() ? std::nan("") : x.get<double>());
        for (const auto& x : v.at("value")) val.push_back(x.is_null() ? std::nan("") : x.get<double>());
        rep.add_series(k, std::move(t), std::move(val));
    }
    for (const auto& [k, v] : j.at("verdicts").items()) {
        rep.add_verdict(k, v.at("value").get<bool>(), v.at("references").get<std::vector<std::string>>());
    }
    return rep;
}

inline void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    os << j.dump(2) << "\n";
}

inline nlohmann::json read_json_file(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot read " + path.string());
    return nlohmann::json::parse(is);
}

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// One CSV per series, named <series>.csv with header "t,value". Returns the files written.
inline std::vector<std::filesystem::path> emit_plot_data(const ExperimentReport& rep, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> out;
    for (const auto& [k, s] : rep.all_series()) {
        const auto path = dir / (k + ".csv");
        std::ofstream os(path);
        if (!os) throw std::runtime_error("cannot write " + path.string());
        os << "t,value\n";
        for (std::size_t i = 0; i < s.t.size(); ++i) os << format_double(s.t[i]) << "," << format_double(s.value[i]) << "\n";
        out.push_back(path);
    }
    return out;
}

/// <dir>/<name>.json plus the plot-data CSVs in the same directory.
inline std::filesystem::path write_report(const ExperimentReport& rep, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    const auto path = dir / (rep.name() + ".json");
    write_json_file(path, to_json(rep));
    emit_plot_data(rep, dir);
    return path;
}

}  // namespace besov_ns
