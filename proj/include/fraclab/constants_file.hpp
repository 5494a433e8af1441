// constants_file.hpp — the calibrated-constants store (constants.v1 format).
//
// Plain "key = value" text, '#' comments, keys sorted on save.  The bound
// checks whose constants have no closed form (Holder, Lp, periodic,
// pointwise) read their constants from here; the calibration sweep writes
// them.  The repository ships a frozen copy under data/constants.v1.

#pragma once

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "fraclab/errors.hpp"
#include "fraclab/grid.hpp"

namespace fraclab {

class ConstantsFile {
  public:
    ConstantsFile() = default;

    static ConstantsFile load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw IoError("cannot open constants file " + path);
        ConstantsFile c;
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line = line.substr(0, hash);
            std::istringstream ss(line);
            std::string key, eq;
            double value;
            if (!(ss >> key)) continue; // blank
            if (!(ss >> eq >> value) || eq != "=")
                throw InvalidConfig(path + ":" + std::to_string(lineno) + ": expected 'key = value'");
            c.values_[key] = value;
        }
        return c;
    }

    void save(const std::string& path, const std::vector<std::string>& header_comments = {}) const {
        std::ofstream out(path);
        if (!out) throw IoError("cannot open " + path);
        out << "# fraclab constants.v1\n";
        for (const auto& h : header_comments) out << "# " << h << "\n";
        for (const auto& [k, v] : values_) out << k << " = " << format_g17(v) << "\n";
    }

    bool has(const std::string& key) const { return values_.count(key) != 0; }

    double get(const std::string& key) const {
        auto it = values_.find(key);
        if (it == values_.end()) throw InvalidConfig("missing calibrated constant: " + key);
        return it->second;
    }

    double get_or(const std::string& key, double fallback) const {
        auto it = values_.find(key);
        return it == values_.end() ? fallback : it->second;
    }

    void set(const std::string& key, double value) { values_[key] = value; }

    const std::map<std::string, double>& all() const { return values_; }

  private:
    std::map<std::string, double> values_;
};

// Key scheme shared by calibration and the checks.
inline std::string constant_key(const std::string& family, int d, double alpha) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s.d%d.a%.2f", family.c_str(), d, alpha);
    return buf;
}
inline std::string holder_key(int d, double alpha, double delta) {
    char buf[80];
    std::snprintf(buf, sizeof(buf), "holder.d%d.a%.2f.dl%.2f", d, alpha, delta);
    return buf;
}
inline std::string lp_key(int d, double alpha, double p) {
    char buf[80];
    std::snprintf(buf, sizeof(buf), "lp.d%d.a%.2f.p%g", d, alpha, p);
    return buf;
}

inline std::string default_constants_path() {
#ifdef FRACLAB_SOURCE_DIR
    return std::string(FRACLAB_SOURCE_DIR) + "/data/constants.v1";
#else
    return "data/constants.v1";
#endif
}

} // namespace fraclab
