// io.hpp — deterministic text output helpers.  All numeric output goes
// through %.17g so identical runs produce identical bytes.

#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "fraclab/errors.hpp"
#include "fraclab/grid.hpp"

namespace fraclab {

class CsvWriter {
  public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header) : out_(path) {
        if (!out_) throw IoError("cannot open " + path);
        write_row_strings(header);
    }

    void write_row_strings(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
    }

    static std::string cell(double v) { return format_g17(v); }
    static std::string cell(int v) { return std::to_string(v); }
    static std::string cell(std::size_t v) { return std::to_string(v); }
    static std::string cell(bool v) { return v ? "1" : "0"; }
    static std::string cell(const std::string& s) { return s; }

    template <class... Ts>
    void row(const Ts&... vs) {
        write_row_strings({cell(vs)...});
    }

  private:
    std::ofstream out_;
};

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

inline void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path);
    out << bytes;
}

} // namespace fraclab
