#pragma once

// Output plumbing: CSV with '.' decimal point and ',' delimiter, plus a
// minimal hand-rolled SVG polyline writer. All numbers print with %.17g so
// identical runs produce byte-identical files.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "karman/common.hpp"

namespace karman {

inline std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

class CsvWriter {
  public:
    explicit CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {}

    void row(const std::vector<double>& values) {
        if (values.size() != header_.size())
            throw precondition_error("CsvWriter: column count mismatch");
        rows_.push_back(values);
    }

    // Mixed row where some cells are preformatted strings.
    void raw_row(const std::vector<std::string>& cells) {
        if (cells.size() != header_.size())
            throw precondition_error("CsvWriter: column count mismatch");
        raw_rows_.push_back({rows_.size(), cells});
    }

    std::string str() const {
        std::string out;
        for (size_t c = 0; c < header_.size(); ++c) {
            out += header_[c];
            out += (c + 1 < header_.size()) ? "," : "\n";
        }
        size_t raw_i = 0;
        for (size_t r = 0; r <= rows_.size(); ++r) {
            while (raw_i < raw_rows_.size() && raw_rows_[raw_i].first == r) {
                const auto& cells = raw_rows_[raw_i].second;
                for (size_t c = 0; c < cells.size(); ++c) {
                    out += cells[c];
                    out += (c + 1 < cells.size()) ? "," : "\n";
                }
                ++raw_i;
            }
            if (r == rows_.size()) break;
            for (size_t c = 0; c < rows_[r].size(); ++c) {
                out += fmt17(rows_[r][c]);
                out += (c + 1 < rows_[r].size()) ? "," : "\n";
            }
        }
        return out;
    }

    void write(const std::filesystem::path& path) const {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw error("cannot open " + path.string() + " for writing");
        f << str();
    }

  private:
    std::vector<std::string> header_;
    std::vector<std::vector<double>> rows_;
    std::vector<std::pair<size_t, std::vector<std::string>>> raw_rows_;
};

// Polyline plot with auto viewBox; enough for contours and V(eps) curves.
class SvgWriter {
  public:
    void polyline(const std::vector<double>& xs, const std::vector<double>& ys,
                  const std::string& stroke = "black") {
        Poly p;
        p.xs = xs;
        p.ys = ys;
        p.stroke = stroke;
        polys_.push_back(std::move(p));
    }

    std::string str() const {
        double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
        for (const auto& p : polys_) {
            for (double v : p.xs) {
                x0 = std::min(x0, v);
                x1 = std::max(x1, v);
            }
            for (double v : p.ys) {
                y0 = std::min(y0, v);
                y1 = std::max(y1, v);
            }
        }
        if (polys_.empty()) x0 = y0 = 0, x1 = y1 = 1;
        double pad = 0.05 * std::max(x1 - x0, y1 - y0) + 1e-12;
        x0 -= pad;
        x1 += pad;
        y0 -= pad;
        y1 += pad;
        const double W = 720.0;
        double scale = W / (x1 - x0);
        double H = (y1 - y0) * scale;
        std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt17(W) +
                          "\" height=\"" + fmt17(H) + "\" viewBox=\"0 0 " + fmt17(W) + " " +
                          fmt17(H) + "\">\n";
        for (const auto& p : polys_) {
            out += "<polyline fill=\"none\" stroke=\"" + p.stroke +
                   "\" stroke-width=\"1\" points=\"";
            for (size_t i = 0; i < p.xs.size(); ++i) {
                // y axis flipped into screen coordinates
                out += fmt17((p.xs[i] - x0) * scale) + "," + fmt17((y1 - p.ys[i]) * scale);
                if (i + 1 < p.xs.size()) out += " ";
            }
            out += "\"/>\n";
        }
        out += "</svg>\n";
        return out;
    }

    void write(const std::filesystem::path& path) const {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw error("cannot open " + path.string() + " for writing");
        f << str();
    }

  private:
    struct Poly {
        std::vector<double> xs, ys;
        std::string stroke;
    };
    std::vector<Poly> polys_;
};

}  // namespace karman
