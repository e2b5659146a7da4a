#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "liouville/util.hpp"

namespace liouville {

// Minimal SVG writer with a world->pixel transform.  Figures are assembled
// directly; no plotting library is involved.
class SvgCanvas {
  public:
    SvgCanvas(double x0, double y0, double x1, double y1, int width = 640, int height = 480, int margin = 40)
        : x0_(x0), y0_(y0), x1_(x1), y1_(y1), w_(width), h_(height), m_(margin) {
        body_ << "<rect width=\"" << w_ << "\" height=\"" << h_ << "\" fill=\"white\"/>\n";
    }

    double px(double x) const { return m_ + (x - x0_) / (x1_ - x0_) * (w_ - 2 * m_); }
    double py(double y) const { return h_ - m_ - (y - y0_) / (y1_ - y0_) * (h_ - 2 * m_); }

    void line(double xa, double ya, double xb, double yb, const std::string& color = "black",
              double width = 1.0) {
        body_ << "<line x1=\"" << px(xa) << "\" y1=\"" << py(ya) << "\" x2=\"" << px(xb) << "\" y2=\""
              << py(yb) << "\" stroke=\"" << color << "\" stroke-width=\"" << width << "\"/>\n";
    }

    void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& color = "black",
                  double width = 1.0) {
        if (pts.size() < 2) return;
        body_ << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"" << width
              << "\" points=\"";
        for (auto& [x, y] : pts) body_ << px(x) << "," << py(y) << " ";
        body_ << "\"/>\n";
    }

    void circle(double x, double y, double r_px, const std::string& fill = "black",
                const std::string& stroke = "none") {
        body_ << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"" << r_px << "\" fill=\""
              << fill << "\" stroke=\"" << stroke << "\"/>\n";
    }

    // Axis-aligned world rectangle.
    void rect(double xa, double ya, double xb, double yb, const std::string& fill,
              const std::string& stroke = "none", double opacity = 1.0) {
        double X = px(std::min(xa, xb)), Y = py(std::max(ya, yb));
        double W = std::abs(px(xb) - px(xa)), H = std::abs(py(yb) - py(ya));
        body_ << "<rect x=\"" << X << "\" y=\"" << Y << "\" width=\"" << W << "\" height=\"" << H
              << "\" fill=\"" << fill << "\" stroke=\"" << stroke << "\" fill-opacity=\"" << opacity
              << "\"/>\n";
    }

    void text(double x, double y, const std::string& s, int size = 12, const std::string& color = "black") {
        body_ << "<text x=\"" << px(x) << "\" y=\"" << py(y) << "\" font-size=\"" << size
              << "\" fill=\"" << color << "\" font-family=\"monospace\">" << s << "</text>\n";
    }

    void text_px(double X, double Y, const std::string& s, int size = 12) {
        body_ << "<text x=\"" << X << "\" y=\"" << Y << "\" font-size=\"" << size
              << "\" font-family=\"monospace\">" << s << "</text>\n";
    }

    void frame() {
        body_ << "<rect x=\"" << m_ << "\" y=\"" << m_ << "\" width=\"" << w_ - 2 * m_ << "\" height=\""
              << h_ - 2 * m_ << "\" fill=\"none\" stroke=\"black\"/>\n";
    }

    std::string str() const {
        std::ostringstream out;
        out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w_ << "\" height=\"" << h_
            << "\">\n"
            << body_.str() << "</svg>\n";
        return out.str();
    }

    void save(const std::string& path) const {
        std::ofstream f(path);
        f << str();
    }

  private:
    double x0_, y0_, x1_, y1_;
    int w_, h_, m_;
    std::ostringstream body_;
};

// Inner content of an <svg>...</svg> document, for embedding as a group.
inline std::string strip_svg_tag(const std::string& doc) {
    size_t a = doc.find('>');
    size_t b = doc.rfind("</svg>");
    if (a == std::string::npos || b == std::string::npos || b <= a) return doc;
    return doc.substr(a + 1, b - a - 1);
}

// Simple CSV writer with round-trip-exact number formatting.
class CsvWriter {
  public:
    explicit CsvWriter(std::vector<std::string> header) {
        for (size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
        out_ << "\n";
    }
    void row(const std::vector<std::string>& cells) {
        for (size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
        out_ << "\n";
    }
    std::string str() const { return out_.str(); }
    void save(const std::string& path) const {
        std::ofstream f(path);
        f << out_.str();
    }

  private:
    std::ostringstream out_;
};

}  // namespace liouville
