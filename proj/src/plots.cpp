#include "ocrnn/plots.hpp"

#include "ocrnn/format.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace ocrnn {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 400.0;
constexpr double kMargin = 50.0;

struct Range {
  double lo;
  double hi;
};

Range range_of(const std::vector<Vector>& series) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& s : series) {
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      if (!std::isfinite(s(i))) continue;
      lo = std::min(lo, s(i));
      hi = std::max(hi, s(i));
    }
  }
  if (!std::isfinite(lo)) return {0.0, 1.0};
  if (lo == hi) return {lo - 0.5, hi + 0.5};
  return {lo, hi};
}

double map(double v, Range r, double a, double b) {
  return a + (v - r.lo) / (r.hi - r.lo) * (b - a);
}

std::string polyline(const Vector& x, const Vector& y, Range rx, Range ry, const char* stroke,
                     const char* id) {
  std::string pts;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (i) pts += ' ';
    pts += format_fixed(map(x(i), rx, kMargin, kWidth - kMargin), 2);
    pts += ',';
    pts += format_fixed(map(y(i), ry, kHeight - kMargin, kMargin), 2);
  }
  return std::string("  <polyline id=\"") + id + "\" fill=\"none\" stroke=\"" + stroke +
         "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
}

std::string frame(const std::string& title, Range rx, Range ry, const std::string& ylabel) {
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << kWidth
     << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n"
     << "  <title>" << title << "</title>\n"
     << "  <rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" fill=\"white\"/>\n"
     << "  <rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\"" << kWidth - 2 * kMargin
     << "\" height=\"" << kHeight - 2 * kMargin << "\" fill=\"none\" stroke=\"black\"/>\n"
     << "  <text x=\"" << kWidth / 2 << "\" y=\"30\" text-anchor=\"middle\" font-size=\"14\">"
     << title << "</text>\n"
     << "  <text x=\"" << kMargin << "\" y=\"" << kHeight - 30 << "\" font-size=\"10\">"
     << format_double(rx.lo) << "</text>\n"
     << "  <text x=\"" << kWidth - kMargin << "\" y=\"" << kHeight - 30
     << "\" text-anchor=\"end\" font-size=\"10\">" << format_double(rx.hi) << "</text>\n"
     << "  <text x=\"" << kMargin - 4 << "\" y=\"" << kHeight - kMargin
     << "\" text-anchor=\"end\" font-size=\"10\">" << format_double(ry.lo) << "</text>\n"
     << "  <text x=\"" << kMargin - 4 << "\" y=\"" << kMargin + 10
     << "\" text-anchor=\"end\" font-size=\"10\">" << format_double(ry.hi) << "</text>\n"
     << "  <text x=\"12\" y=\"" << kHeight / 2 << "\" font-size=\"10\">" << ylabel << "</text>\n";
  return os.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open for writing: " + path.string());
  os << text;
  if (!os) throw Error("write failed: " + path.string());
}

}  // namespace

std::string fit_svg(const Vector& x, const Vector& y, const Vector& y_hat) {
  if (x.size() == 0) throw InvalidArgument("fit plot: no points");
  if (y.size() != x.size() || y_hat.size() != x.size()) {
    throw InvalidArgument("fit plot: x, y and prediction lengths differ");
  }
  const Range rx = range_of({x});
  const Range ry = range_of({y, y_hat});
  std::string out = frame("Model vs Data", rx, ry, "y");
  out += polyline(x, y, rx, ry, "black", "data");
  out += polyline(x, y_hat, rx, ry, "red", "model");
  out += "</svg>\n";
  return out;
}

std::string sse_svg(const std::vector<double>& sse, bool log_scale) {
  if (sse.empty()) throw InvalidArgument("SSE plot: empty trace");
  const auto n = static_cast<Eigen::Index>(sse.size());
  Vector x(n);
  Vector y(n);
  double floor = std::numeric_limits<double>::infinity();
  for (double v : sse) {
    if (v > 0.0 && std::isfinite(v)) floor = std::min(floor, v);
  }
  if (!std::isfinite(floor)) floor = 1.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    x(i) = static_cast<double>(i + 1);
    const double v = sse[static_cast<std::size_t>(i)];
    y(i) = log_scale ? std::log10(std::max(v, floor)) : v;
  }
  const Range rx = n == 1 ? Range{0.5, 1.5} : range_of({x});
  const Range ry = range_of({y});
  std::string out = frame("Sum of Squared Errors", rx, ry, log_scale ? "log10 SSE" : "SSE");
  out += polyline(x, y, rx, ry, "blue", "sse");
  out += "</svg>\n";
  return out;
}

void write_fit_svg(const std::filesystem::path& path, const Vector& x, const Vector& y,
                   const Vector& y_hat) {
  write_text(path, fit_svg(x, y, y_hat));
}

void write_sse_svg(const std::filesystem::path& path, const std::vector<double>& sse,
                   bool log_scale) {
  write_text(path, sse_svg(sse, log_scale));
}

}  // namespace ocrnn
