#include "ellipsefit/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>

#include "ellipsefit/errors.hpp"
#include "ellipsefit/geometry.hpp"
#include "format.hpp"

namespace ellipsefit {

namespace {

double parse_double(std::string_view token, int line) {
  double value = 0.0;
  const char* begin = token.data();
  const char* end = token.data() + token.size();
  const auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc{} || res.ptr != end)
    throw MalformedFile(line, "not a number: '" + std::string(token) + "'");
  if (!std::isfinite(value))
    throw MalformedFile(line, "non-finite coordinate");
  return value;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

constexpr const char* kPalette[] = {"#000000", "#1f77b4", "#d62728", "#2ca02c",
                                    "#ff7f0e", "#9467bd", "#8c564b"};
constexpr int kPaletteSize = 7;
constexpr int kCurveSamples = 512;

}  // namespace

std::string to_csv(const PointSet& points) {
  const bool labeled = points.has_labels();
  std::string out = labeled ? "x,y,label\n" : "x,y\n";
  for (std::size_t i = 0; i < points.points.size(); ++i) {
    out += format_double(points.points[i].x());
    out += ',';
    out += format_double(points.points[i].y());
    if (labeled) {
      out += ',';
      out += points.labels[i] ? '1' : '0';
    }
    out += '\n';
  }
  return out;
}

void write_csv(const PointSet& points, const std::filesystem::path& path) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open for writing: " + path.string());
  const std::string text = to_csv(points);
  file.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!file) throw IoError("write failed: " + path.string());
}

PointSet parse_csv(const std::string& text) {
  PointSet out;
  int line_no = 0;
  bool saw_header = false;
  bool labeled = false;
  std::size_t pos = 0;

  while (pos < text.size()) {
    std::string_view line;
    const std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) {
      line = std::string_view(text).substr(pos);
      pos = text.size();
    } else {
      line = std::string_view(text).substr(pos, eol - pos);
      pos = eol + 1;
    }
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++line_no;
    if (line.empty()) continue;

    if (!saw_header) {
      if (line == "x,y") {
        labeled = false;
      } else if (line == "x,y,label") {
        labeled = true;
      } else {
        throw MalformedFile(line_no, "expected header 'x,y' or 'x,y,label'");
      }
      saw_header = true;
      continue;
    }

    const auto fields = split_fields(line);
    const std::size_t expected = labeled ? 3 : 2;
    if (fields.size() != expected)
      throw MalformedFile(line_no, "expected " + std::to_string(expected) + " fields");
    const double x = parse_double(fields[0], line_no);
    const double y = parse_double(fields[1], line_no);
    out.points.emplace_back(x, y);
    if (labeled) {
      if (fields[2] == "0")
        out.labels.push_back(0);
      else if (fields[2] == "1")
        out.labels.push_back(1);
      else
        throw MalformedFile(line_no, "label must be 0 or 1");
    }
  }

  if (!saw_header) throw MalformedFile(1, "missing header");
  if (out.points.empty())
    throw MalformedFile(line_no, "no data rows; point set must be non-empty");
  return out;
}

PointSet read_csv(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open for reading: " + path.string());
  std::string text((std::istreambuf_iterator<char>(file)), std::istreambuf_iterator<char>());
  return parse_csv(text);
}

std::string to_svg(const PointSet& points,
                   const std::vector<std::pair<std::string, GeometricEllipse>>& ellipses) {
  constexpr double kWidth = 880, kHeight = 660, kMargin = 50;

  // Sample all curves up front so the bounds cover them.
  std::vector<std::vector<Point2>> curves;
  curves.reserve(ellipses.size());
  for (const auto& [name, e] : ellipses) {
    std::vector<double> ts(kCurveSamples + 1);
    for (int i = 0; i <= kCurveSamples; ++i)
      ts[static_cast<std::size_t>(i)] = 2.0 * std::numbers::pi * i / kCurveSamples;
    curves.push_back(sample_parametric(e, ts).points);
  }

  Point2 lo(0, 0), hi(1, 1);
  bool first = true;
  auto extend = [&](const Point2& p) {
    if (first) {
      lo = hi = p;
      first = false;
    } else {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
  };
  for (const Point2& p : points.points) extend(p);
  for (const auto& curve : curves)
    for (const Point2& p : curve) extend(p);

  Point2 span = hi - lo;
  if (span.x() <= 0) span.x() = 1;
  if (span.y() <= 0) span.y() = 1;
  lo -= 0.05 * span;
  hi += 0.05 * span;
  span = hi - lo;

  const double scale =
      std::min((kWidth - 2 * kMargin) / span.x(), (kHeight - 2 * kMargin) / span.y());
  const double x0 = 0.5 * (kWidth - scale * span.x());
  const double y0 = 0.5 * (kHeight - scale * span.y());
  auto px = [&](double x) { return x0 + (x - lo.x()) * scale; };
  auto py = [&](double y) { return kHeight - y0 - (y - lo.y()) * scale; };

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + format_fixed(kWidth, 0) +
         "\" height=\"" + format_fixed(kHeight, 0) + "\" viewBox=\"0 0 " +
         format_fixed(kWidth, 0) + " " + format_fixed(kHeight, 0) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  for (std::size_t i = 0; i < points.points.size(); ++i) {
    const bool outlier = points.has_labels() && points.labels[i] != 0;
    svg += "<circle cx=\"" + format_fixed(px(points.points[i].x()), 2) + "\" cy=\"" +
           format_fixed(py(points.points[i].y()), 2) + "\" r=\"2.5\"";
    svg += outlier ? " fill=\"none\" stroke=\"#555555\" stroke-width=\"1\"/>\n"
                   : " fill=\"#555555\"/>\n";
  }

  for (std::size_t k = 0; k < curves.size(); ++k) {
    svg += "<polyline fill=\"none\" stroke=\"";
    svg += kPalette[k % kPaletteSize];
    svg += "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < curves[k].size(); ++i) {
      if (i > 0) svg += ' ';
      svg += format_fixed(px(curves[k][i].x()), 2) + "," + format_fixed(py(curves[k][i].y()), 2);
    }
    svg += "\"/>\n";
  }

  double ly = 24;
  svg += "<text x=\"16\" y=\"" + format_fixed(ly, 0) +
         "\" font-family=\"sans-serif\" font-size=\"13\">measurements</text>\n";
  svg += "<circle cx=\"120\" cy=\"" + format_fixed(ly - 4, 0) + "\" r=\"2.5\" fill=\"#555555\"/>\n";
  for (std::size_t k = 0; k < ellipses.size(); ++k) {
    ly += 18;
    svg += "<line x1=\"112\" x2=\"134\" y1=\"" + format_fixed(ly - 4, 0) + "\" y2=\"" +
           format_fixed(ly - 4, 0) + "\" stroke=\"" + kPalette[k % kPaletteSize] +
           "\" stroke-width=\"1.5\"/>\n";
    svg += "<text x=\"16\" y=\"" + format_fixed(ly, 0) +
           "\" font-family=\"sans-serif\" font-size=\"13\">" + xml_escape(ellipses[k].first) +
           "</text>\n";
  }

  svg += "</svg>\n";
  return svg;
}

void render_svg(const PointSet& points,
                const std::vector<std::pair<std::string, GeometricEllipse>>& ellipses,
                const std::filesystem::path& path) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open for writing: " + path.string());
  const std::string text = to_svg(points, ellipses);
  file.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!file) throw IoError("write failed: " + path.string());
}

}  // namespace ellipsefit
