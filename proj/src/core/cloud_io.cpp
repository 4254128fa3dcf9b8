#include "woodleaf/cloud_io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string_view>

namespace woodleaf {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::string data;
  in.seekg(0, std::ios::end);
  const auto size = in.tellg();
  if (size < 0) throw Error(ErrorCode::Io, "cannot size " + path.string());
  data.resize(static_cast<std::size_t>(size));
  in.seekg(0);
  in.read(data.data(), static_cast<std::streamsize>(data.size()));
  if (!in && !data.empty()) throw Error(ErrorCode::Io, "read failed for " + path.string());
  return data;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

/// Splits a line into whitespace-separated tokens without allocating.
class Tokens {
 public:
  explicit Tokens(std::string_view line) : rest_(line) {}
  bool next(std::string_view& token) {
    std::size_t i = 0;
    while (i < rest_.size() && is_space(rest_[i])) ++i;
    if (i == rest_.size()) return false;
    std::size_t j = i;
    while (j < rest_.size() && !is_space(rest_[j])) ++j;
    token = rest_.substr(i, j - i);
    rest_ = rest_.substr(j);
    return true;
  }

 private:
  std::string_view rest_;
};

[[noreturn]] void parse_error(const fs::path& path, std::size_t line, const std::string& msg) {
  throw Error(ErrorCode::Parse, path.string() + ":" + std::to_string(line) + ": " + msg);
}

bool parse_double(std::string_view token, double& value) {
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  const auto* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, value);
  return ec == std::errc() && ptr == end;
}

/// Iterates lines of a buffer, tracking 1-based line numbers.
class LineReader {
 public:
  explicit LineReader(std::string_view data, std::size_t first_line = 1)
      : data_(data), line_no_(first_line - 1) {}
  bool next(std::string_view& line) {
    if (pos_ >= data_.size()) return false;
    auto nl = data_.find('\n', pos_);
    if (nl == std::string_view::npos) nl = data_.size();
    line = data_.substr(pos_, nl - pos_);
    pos_ = nl + 1;
    ++line_no_;
    return true;
  }
  std::size_t line_no() const { return line_no_; }
  std::size_t offset() const { return pos_; }

 private:
  std::string_view data_;
  std::size_t pos_ = 0;
  std::size_t line_no_;
};

LabeledCloud read_xyzi(const fs::path& path, Vec3 origin) {
  const std::string data = slurp(path);
  std::vector<Point> points;
  points.reserve(data.size() / 32);
  LineReader lines(data);
  std::string_view line;
  while (lines.next(line)) {
    Tokens tok(line);
    std::string_view t;
    if (!tok.next(t) || t.front() == '#') continue;
    std::array<double, 4> v{};
    for (std::size_t k = 0; k < 4; ++k) {
      if (k > 0 && !tok.next(t)) parse_error(path, lines.line_no(), "expected 4 fields `x y z intensity`");
      if (!parse_double(t, v[k])) parse_error(path, lines.line_no(), "bad number '" + std::string(t) + "'");
      if (!std::isfinite(v[k])) parse_error(path, lines.line_no(), "non-finite value");
    }
    if (tok.next(t) && t.front() != '#') {
      parse_error(path, lines.line_no(), "unexpected extra field '" + std::string(t) + "'");
    }
    points.push_back({v[0] - origin.x, v[1] - origin.y, v[2] - origin.z, v[3]});
  }
  return make_cloud(std::move(points), origin);
}

// ---------------------------------------------------------------- PLY

enum class PlyType { Int8, UInt8, Int16, UInt16, Int32, UInt32, Float32, Float64 };

std::size_t type_size(PlyType t) {
  switch (t) {
    case PlyType::Int8:
    case PlyType::UInt8: return 1;
    case PlyType::Int16:
    case PlyType::UInt16: return 2;
    case PlyType::Int32:
    case PlyType::UInt32:
    case PlyType::Float32: return 4;
    case PlyType::Float64: return 8;
  }
  return 0;
}

bool parse_type(std::string_view name, PlyType& t) {
  static constexpr std::pair<std::string_view, PlyType> kNames[] = {
      {"char", PlyType::Int8},     {"int8", PlyType::Int8},       {"uchar", PlyType::UInt8},
      {"uint8", PlyType::UInt8},   {"short", PlyType::Int16},     {"int16", PlyType::Int16},
      {"ushort", PlyType::UInt16}, {"uint16", PlyType::UInt16},   {"int", PlyType::Int32},
      {"int32", PlyType::Int32},   {"uint", PlyType::UInt32},     {"uint32", PlyType::UInt32},
      {"float", PlyType::Float32}, {"float32", PlyType::Float32}, {"double", PlyType::Float64},
      {"float64", PlyType::Float64}};
  for (const auto& [n, v] : kNames) {
    if (n == name) {
      t = v;
      return true;
    }
  }
  return false;
}

double load_le(const char* p, PlyType t) {
  switch (t) {
    case PlyType::Int8: { std::int8_t v; std::memcpy(&v, p, 1); return v; }
    case PlyType::UInt8: { std::uint8_t v; std::memcpy(&v, p, 1); return v; }
    case PlyType::Int16: { std::int16_t v; std::memcpy(&v, p, 2); return v; }
    case PlyType::UInt16: { std::uint16_t v; std::memcpy(&v, p, 2); return v; }
    case PlyType::Int32: { std::int32_t v; std::memcpy(&v, p, 4); return v; }
    case PlyType::UInt32: { std::uint32_t v; std::memcpy(&v, p, 4); return v; }
    case PlyType::Float32: { float v; std::memcpy(&v, p, 4); return v; }
    case PlyType::Float64: { double v; std::memcpy(&v, p, 8); return v; }
  }
  return 0.0;
}

struct PlyProperty {
  std::string name;
  PlyType type = PlyType::Float32;
  bool is_list = false;
  PlyType count_type = PlyType::UInt8;
};

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<PlyProperty> properties;
};

struct PlyHeader {
  CloudFileFormat format = CloudFileFormat::PlyAscii;
  std::vector<PlyElement> elements;
  std::size_t body_offset = 0;
  std::size_t body_line = 1;
};

PlyHeader parse_ply_header(const fs::path& path, std::string_view data) {
  LineReader lines(data);
  std::string_view line;
  if (!lines.next(line) || line.substr(0, 3) != "ply") parse_error(path, 1, "missing 'ply' magic");
  PlyHeader header;
  bool have_format = false;
  for (;;) {
    if (!lines.next(line)) parse_error(path, lines.line_no(), "header ended without end_header");
    Tokens tok(line);
    std::string_view key;
    if (!tok.next(key)) continue;
    if (key == "end_header") break;
    if (key == "comment" || key == "obj_info") continue;
    if (key == "format") {
      std::string_view f;
      tok.next(f);
      if (f == "ascii") {
        header.format = CloudFileFormat::PlyAscii;
      } else if (f == "binary_little_endian") {
        header.format = CloudFileFormat::PlyBinaryLittleEndian;
      } else {
        parse_error(path, lines.line_no(), "unsupported PLY format '" + std::string(f) + "'");
      }
      have_format = true;
    } else if (key == "element") {
      std::string_view name, count;
      if (!tok.next(name) || !tok.next(count)) parse_error(path, lines.line_no(), "malformed element line");
      PlyElement e;
      e.name = std::string(name);
      auto [ptr, ec] = std::from_chars(count.data(), count.data() + count.size(), e.count);
      if (ec != std::errc() || ptr != count.data() + count.size()) {
        parse_error(path, lines.line_no(), "bad element count");
      }
      header.elements.push_back(std::move(e));
    } else if (key == "property") {
      if (header.elements.empty()) parse_error(path, lines.line_no(), "property before any element");
      PlyProperty prop;
      std::string_view t;
      if (!tok.next(t)) parse_error(path, lines.line_no(), "malformed property line");
      if (t == "list") {
        std::string_view ct, it;
        prop.is_list = true;
        if (!tok.next(ct) || !tok.next(it) || !parse_type(ct, prop.count_type) || !parse_type(it, prop.type)) {
          parse_error(path, lines.line_no(), "malformed list property");
        }
      } else if (!parse_type(t, prop.type)) {
        parse_error(path, lines.line_no(), "unknown property type '" + std::string(t) + "'");
      }
      std::string_view name;
      if (!tok.next(name)) parse_error(path, lines.line_no(), "property without name");
      prop.name = std::string(name);
      header.elements.back().properties.push_back(std::move(prop));
    } else {
      parse_error(path, lines.line_no(), "unknown header keyword '" + std::string(key) + "'");
    }
  }
  if (!have_format) parse_error(path, lines.line_no(), "missing format line");
  header.body_offset = lines.offset();
  header.body_line = lines.line_no() + 1;
  return header;
}

struct VertexLayout {
  std::size_t element = 0;
  std::array<std::size_t, 4> slot{};  // property positions of x, y, z, intensity
};

VertexLayout locate_vertex(const fs::path& path, const PlyHeader& header) {
  VertexLayout layout;
  auto it = std::find_if(header.elements.begin(), header.elements.end(),
                         [](const PlyElement& e) { return e.name == "vertex"; });
  if (it == header.elements.end()) throw Error(ErrorCode::Parse, path.string() + ": no vertex element");
  layout.element = static_cast<std::size_t>(it - header.elements.begin());
  auto find = [&](std::initializer_list<std::string_view> names, const char* label) {
    for (std::size_t i = 0; i < it->properties.size(); ++i) {
      const auto& p = it->properties[i];
      for (auto n : names) {
        if (p.name == n && !p.is_list) return i;
      }
    }
    throw Error(ErrorCode::Parse, path.string() + ": vertex element lacks required property '" +
                                      std::string(label) + "'");
  };
  layout.slot[0] = find({"x"}, "x");
  layout.slot[1] = find({"y"}, "y");
  layout.slot[2] = find({"z"}, "z");
  layout.slot[3] = find({"intensity", "scalar_intensity"}, "intensity");
  return layout;
}

Point make_point(const std::array<double, 4>& v, Vec3 origin) {
  return {v[0] - origin.x, v[1] - origin.y, v[2] - origin.z, v[3]};
}

LabeledCloud read_ply_ascii(const fs::path& path, std::string_view data, const PlyHeader& header,
                            const VertexLayout& layout, Vec3 origin) {
  LineReader lines(data.substr(header.body_offset), header.body_line);
  std::string_view line;
  auto next_record = [&]() {
    while (lines.next(line)) {
      Tokens probe(line);
      std::string_view t;
      if (probe.next(t)) return;
    }
    parse_error(path, lines.line_no(), "unexpected end of file");
  };
  std::vector<Point> points;
  for (std::size_t e = 0; e <= layout.element; ++e) {
    const auto& element = header.elements[e];
    if (e == layout.element) points.reserve(element.count);
    for (std::size_t r = 0; r < element.count; ++r) {
      next_record();
      if (e != layout.element) continue;
      Tokens tok(line);
      std::array<double, 4> v{};
      for (std::size_t p = 0; p < element.properties.size(); ++p) {
        std::string_view t;
        double value = 0.0;
        if (!tok.next(t) || !parse_double(t, value)) parse_error(path, lines.line_no(), "bad vertex record");
        if (element.properties[p].is_list) {
          for (auto n = static_cast<std::size_t>(value); n > 0; --n) {
            if (!tok.next(t)) parse_error(path, lines.line_no(), "short list property");
          }
          continue;
        }
        for (std::size_t k = 0; k < 4; ++k) {
          if (layout.slot[k] == p) v[k] = value;
        }
      }
      for (double d : v) {
        if (!std::isfinite(d)) parse_error(path, lines.line_no(), "non-finite value");
      }
      points.push_back(make_point(v, origin));
    }
  }
  return make_cloud(std::move(points), origin);
}

LabeledCloud read_ply_binary(const fs::path& path, std::string_view data, const PlyHeader& header,
                             const VertexLayout& layout, Vec3 origin) {
  std::size_t pos = header.body_offset;
  auto need = [&](std::size_t n) {
    if (data.size() - pos < n) {
      throw Error(ErrorCode::Parse, path.string() + ": truncated binary body at byte " + std::to_string(pos));
    }
  };
  std::vector<Point> points;
  for (std::size_t e = 0; e <= layout.element; ++e) {
    const auto& element = header.elements[e];
    if (e == layout.element) points.reserve(element.count);
    for (std::size_t r = 0; r < element.count; ++r) {
      std::array<double, 4> v{};
      const std::size_t record_start = pos;
      for (std::size_t p = 0; p < element.properties.size(); ++p) {
        const auto& prop = element.properties[p];
        if (prop.is_list) {
          need(type_size(prop.count_type));
          const auto n = static_cast<std::size_t>(load_le(data.data() + pos, prop.count_type));
          pos += type_size(prop.count_type);
          need(n * type_size(prop.type));
          pos += n * type_size(prop.type);
          continue;
        }
        need(type_size(prop.type));
        if (e == layout.element) {
          const double value = load_le(data.data() + pos, prop.type);
          for (std::size_t k = 0; k < 4; ++k) {
            if (layout.slot[k] == p) v[k] = value;
          }
        }
        pos += type_size(prop.type);
      }
      if (e != layout.element) continue;
      for (double d : v) {
        if (!std::isfinite(d)) {
          throw Error(ErrorCode::Parse,
                      path.string() + ": non-finite value in record at byte " + std::to_string(record_start));
        }
      }
      points.push_back(make_point(v, origin));
    }
  }
  return make_cloud(std::move(points), origin);
}

const char* format_name(CloudFileFormat f) {
  switch (f) {
    case CloudFileFormat::XyziText: return "xyzi";
    case CloudFileFormat::PlyAscii: return "ascii";
    case CloudFileFormat::PlyBinaryLittleEndian: return "binary_little_endian";
  }
  return "?";
}

LabeledCloud read_ply(const fs::path& path, CloudFileFormat declared, Vec3 origin) {
  const std::string data = slurp(path);
  const PlyHeader header = parse_ply_header(path, data);
  if (header.format != declared) {
    throw Error(ErrorCode::Parse, path.string() + ": PLY body is " + format_name(header.format) +
                                      " but " + format_name(declared) + " was requested");
  }
  const VertexLayout layout = locate_vertex(path, header);
  if (header.format == CloudFileFormat::PlyAscii) return read_ply_ascii(path, data, header, layout, origin);
  return read_ply_binary(path, data, header, layout, origin);
}

// ---------------------------------------------------------------- writers

class TextBuffer {
 public:
  void fixed6(double v) { put(std::to_chars(buf_, buf_ + sizeof buf_, v, std::chars_format::fixed, 6)); }
  void shortest(double v) { put(std::to_chars(buf_, buf_ + sizeof buf_, v)); }
  void integer(unsigned v) { put(std::to_chars(buf_, buf_ + sizeof buf_, v)); }
  void ch(char c) { out_.push_back(c); }
  std::string& str() { return out_; }

 private:
  void put(std::to_chars_result r) { out_.append(buf_, r.ptr); }
  char buf_[64];
  std::string out_;
};

Rgb color_of(ClassLabel label, std::size_t index) {
  switch (label) {
    case ClassLabel::Wood: return kWoodColor;
    case ClassLabel::Leaf: return kLeafColor;
    case ClassLabel::Unassigned: break;
  }
  throw Error(ErrorCode::InvalidArgument, "point " + std::to_string(index) + " is unassigned");
}

void write_ply(const LabeledCloud& cloud, const fs::path& path, CloudFileFormat format, bool colored) {
  if (colored) {
    if (cloud.labels.size() != cloud.points.size()) {
      throw Error(ErrorCode::InvalidArgument, "label count does not match point count");
    }
    for (std::size_t i = 0; i < cloud.labels.size(); ++i) color_of(cloud.labels[i], i);
  }
  std::ostringstream header;
  header << "ply\nformat " << format_name(format) << " 1.0\ncomment woodleaf\n"
         << "element vertex " << cloud.size() << '\n'
         << "property double x\nproperty double y\nproperty double z\nproperty double intensity\n";
  if (colored) header << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  header << "end_header\n";

  auto out = open_out(path);
  out << header.str();
  const Vec3 o = cloud.origin;
  if (format == CloudFileFormat::PlyAscii) {
    TextBuffer text;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      const Point& p = cloud.points[i];
      text.fixed6(p.x + o.x), text.ch(' '), text.fixed6(p.y + o.y), text.ch(' ');
      text.fixed6(p.z + o.z), text.ch(' '), text.shortest(p.intensity);
      if (colored) {
        const Rgb c = color_of(cloud.labels[i], i);
        text.ch(' '), text.integer(c.r), text.ch(' '), text.integer(c.g), text.ch(' '), text.integer(c.b);
      }
      text.ch('\n');
    }
    out << text.str();
  } else {
    const std::size_t stride = 4 * sizeof(double) + (colored ? 3 : 0);
    std::string body(stride * cloud.size(), '\0');
    char* dst = body.data();
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      const Point& p = cloud.points[i];
      const double v[4] = {p.x + o.x, p.y + o.y, p.z + o.z, p.intensity};
      std::memcpy(dst, v, sizeof v);
      if (colored) {
        const Rgb c = color_of(cloud.labels[i], i);
        dst[32] = static_cast<char>(c.r), dst[33] = static_cast<char>(c.g), dst[34] = static_cast<char>(c.b);
      }
      dst += stride;
    }
    out.write(body.data(), static_cast<std::streamsize>(body.size()));
  }
  finish(out, path);
}

}  // namespace

CloudFileFormat detect_format(const fs::path& path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext != ".ply") return CloudFileFormat::XyziText;
  std::ifstream in(path, std::ios::binary);
  if (!in) return CloudFileFormat::PlyBinaryLittleEndian;  // new file: default output flavour
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("format ", 0) == 0) {
      return line.find("ascii") != std::string::npos ? CloudFileFormat::PlyAscii
                                                     : CloudFileFormat::PlyBinaryLittleEndian;
    }
    if (line.rfind("end_header", 0) == 0) break;
  }
  throw Error(ErrorCode::Parse, path.string() + ": PLY header has no format line");
}

LabeledCloud read_cloud(const fs::path& path, CloudFileFormat format, Vec3 scanner_position) {
  if (!scanner_position.finite()) throw Error(ErrorCode::InvalidArgument, "scanner position is not finite");
  if (format == CloudFileFormat::XyziText) return read_xyzi(path, scanner_position);
  return read_ply(path, format, scanner_position);
}

void write_cloud(const LabeledCloud& cloud, const fs::path& path, CloudFileFormat format) {
  if (format != CloudFileFormat::XyziText) return write_ply(cloud, path, format, false);
  TextBuffer text;
  const Vec3 o = cloud.origin;
  for (const Point& p : cloud.points) {
    text.fixed6(p.x + o.x), text.ch(' '), text.fixed6(p.y + o.y), text.ch(' ');
    text.fixed6(p.z + o.z), text.ch(' '), text.shortest(p.intensity), text.ch('\n');
  }
  auto out = open_out(path);
  out << text.str();
  finish(out, path);
}

void write_cloud_colored(const LabeledCloud& cloud, const fs::path& path, CloudFileFormat format) {
  if (format == CloudFileFormat::XyziText) {
    throw Error(ErrorCode::InvalidArgument, "colored output requires a PLY format");
  }
  write_ply(cloud, path, format, true);
}

std::vector<ClassLabel> read_labels(const fs::path& path) {
  const std::string data = slurp(path);
  std::vector<ClassLabel> labels;
  labels.reserve(data.size() / 2);
  LineReader lines(data);
  std::string_view line;
  while (lines.next(line)) {
    Tokens tok(line);
    std::string_view t;
    if (!tok.next(t)) continue;
    if (t == "0") {
      labels.push_back(ClassLabel::Wood);
    } else if (t == "1") {
      labels.push_back(ClassLabel::Leaf);
    } else {
      parse_error(path, lines.line_no(), "label must be 0 (wood) or 1 (leaf), got '" + std::string(t) + "'");
    }
    if (tok.next(t)) parse_error(path, lines.line_no(), "more than one label on a line");
  }
  return labels;
}

void write_labels(std::span<const ClassLabel> labels, const fs::path& path) {
  std::string text;
  text.reserve(labels.size() * 2);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    switch (labels[i]) {
      case ClassLabel::Wood: text += "0\n"; break;
      case ClassLabel::Leaf: text += "1\n"; break;
      case ClassLabel::Unassigned:
        throw Error(ErrorCode::InvalidArgument, "label " + std::to_string(i) + " is unassigned");
    }
  }
  auto out = open_out(path);
  out << text;
  finish(out, path);
}

}  // namespace woodleaf
