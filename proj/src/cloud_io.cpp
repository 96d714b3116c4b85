#include "pcmon/cloud_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include "pcmon/errors.hpp"

namespace pcmon {
namespace {

using OffsetKind = ParseError::OffsetKind;

enum class ScalarType { Int8, Uint8, Int16, Uint16, Int32, Uint32, Float32, Float64 };

std::optional<ScalarType> scalar_type_from_name(std::string_view name) {
  if (name == "char" || name == "int8") return ScalarType::Int8;
  if (name == "uchar" || name == "uint8") return ScalarType::Uint8;
  if (name == "short" || name == "int16") return ScalarType::Int16;
  if (name == "ushort" || name == "uint16") return ScalarType::Uint16;
  if (name == "int" || name == "int32") return ScalarType::Int32;
  if (name == "uint" || name == "uint32") return ScalarType::Uint32;
  if (name == "float" || name == "float32") return ScalarType::Float32;
  if (name == "double" || name == "float64") return ScalarType::Float64;
  return std::nullopt;
}

std::size_t scalar_size(ScalarType t) {
  switch (t) {
    case ScalarType::Int8:
    case ScalarType::Uint8:
      return 1;
    case ScalarType::Int16:
    case ScalarType::Uint16:
      return 2;
    case ScalarType::Int32:
    case ScalarType::Uint32:
    case ScalarType::Float32:
      return 4;
    case ScalarType::Float64:
      return 8;
  }
  return 0;
}

struct PlyProperty {
  std::string name;
  ScalarType type = ScalarType::Float32;
  bool is_list = false;
  ScalarType count_type = ScalarType::Uint8;
};

struct PlyElement {
  std::string name;
  std::uint64_t count = 0;
  std::vector<PlyProperty> properties;
};

struct PlyHeader {
  CloudFormat format = CloudFormat::PlyAscii;
  std::vector<PlyElement> elements;
  std::size_t body_offset = 0;  // byte offset of the first body byte
  std::size_t body_line = 0;    // 1-based line number of the first body line
};

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) tokens.push_back(line.substr(start, i - start));
  }
  return tokens;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failure on '" + path.string() + "'");
  return data;
}

PlyHeader parse_ply_header(std::string_view data) {
  PlyHeader header;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  bool saw_format = false;
  auto next_line = [&]() -> std::optional<std::string_view> {
    if (pos >= data.size()) return std::nullopt;
    std::size_t end = data.find('\n', pos);
    if (end == std::string_view::npos) end = data.size();
    std::string_view line = data.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos = std::min(end + 1, data.size());
    ++line_no;
    return line;
  };

  auto first = next_line();
  if (!first || *first != "ply") throw ParseError("missing 'ply' magic", OffsetKind::Line, 1);

  while (true) {
    auto line = next_line();
    if (!line) throw ParseError("unterminated PLY header", OffsetKind::Line, line_no);
    auto tokens = split_ws(*line);
    if (tokens.empty()) continue;
    const auto keyword = tokens[0];
    if (keyword == "end_header") break;
    if (keyword == "comment" || keyword == "obj_info") continue;
    if (keyword == "format") {
      if (tokens.size() != 3) throw ParseError("malformed format line", OffsetKind::Line, line_no);
      if (tokens[1] == "ascii") {
        header.format = CloudFormat::PlyAscii;
      } else if (tokens[1] == "binary_little_endian") {
        header.format = CloudFormat::PlyBinaryLe;
      } else {
        throw ParseError("unsupported PLY encoding '" + std::string(tokens[1]) + "'",
                         OffsetKind::Line, line_no);
      }
      if (tokens[2] != "1.0") {
        throw ParseError("unsupported PLY version '" + std::string(tokens[2]) + "'",
                         OffsetKind::Line, line_no);
      }
      saw_format = true;
    } else if (keyword == "element") {
      std::uint64_t count = 0;
      if (tokens.size() != 3 ||
          std::from_chars(tokens[2].data(), tokens[2].data() + tokens[2].size(), count).ec !=
              std::errc{}) {
        throw ParseError("malformed element line", OffsetKind::Line, line_no);
      }
      header.elements.push_back({std::string(tokens[1]), count, {}});
    } else if (keyword == "property") {
      if (header.elements.empty()) {
        throw ParseError("property before any element", OffsetKind::Line, line_no);
      }
      PlyProperty prop;
      if (tokens.size() == 5 && tokens[1] == "list") {
        auto count_type = scalar_type_from_name(tokens[2]);
        auto item_type = scalar_type_from_name(tokens[3]);
        if (!count_type || !item_type) {
          throw ParseError("unknown list property type", OffsetKind::Line, line_no);
        }
        prop.is_list = true;
        prop.count_type = *count_type;
        prop.type = *item_type;
        prop.name = std::string(tokens[4]);
      } else if (tokens.size() == 3) {
        auto type = scalar_type_from_name(tokens[1]);
        if (!type) {
          throw ParseError("unknown property type '" + std::string(tokens[1]) + "'",
                           OffsetKind::Line, line_no);
        }
        prop.type = *type;
        prop.name = std::string(tokens[2]);
      } else {
        throw ParseError("malformed property line", OffsetKind::Line, line_no);
      }
      header.elements.back().properties.push_back(std::move(prop));
    } else {
      throw ParseError("unexpected header keyword '" + std::string(keyword) + "'",
                       OffsetKind::Line, line_no);
    }
  }
  if (!saw_format) throw ParseError("missing format line", OffsetKind::Line, line_no);
  header.body_offset = pos;
  header.body_line = line_no + 1;
  return header;
}

// Column layout of the vertex element as needed by the readers.
struct VertexLayout {
  std::array<int, 3> xyz{-1, -1, -1};
  std::array<int, 3> rgb{-1, -1, -1};
  bool has_colors() const { return rgb[0] >= 0 && rgb[1] >= 0 && rgb[2] >= 0; }
};

VertexLayout resolve_vertex_layout(const PlyElement& vertex, const LoadOptions& options) {
  VertexLayout layout;
  static constexpr std::array<std::string_view, 3> kXyz{"x", "y", "z"};
  static constexpr std::array<std::string_view, 3> kRgb{"red", "green", "blue"};
  for (int i = 0; i < static_cast<int>(vertex.properties.size()); ++i) {
    const auto& prop = vertex.properties[i];
    bool known = false;
    for (int axis = 0; axis < 3; ++axis) {
      if (prop.name == kXyz[axis]) {
        if (prop.is_list ||
            (prop.type != ScalarType::Float32 && prop.type != ScalarType::Float64)) {
          throw ParseError("vertex property '" + prop.name + "' must be float or double",
                           OffsetKind::Line, 1);
        }
        layout.xyz[axis] = i;
        known = true;
      } else if (prop.name == kRgb[axis]) {
        if (prop.is_list || prop.type != ScalarType::Uint8) {
          throw ParseError("vertex property '" + prop.name + "' must be uchar", OffsetKind::Line,
                           1);
        }
        layout.rgb[axis] = i;
        known = true;
      }
    }
    if (!known) options.on_warning("skipping unknown vertex property '" + prop.name + "'");
  }
  for (int axis = 0; axis < 3; ++axis) {
    if (layout.xyz[axis] < 0) {
      throw ParseError("vertex element lacks property '" + std::string(kXyz[axis]) + "'",
                       OffsetKind::Line, 1);
    }
  }
  const int color_props = static_cast<int>(layout.rgb[0] >= 0) + (layout.rgb[1] >= 0) +
                          (layout.rgb[2] >= 0);
  if (color_props != 0 && color_props != 3) {
    options.on_warning("incomplete red/green/blue properties; colors ignored");
    layout.rgb = {-1, -1, -1};
  }
  return layout;
}

template <typename T>
T read_le(const char* src) {
  T value;
  std::memcpy(&value, src, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    auto* bytes = reinterpret_cast<unsigned char*>(&value);
    std::reverse(bytes, bytes + sizeof(T));
  }
  return value;
}

double read_scalar_le(const char* src, ScalarType type) {
  switch (type) {
    case ScalarType::Int8:
      return read_le<std::int8_t>(src);
    case ScalarType::Uint8:
      return read_le<std::uint8_t>(src);
    case ScalarType::Int16:
      return read_le<std::int16_t>(src);
    case ScalarType::Uint16:
      return read_le<std::uint16_t>(src);
    case ScalarType::Int32:
      return read_le<std::int32_t>(src);
    case ScalarType::Uint32:
      return read_le<std::uint32_t>(src);
    case ScalarType::Float32:
      return read_le<float>(src);
    case ScalarType::Float64:
      return read_le<double>(src);
  }
  return 0.0;
}

PointCloud finish(std::vector<Point3> points, std::optional<std::vector<ColorRGB>> colors,
                  const std::filesystem::path& path) {
  return PointCloud(std::move(points), std::move(colors), path.stem().string());
}

PointCloud read_ply_binary(std::string_view data, const PlyHeader& header,
                           const std::filesystem::path& path, const LoadOptions& options) {
  std::size_t pos = header.body_offset;
  auto need = [&](std::size_t bytes) {
    if (data.size() - pos < bytes) {
      throw ParseError("unexpected end of binary PLY body", OffsetKind::Byte, pos);
    }
  };

  std::vector<Point3> points;
  std::optional<std::vector<ColorRGB>> colors;
  for (const auto& element : header.elements) {
    const bool is_vertex = element.name == "vertex";
    VertexLayout layout;
    if (is_vertex) {
      layout = resolve_vertex_layout(element, options);
      points.reserve(element.count);
      if (layout.has_colors()) colors.emplace().reserve(element.count);
    }
    std::vector<double> values(element.properties.size());
    for (std::uint64_t n = 0; n < element.count; ++n) {
      for (std::size_t k = 0; k < element.properties.size(); ++k) {
        const auto& prop = element.properties[k];
        if (prop.is_list) {
          need(scalar_size(prop.count_type));
          const double count = read_scalar_le(data.data() + pos, prop.count_type);
          pos += scalar_size(prop.count_type);
          if (count < 0) throw ParseError("negative list length", OffsetKind::Byte, pos);
          const auto bytes = static_cast<std::size_t>(count) * scalar_size(prop.type);
          need(bytes);
          pos += bytes;
          continue;
        }
        need(scalar_size(prop.type));
        values[k] = read_scalar_le(data.data() + pos, prop.type);
        pos += scalar_size(prop.type);
      }
      if (!is_vertex) continue;
      Point3 p(values[layout.xyz[0]], values[layout.xyz[1]], values[layout.xyz[2]]);
      if (!p.allFinite()) throw ParseError("non-finite coordinate", OffsetKind::Byte, pos);
      points.push_back(p);
      if (colors) {
        colors->push_back({static_cast<std::uint8_t>(values[layout.rgb[0]]),
                           static_cast<std::uint8_t>(values[layout.rgb[1]]),
                           static_cast<std::uint8_t>(values[layout.rgb[2]])});
      }
    }
    if (is_vertex) break;  // trailing elements (faces, ...) are irrelevant
  }
  return finish(std::move(points), std::move(colors), path);
}

template <typename T>
bool parse_number(std::string_view token, T& out) {
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if constexpr (std::is_floating_point_v<T>) {
    if (first != last && *first == '+') ++first;
  }
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last;
}

double parse_coordinate(std::string_view token, std::size_t line_no) {
  double value = 0.0;
  if (!parse_number(token, value)) {
    throw ParseError("invalid number '" + std::string(token) + "'", OffsetKind::Line, line_no);
  }
  if (!std::isfinite(value)) throw ParseError("non-finite coordinate", OffsetKind::Line, line_no);
  return value;
}

std::uint8_t parse_channel(std::string_view token, std::size_t line_no) {
  int value = -1;
  if (!parse_number(token, value) || value < 0 || value > 255) {
    throw ParseError("color channel '" + std::string(token) + "' outside [0, 255]",
                     OffsetKind::Line, line_no);
  }
  return static_cast<std::uint8_t>(value);
}

class LineReader {
 public:
  LineReader(std::string_view data, std::size_t pos, std::size_t line_no)
      : data_(data), pos_(pos), line_no_(line_no - 1) {}

  std::optional<std::string_view> next() {
    if (pos_ >= data_.size()) return std::nullopt;
    std::size_t end = data_.find('\n', pos_);
    if (end == std::string_view::npos) end = data_.size();
    std::string_view line = data_.substr(pos_, end - pos_);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos_ = end + 1;
    ++line_no_;
    return line;
  }
  std::size_t line_no() const { return line_no_; }

 private:
  std::string_view data_;
  std::size_t pos_;
  std::size_t line_no_;
};

PointCloud read_ply_ascii(std::string_view data, const PlyHeader& header,
                          const std::filesystem::path& path, const LoadOptions& options) {
  LineReader reader(data, header.body_offset, header.body_line);
  std::vector<Point3> points;
  std::optional<std::vector<ColorRGB>> colors;
  for (const auto& element : header.elements) {
    const bool is_vertex = element.name == "vertex";
    VertexLayout layout;
    if (is_vertex) {
      layout = resolve_vertex_layout(element, options);
      points.reserve(element.count);
      if (layout.has_colors()) colors.emplace().reserve(element.count);
    }
    for (std::uint64_t n = 0; n < element.count; ++n) {
      auto line = reader.next();
      if (!line) {
        throw ParseError("unexpected end of file in element '" + element.name + "'",
                         OffsetKind::Line, reader.line_no() + 1);
      }
      if (!is_vertex) continue;
      const auto tokens = split_ws(*line);
      std::size_t t = 0;
      std::array<std::string_view, 3> xyz;
      std::array<std::string_view, 3> rgb;
      for (std::size_t k = 0; k < element.properties.size(); ++k) {
        const auto& prop = element.properties[k];
        if (t >= tokens.size()) {
          throw ParseError("too few values for vertex", OffsetKind::Line, reader.line_no());
        }
        if (prop.is_list) {
          std::size_t count = 0;
          if (!parse_number(tokens[t], count)) {
            throw ParseError("invalid list length", OffsetKind::Line, reader.line_no());
          }
          t += 1 + count;
          continue;
        }
        for (int axis = 0; axis < 3; ++axis) {
          if (static_cast<int>(k) == layout.xyz[axis]) xyz[axis] = tokens[t];
          if (static_cast<int>(k) == layout.rgb[axis]) rgb[axis] = tokens[t];
        }
        ++t;
      }
      if (t != tokens.size()) {
        throw ParseError("unexpected number of values for vertex", OffsetKind::Line,
                         reader.line_no());
      }
      points.emplace_back(parse_coordinate(xyz[0], reader.line_no()),
                          parse_coordinate(xyz[1], reader.line_no()),
                          parse_coordinate(xyz[2], reader.line_no()));
      if (colors) {
        colors->push_back({parse_channel(rgb[0], reader.line_no()),
                           parse_channel(rgb[1], reader.line_no()),
                           parse_channel(rgb[2], reader.line_no())});
      }
    }
    if (is_vertex) break;
  }
  return finish(std::move(points), std::move(colors), path);
}

PointCloud read_xyz(std::string_view data, const std::filesystem::path& path) {
  LineReader reader(data, 0, 1);
  std::vector<Point3> points;
  std::vector<ColorRGB> colors;
  std::optional<bool> with_colors;
  while (auto line = reader.next()) {
    const auto tokens = split_ws(*line);
    if (tokens.empty() || tokens[0].front() == '#') continue;
    if (tokens.size() != 3 && tokens.size() != 6) {
      throw ParseError("expected 'x y z' or 'x y z r g b'", OffsetKind::Line, reader.line_no());
    }
    const bool line_has_colors = tokens.size() == 6;
    if (!with_colors) with_colors = line_has_colors;
    if (*with_colors != line_has_colors) {
      throw ParseError("color/point length mismatch: lines disagree on color columns",
                       OffsetKind::Line, reader.line_no());
    }
    points.emplace_back(parse_coordinate(tokens[0], reader.line_no()),
                        parse_coordinate(tokens[1], reader.line_no()),
                        parse_coordinate(tokens[2], reader.line_no()));
    if (line_has_colors) {
      colors.push_back({parse_channel(tokens[3], reader.line_no()),
                        parse_channel(tokens[4], reader.line_no()),
                        parse_channel(tokens[5], reader.line_no())});
    }
  }
  std::optional<std::vector<ColorRGB>> color_data;
  if (with_colors.value_or(false)) color_data = std::move(colors);
  return finish(std::move(points), std::move(color_data), path);
}

void append_number(std::string& out, double value, const SaveOptions& options) {
  std::array<char, 64> buf;
  std::to_chars_result res;
  if (options.ascii_precision) {
    res = std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::general,
                        *options.ascii_precision);
  } else {
    res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  }
  out.append(buf.data(), res.ptr);
}

template <typename T>
void append_le(std::string& out, T value) {
  char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.append(bytes, sizeof(T));
}

std::string encode_ply(const PointCloud& cloud, CloudFormat format, const SaveOptions& options) {
  std::string out;
  out += "ply\n";
  out += format == CloudFormat::PlyAscii ? "format ascii 1.0\n" : "format binary_little_endian 1.0\n";
  if (!cloud.label().empty()) out += "comment label " + cloud.label() + "\n";
  out += "element vertex " + std::to_string(cloud.size()) + "\n";
  out += "property double x\nproperty double y\nproperty double z\n";
  if (cloud.has_colors()) out += "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  out += "end_header\n";

  const bool colored = cloud.has_colors();
  if (format == CloudFormat::PlyBinaryLe) {
    out.reserve(out.size() + cloud.size() * (24 + (colored ? 3 : 0)));
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      const auto& p = cloud.point(i);
      append_le(out, p.x());
      append_le(out, p.y());
      append_le(out, p.z());
      if (colored) {
        const auto& c = cloud.colors()[i];
        out.push_back(static_cast<char>(c.r));
        out.push_back(static_cast<char>(c.g));
        out.push_back(static_cast<char>(c.b));
      }
    }
    return out;
  }
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto& p = cloud.point(i);
    append_number(out, p.x(), options);
    out += ' ';
    append_number(out, p.y(), options);
    out += ' ';
    append_number(out, p.z(), options);
    if (colored) {
      const auto& c = cloud.colors()[i];
      out += ' ' + std::to_string(c.r) + ' ' + std::to_string(c.g) + ' ' + std::to_string(c.b);
    }
    out += '\n';
  }
  return out;
}

std::string encode_xyz(const PointCloud& cloud, const SaveOptions& options) {
  std::string out;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto& p = cloud.point(i);
    append_number(out, p.x(), options);
    out += ' ';
    append_number(out, p.y(), options);
    out += ' ';
    append_number(out, p.z(), options);
    if (cloud.has_colors()) {
      const auto& c = cloud.colors()[i];
      out += ' ' + std::to_string(c.r) + ' ' + std::to_string(c.g) + ' ' + std::to_string(c.b);
    }
    out += '\n';
  }
  return out;
}

}  // namespace

std::string_view to_string(CloudFormat format) {
  switch (format) {
    case CloudFormat::PlyAscii:
      return "ply-ascii";
    case CloudFormat::PlyBinaryLe:
      return "ply-binary-le";
    case CloudFormat::Xyz:
      return "xyz";
  }
  return "unknown";
}

CloudFormat parse_cloud_format(std::string_view name) {
  if (name == "ply-ascii") return CloudFormat::PlyAscii;
  if (name == "ply-binary-le") return CloudFormat::PlyBinaryLe;
  if (name == "xyz") return CloudFormat::Xyz;
  throw ValidationError("unknown cloud format '" + std::string(name) + "'");
}

CloudFormat detect_format(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::string line;
  std::getline(in, line);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "ply") return CloudFormat::Xyz;
  while (std::getline(in, line)) {
    if (line.rfind("format ascii", 0) == 0) return CloudFormat::PlyAscii;
    if (line.rfind("format binary_little_endian", 0) == 0) return CloudFormat::PlyBinaryLe;
    if (line.rfind("format", 0) == 0) throw ParseError("unsupported PLY encoding", OffsetKind::Line, 2);
    if (line.rfind("end_header", 0) == 0) break;
  }
  throw ParseError("PLY header without format line", OffsetKind::Line, 1);
}

PointCloud load_cloud(const std::filesystem::path& path, CloudFormat format,
                      const LoadOptions& options) {
  LoadOptions opts = options;
  if (!opts.on_warning) {
    opts.on_warning = [path](std::string_view msg) {
      std::cerr << "warning: " << path.string() << ": " << msg << '\n';
    };
  }
  const std::string data = read_file(path);
  if (format == CloudFormat::Xyz) return read_xyz(data, path);

  const PlyHeader header = parse_ply_header(data);
  if (header.format != format) {
    throw ParseError("file is " + std::string(to_string(header.format)) + ", expected " +
                         std::string(to_string(format)),
                     OffsetKind::Line, 2);
  }
  const bool has_vertex = std::any_of(header.elements.begin(), header.elements.end(),
                                      [](const PlyElement& e) { return e.name == "vertex"; });
  if (!has_vertex) throw ParseError("PLY file has no vertex element", OffsetKind::Line, 1);
  return format == CloudFormat::PlyBinaryLe ? read_ply_binary(data, header, path, opts)
                                            : read_ply_ascii(data, header, path, opts);
}

PointCloud load_cloud(const std::filesystem::path& path) {
  return load_cloud(path, detect_format(path));
}

void save_cloud(const PointCloud& cloud, const std::filesystem::path& path, CloudFormat format,
                const SaveOptions& options) {
  const std::string bytes =
      format == CloudFormat::Xyz ? encode_xyz(cloud, options) : encode_ply(cloud, format, options);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.close();
  if (!out) throw IoError("write failure on '" + path.string() + "'");
}

}  // namespace pcmon
