#include "stpls/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "stpls/error.hpp"

namespace stpls {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::string_view unquote(std::string_view s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? comma : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

DataMatrix parse_csv(std::string_view text, std::string_view source) {
  const std::string src(source);
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t nl = text.find('\n', start);
    std::string_view line = text.substr(start, nl == std::string_view::npos ? nl : nl - start);
    if (!trim(line).empty()) lines.push_back(line);
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  if (lines.empty()) throw Error(ErrorCode::parse_error, src + ": empty file");

  std::string_view header = lines.front();
  if (header.starts_with("\xEF\xBB\xBF")) header.remove_prefix(3);
  DataMatrix out;
  for (auto field : split_fields(header)) {
    const auto name = unquote(field);
    if (name.empty()) throw Error(ErrorCode::parse_error, src + ": empty column name in header");
    out.col_names.emplace_back(name);
  }
  const auto cols = static_cast<Eigen::Index>(out.col_names.size());
  const auto rows = static_cast<Eigen::Index>(lines.size() - 1);
  out.values.resize(rows, cols);

  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto fields = split_fields(lines[static_cast<std::size_t>(r + 1)]);
    const std::string where = src + " data row " + std::to_string(r + 1);
    if (static_cast<Eigen::Index>(fields.size()) != cols) {
      throw Error(ErrorCode::parse_error, where + ": expected " + std::to_string(cols) +
                                              " fields, found " + std::to_string(fields.size()));
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      const auto cell = unquote(fields[static_cast<std::size_t>(c)]);
      const std::string col = "column '" + out.col_names[static_cast<std::size_t>(c)] + "'";
      if (cell.empty()) throw Error(ErrorCode::parse_error, where + ", " + col + ": blank cell");
      std::string_view digits = cell;
      if (digits.front() == '+') digits.remove_prefix(1);
      double value = 0.0;
      const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
      if (ec != std::errc() || ptr != digits.data() + digits.size()) {
        throw Error(ErrorCode::parse_error,
                    where + ", " + col + ": '" + std::string(cell) + "' is not a number");
      }
      out.values(r, c) = value;
    }
  }
  out.validate(src, 1);
  return out;
}

DataMatrix read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_failure, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_csv(buffer.str(), path.string());
}

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

std::string to_csv(const DataMatrix& data) {
  std::string out;
  for (std::size_t c = 0; c < data.col_names.size(); ++c) {
    out += (c ? "," : "") + data.col_names[c];
  }
  out += '\n';
  for (Eigen::Index r = 0; r < data.rows(); ++r) {
    for (Eigen::Index c = 0; c < data.cols(); ++c) {
      if (c) out += ',';
      out += format_double(data.values(r, c));
    }
    out += '\n';
  }
  return out;
}

void write_text_file(const std::filesystem::path& path, std::string_view body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io_failure, "cannot open " + path.string() + " for writing");
  out.write(body.data(), static_cast<std::streamsize>(body.size()));
  if (!out) throw Error(ErrorCode::io_failure, "write failed for " + path.string());
}

}  // namespace stpls
