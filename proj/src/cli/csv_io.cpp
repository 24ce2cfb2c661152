#include "optcs/cli/csv_io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>

namespace optcs::cli {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_line(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

struct Header {
  std::vector<std::size_t> x;  // column of x_1..x_d
  std::optional<std::size_t> y;
  std::optional<std::size_t> c;
  std::size_t width = 0;
};

Header parse_header(std::string_view line, std::string_view source) {
  const auto cols = split_line(line);
  Header h;
  h.width = cols.size();
  std::map<std::size_t, std::size_t> xs;
  for (std::size_t i = 0; i < cols.size(); ++i) {
    const auto name = cols[i];
    auto claim = [&](std::optional<std::size_t>& slot) {
      if (slot) throw Error(std::string(source) + ": duplicate column '" + std::string(name) + "'");
      slot = i;
    };
    if (name == "y") {
      claim(h.y);
    } else if (name == "c") {
      claim(h.c);
    } else if (name.starts_with("x_")) {
      std::size_t k = 0;
      const auto digits = name.substr(2);
      const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), k);
      if (ec != std::errc() || ptr != digits.data() + digits.size() || k == 0) {
        throw Error(std::string(source) + ": bad column name '" + std::string(name) + "'");
      }
      if (!xs.emplace(k, i).second) {
        throw Error(std::string(source) + ": duplicate column '" + std::string(name) + "'");
      }
    } else {
      throw Error(std::string(source) + ": unexpected column '" + std::string(name) + "'");
    }
  }
  for (std::size_t k = 1; k <= xs.size(); ++k) {
    const auto it = xs.find(k);
    if (it == xs.end()) {
      throw Error(std::string(source) + ": missing column 'x_" + std::to_string(k) + "'");
    }
    h.x.push_back(it->second);
  }
  if (h.x.empty()) throw Error(std::string(source) + ": missing column 'x_1'");
  if (!h.c) throw Error(std::string(source) + ": missing column 'c'");
  return h;
}

double parse_cell(std::string_view cell, std::string_view source, std::size_t row,
                  std::size_t col) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  const auto where = std::string(source) + " row " + std::to_string(row) + " column " +
                     std::to_string(col + 1);
  if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size()) {
    throw Error(where + ": not a number '" + std::string(cell) + "'");
  }
  if (!std::isfinite(v)) throw Error(where + ": non-finite value");
  return v;
}

// Calls on_row(values indexed by header column) for each data line.
template <class OnRow>
Header read_table(std::istream& in, std::string_view source, bool require_y, OnRow&& on_row) {
  std::string line;
  if (!std::getline(in, line)) throw Error(std::string(source) + ": missing header");
  const Header h = parse_header(line, source);
  if (require_y && !h.y) throw Error(std::string(source) + ": missing column 'y'");
  std::vector<double> values(h.width);
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto cells = split_line(line);
    if (cells.size() != h.width) {
      throw Error(std::string(source) + " row " + std::to_string(row) + ": expected " +
                  std::to_string(h.width) + " cells, found " + std::to_string(cells.size()));
    }
    for (std::size_t i = 0; i < cells.size(); ++i) values[i] = parse_cell(cells[i], source, row, i);
    on_row(h, values);
  }
  return h;
}

Vector gather_x(const Header& h, const std::vector<double>& values) {
  Vector x(h.x.size());
  for (std::size_t k = 0; k < h.x.size(); ++k) x[k] = values[h.x[k]];
  return x;
}

void write_header(std::ostream& out, std::size_t d, std::string_view tail) {
  for (std::size_t k = 1; k <= d; ++k) out << "x_" << k << ',';
  out << tail << '\n';
}

std::size_t common_dim(std::size_t first, std::size_t next) {
  if (first != next) throw Error("rows have different feature dimensions");
  return first;
}

}  // namespace

std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) throw Error("cannot format number");
  return std::string(buf.data(), ptr);
}

std::vector<LabeledSample> read_labeled_csv(std::istream& in, std::string_view source) {
  std::vector<LabeledSample> rows;
  read_table(in, source, true, [&](const Header& h, const std::vector<double>& v) {
    rows.push_back({gather_x(h, v), v[*h.y], v[*h.c]});
  });
  return rows;
}

std::vector<TestSample> read_test_csv(std::istream& in, std::string_view source) {
  std::vector<TestSample> rows;
  read_table(in, source, false, [&](const Header& h, const std::vector<double>& v) {
    std::optional<double> y;
    if (h.y) y = v[*h.y];
    rows.push_back({gather_x(h, v), v[*h.c], y});
  });
  return rows;
}

std::vector<LabeledSample> read_labeled_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  return read_labeled_csv(in, path);
}

std::vector<TestSample> read_test_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  return read_test_csv(in, path);
}

void write_labeled_csv(std::ostream& out, std::span<const LabeledSample> rows) {
  std::size_t d = rows.empty() ? 0 : rows.front().x.size();
  write_header(out, d, "y,c");
  for (const auto& r : rows) {
    d = common_dim(d, r.x.size());
    for (double v : r.x) out << format_double(v) << ',';
    out << format_double(r.y) << ',' << format_double(r.c) << '\n';
  }
}

void write_test_csv(std::ostream& out, std::span<const TestSample> rows) {
  std::size_t d = rows.empty() ? 0 : rows.front().x.size();
  bool with_y = !rows.empty();
  for (const auto& r : rows) with_y = with_y && r.y_hidden.has_value();
  write_header(out, d, with_y ? "c,y" : "c");
  for (const auto& r : rows) {
    d = common_dim(d, r.x.size());
    for (double v : r.x) out << format_double(v) << ',';
    out << format_double(r.c);
    if (with_y) out << ',' << format_double(*r.y_hidden);
    out << '\n';
  }
}

}  // namespace optcs::cli
