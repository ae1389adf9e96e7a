#include "sparsekm/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

#include "sparsekm/errors.hpp"

namespace sparsekm {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& cell, long line_no) {
  char* end = nullptr;
  const double v = std::strtod(cell.c_str(), &end);
  if (end == cell.c_str() || *end != '\0') throw CsvError("bad numeric cell '" + cell + "'", line_no);
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_dataset_csv(const Dataset& ds, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  const bool with_labels = ds.truth.has_value();
  for (int j = 1; j <= ds.p(); ++j) out << (j > 1 ? "," : "") << "x" << j;
  if (with_labels) out << ",label";
  out << "\n";
  for (int i = 0; i < ds.n(); ++i) {
    for (int j = 0; j < ds.p(); ++j) out << (j > 0 ? "," : "") << format_double(ds.X(j, i));
    if (with_labels) out << "," << ds.truth->labels[static_cast<size_t>(i)];
    out << "\n";
  }
}

Dataset read_dataset_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::string line;
  long line_no = 0;
  if (!std::getline(in, line)) throw CsvError("empty file", 1);
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto header = split_line(line);
  if (header.empty()) throw CsvError("empty header", line_no);
  bool with_labels = header.back() == "label";
  const int p = static_cast<int>(header.size()) - (with_labels ? 1 : 0);
  if (p < 1) throw CsvError("no feature columns", line_no);
  for (int j = 0; j < p; ++j) {
    if (header[static_cast<size_t>(j)] != "x" + std::to_string(j + 1))
      throw CsvError("expected header column x" + std::to_string(j + 1), line_no);
  }

  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split_line(line);
    if (static_cast<int>(cells.size()) != p + (with_labels ? 1 : 0))
      throw CsvError("expected " + std::to_string(p + (with_labels ? 1 : 0)) + " cells, got " +
                         std::to_string(cells.size()),
                     line_no);
    std::vector<double> row(static_cast<size_t>(p));
    for (int j = 0; j < p; ++j) row[static_cast<size_t>(j)] = parse_double(cells[static_cast<size_t>(j)], line_no);
    rows.push_back(std::move(row));
    if (with_labels) {
      const double lab = parse_double(cells.back(), line_no);
      if (lab != static_cast<int>(lab) || lab < 1) throw CsvError("bad label", line_no);
      labels.push_back(static_cast<int>(lab));
    }
  }
  if (rows.size() < 2) throw CsvError("need at least 2 observations", line_no);

  Dataset ds;
  ds.X.resize(p, static_cast<Eigen::Index>(rows.size()));
  for (size_t i = 0; i < rows.size(); ++i)
    for (int j = 0; j < p; ++j) ds.X(j, static_cast<Eigen::Index>(i)) = rows[i][static_cast<size_t>(j)];
  if (with_labels) {
    Assignment a;
    a.labels = std::move(labels);
    a.K = 0;
    for (int lab : a.labels) a.K = std::max(a.K, lab);
    ds.truth = std::move(a);
  }
  ds.validate();
  return ds;
}

void write_labels_csv(const Assignment& a, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "label\n";
  for (int lab : a.labels) out << lab << "\n";
}

Matrix read_matrix_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::string line;
  long line_no = 0;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split_line(line);
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) row.push_back(parse_double(c, line_no));
    if (!rows.empty() && rows.front().size() != row.size())
      throw CsvError("ragged matrix row", line_no);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw CsvError("empty matrix file", 1);
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < rows.front().size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return m;
}

}  // namespace sparsekm
