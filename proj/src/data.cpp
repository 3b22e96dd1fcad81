#include "sglab/data.hpp"

#include "sglab/io.hpp"

#include <fstream>
#include <sstream>

namespace sglab {

SampleFileSource::SampleFileSource(Mat rows) : rows_(std::move(rows)) {
  if (rows_.rows() == 0) throw DomainError("sample file contains no rows");
  if (rows_.cols() < 1 || rows_.cols() > 2) throw DimensionError("sample file must have 1 or 2 columns");
}

SampleFileSource SampleFileSource::load_csv(const std::string& path) { return SampleFileSource(read_samples_csv(path)); }

Mat SampleFileSource::sample(std::size_t n, std::mt19937_64& rng, std::vector<int>* labels) const {
  std::uniform_int_distribution<Eigen::Index> pick(0, rows_.rows() - 1);
  Mat out(static_cast<Eigen::Index>(n), rows_.cols());
  for (Eigen::Index i = 0; i < out.rows(); ++i) out.row(i) = rows_.row(pick(rng));
  if (labels) labels->assign(n, kNullCondition);
  return out;
}

Mat read_samples_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open sample file " + path);
  std::string line;
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 || line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(parse_double(cell));
      } catch (const std::invalid_argument&) {
        throw std::runtime_error(path + ":" + std::to_string(line_no) + ": bad number '" + cell + "'");
      }
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": ragged row");
    }
    rows.push_back(std::move(row));
  }
  Mat out(static_cast<Eigen::Index>(rows.size()), rows.empty() ? 0 : static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  }
  return out;
}

void write_samples_csv(const Mat& samples, std::ostream& out) {
  static const char* names[] = {"x", "y"};
  for (Eigen::Index c = 0; c < samples.cols(); ++c) out << (c ? "," : "") << (c < 2 ? names[c] : "z");
  out << '\n';
  for (Eigen::Index r = 0; r < samples.rows(); ++r) {
    for (Eigen::Index c = 0; c < samples.cols(); ++c) out << (c ? "," : "") << format_double(samples(r, c));
    out << '\n';
  }
}

}  // namespace sglab
