#include "nhfp/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "nhfp/errors.hpp"

namespace nhfp {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct CsvWriter::Impl {
  std::ofstream out;
};

CsvWriter::CsvWriter(const std::string& path, const nlohmann::json& header,
                     const std::vector<std::string>& columns)
    : impl_(new Impl) {
  impl_->out.open(path, std::ios::binary);  // LF line endings everywhere
  if (!impl_->out)
    throw error("cannot open output file: " + path);
  impl_->out << "# " << header.dump() << "\n";
  for (std::size_t i = 0; i < columns.size(); ++i)
    impl_->out << (i ? "," : "") << columns[i];
  impl_->out << "\n";
}

CsvWriter::~CsvWriter() { delete impl_; }

void CsvWriter::row(const std::vector<double>& values) {
  for (std::size_t i = 0; i < values.size(); ++i)
    impl_->out << (i ? "," : "") << format_double(values[i]);
  impl_->out << "\n";
}

void CsvWriter::raw_row(const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i)
    impl_->out << (i ? "," : "") << fields[i];
  impl_->out << "\n";
}

void CsvWriter::comment_json(const std::string& key, const nlohmann::json& value) {
  nlohmann::json line;
  line[key] = value;
  impl_->out << "# " << line.dump() << "\n";
}

nlohmann::json read_csv_header(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw error("cannot open file: " + path);
  std::string line;
  std::getline(in, line);
  if (line.size() < 2 || line[0] != '#')
    throw error("missing JSON header line in " + path);
  return nlohmann::json::parse(line.substr(1));
}

}  // namespace nhfp
