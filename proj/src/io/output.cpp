#include "subsim/io/output.hpp"

#include <json.hpp>

#include <cstdio>
#include <ctime>
#include <fstream>
#include <stdexcept>

namespace subsim::io {

CsvWriter::CsvWriter(const std::string& path,
                     const std::vector<std::string>& columns)
    : path_(path), tmp_(path + ".tmp"), n_cols_(columns.size()) {
  for (size_t i = 0; i < columns.size(); ++i) {
    if (i) buffer_ += ',';
    buffer_ += columns[i];
  }
  buffer_ += '\n';
}

CsvWriter::~CsvWriter() {
  try {
    close();
  } catch (...) {
  }
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != n_cols_)
    throw std::invalid_argument("CsvWriter: column count mismatch");
  char num[40];
  for (size_t i = 0; i < values.size(); ++i) {
    if (i) buffer_ += ',';
    std::snprintf(num, sizeof num, "%.17g", values[i]);
    buffer_ += num;
  }
  buffer_ += '\n';
}

void CsvWriter::raw_row(const std::string& line) {
  buffer_ += line;
  buffer_ += '\n';
}

void CsvWriter::close() {
  if (!open_) return;
  open_ = false;
  {
    std::ofstream out(tmp_, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp_);
    out << buffer_;
    if (!out) throw std::runtime_error("write failed for " + tmp_);
  }
  if (std::rename(tmp_.c_str(), path_.c_str()) != 0)
    throw std::runtime_error("rename failed for " + path_);
}

std::uint64_t fnv1a64_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot checksum " + path);
  std::uint64_t h = 0xcbf29ce484222325ull;
  char c;
  while (in.get(c)) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string iso8601_now() {
  std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

void RunManifest::write(const std::string& path) const {
  nlohmann::json j;
  try {
    j["config"] = nlohmann::json::parse(config_echo);
  } catch (...) {
    j["config_raw"] = config_echo;
  }
  j["version"] = version;
  j["started"] = started;
  j["finished"] = finished;
  j["status"] = status;
  if (!error.empty()) j["error"] = error;
  auto& outs = j["outputs"] = nlohmann::json::array();
  for (const auto& [file, sum] : outputs) {
    char hex[20];
    std::snprintf(hex, sizeof hex, "%016llx", (unsigned long long)sum);
    outs.push_back({{"file", file}, {"fnv1a64", hex}});
  }
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << j.dump(2) << '\n';
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("rename failed for " + path);
}

}  // namespace subsim::io
