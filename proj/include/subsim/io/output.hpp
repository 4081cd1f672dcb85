#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace subsim::io {

// CSV files with full round-trip precision (17 significant digits), written
// to a temp file and renamed into place.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& columns);
  ~CsvWriter();

  void row(const std::vector<double>& values);
  void raw_row(const std::string& line);  // pre-formatted (string columns)
  void close();  // atomic rename; called by the destructor if needed

  const std::string& path() const { return path_; }

 private:
  std::string path_, tmp_;
  std::string buffer_;
  size_t n_cols_;
  bool open_ = true;
};

std::uint64_t fnv1a64_file(const std::string& path);

struct RunManifest {
  std::string config_echo;
  std::string version;
  std::string started, finished;  // ISO 8601 UTC
  std::vector<std::pair<std::string, std::uint64_t>> outputs;  // file, checksum
  std::string status = "ok";
  std::string error;

  void write(const std::string& path) const;
};

std::string iso8601_now();

}  // namespace subsim::io
