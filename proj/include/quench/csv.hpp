// CSV emission (comma-separated, header row, 17 significant digits, LF) and
// the run manifest listing every produced file with a content checksum.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace quench {

std::string format_double(double value);  // shortest 17-significant-digit form

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  void add_row(const std::vector<double>& row);
  void add_row_raw(const std::vector<std::string>& row);
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::string> rows_;
};

// FNV-1a 64-bit checksum, printed as 16 hex digits.
std::uint64_t fnv1a64(const std::string& data);
std::string checksum_hex(const std::string& data);

// Collects named artifacts, writes them under out_dir, then writes
// manifest.txt with one "checksum  name" line per file (sorted by name).
class ArtifactWriter {
 public:
  explicit ArtifactWriter(std::string out_dir);
  void write(const std::string& name, const std::string& content);
  void finalize();  // writes manifest.txt
  const std::vector<std::pair<std::string, std::string>>& entries() const {
    return entries_;  // (name, checksum)
  }

 private:
  std::string out_dir_;
  std::vector<std::pair<std::string, std::string>> entries_;
};

}  // namespace quench
