#include "quench/csv.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace quench {

std::string format_double(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

CsvWriter::CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvWriter::add_row(const std::vector<double>& row) {
  std::string line;
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) line += ',';
    line += format_double(row[i]);
  }
  rows_.push_back(std::move(line));
}

void CsvWriter::add_row_raw(const std::vector<std::string>& row) {
  std::string line;
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) line += ',';
    line += row[i];
  }
  rows_.push_back(std::move(line));
}

std::string CsvWriter::str() const {
  std::string out;
  for (std::size_t i = 0; i < header_.size(); ++i) {
    if (i) out += ',';
    out += header_[i];
  }
  out += '\n';
  for (const auto& row : rows_) {
    out += row;
    out += '\n';
  }
  return out;
}

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t hash = 1469598103934665603ull;
  for (unsigned char c : data) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

std::string checksum_hex(const std::string& data) {
  char buffer[17];
  std::snprintf(buffer, sizeof(buffer), "%016llx",
                static_cast<unsigned long long>(fnv1a64(data)));
  return buffer;
}

ArtifactWriter::ArtifactWriter(std::string out_dir) : out_dir_(std::move(out_dir)) {
  std::filesystem::create_directories(out_dir_);
}

void ArtifactWriter::write(const std::string& name, const std::string& content) {
  const std::filesystem::path path = std::filesystem::path(out_dir_) / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write artifact " + path.string());
  out << content;
  entries_.emplace_back(name, checksum_hex(content));
}

void ArtifactWriter::finalize() {
  std::sort(entries_.begin(), entries_.end());
  std::string manifest;
  for (const auto& [name, sum] : entries_) {
    manifest += sum + "  " + name + "\n";
  }
  const std::filesystem::path path = std::filesystem::path(out_dir_) / "manifest.txt";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write manifest");
  out << manifest;
}

}  // namespace quench
