#pragma once

#include <string>
#include <vector>

#include "field.hpp"

namespace compwave {

void write_text(const std::string& path, const std::string& content);
std::string read_text(const std::string& path);

// Raw little-endian doubles; shape and times live in the JSON header next
// to the file.
void write_doubles(const std::string& path, const std::vector<double>& data);
void append_doubles(const std::string& path, const std::vector<double>& data, bool truncate);

std::string fnv1a64_hex(const std::string& bytes);
std::string file_checksum(const std::string& path);

struct CsvWriter {
    explicit CsvWriter(const std::string& path, const std::string& header);
    ~CsvWriter();
    void row(const std::vector<double>& values);
    void row(double t, const std::string& name, double value);

private:
    struct Impl;
    Impl* impl_;
};

// Reads a (t, name, value) series file back into per-name series.
struct NamedSeries {
    std::vector<double> t;
    std::vector<double> value;
};
std::vector<std::pair<std::string, NamedSeries>> read_named_series(const std::string& path);

}  // namespace compwave
