#include "io.hpp"

#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>

namespace compwave {

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_doubles(const std::string& path, const std::vector<double>& data) {
    append_doubles(path, data, true);
}

void append_doubles(const std::string& path, const std::vector<double>& data, bool truncate) {
    std::ofstream out(path, truncate ? std::ios::binary | std::ios::trunc
                                     : std::ios::binary | std::ios::app);
    if (!out) throw std::runtime_error("cannot write " + path);
    out.write(reinterpret_cast<const char*>(data.data()),
              static_cast<std::streamsize>(data.size() * sizeof(double)));
}

std::string fnv1a64_hex(const std::string& bytes) {
    unsigned long long h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

std::string file_checksum(const std::string& path) { return fnv1a64_hex(read_text(path)); }

struct CsvWriter::Impl {
    std::ofstream out;
};

CsvWriter::CsvWriter(const std::string& path, const std::string& header) : impl_(new Impl) {
    impl_->out.open(path, std::ios::binary);
    if (!impl_->out) throw std::runtime_error("cannot write " + path);
    impl_->out << header << "\n";
    impl_->out << std::setprecision(17);
}

CsvWriter::~CsvWriter() { delete impl_; }

void CsvWriter::row(const std::vector<double>& values) {
    for (size_t i = 0; i < values.size(); ++i)
        impl_->out << values[i] << (i + 1 < values.size() ? "," : "\n");
}

void CsvWriter::row(double t, const std::string& name, double value) {
    impl_->out << t << "," << name << "," << value << "\n";
}

std::vector<std::pair<std::string, NamedSeries>> read_named_series(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::string line;
    std::getline(in, line);  // header
    std::map<std::string, NamedSeries> acc;
    std::vector<std::string> order;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string tstr, name, vstr;
        if (!std::getline(ss, tstr, ',')) continue;
        if (!std::getline(ss, name, ',')) continue;
        if (!std::getline(ss, vstr, ',')) continue;
        if (acc.find(name) == acc.end()) order.push_back(name);
        acc[name].t.push_back(std::stod(tstr));
        acc[name].value.push_back(std::stod(vstr));
    }
    std::vector<std::pair<std::string, NamedSeries>> out;
    for (const auto& name : order) out.emplace_back(name, acc[name]);
    return out;
}

}  // namespace compwave
