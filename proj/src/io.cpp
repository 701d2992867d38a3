#include "gridfreq/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "gridfreq/errors.hpp"

namespace gridfreq {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

double parse_double(const std::string& text, const std::string& path, size_t line_no) {
    const char* begin = text.c_str();
    char* end = nullptr;
    const double value = std::strtod(begin, &end);
    if (end == begin || *end != '\0') {
        throw ConfigError(path + ":" + std::to_string(line_no) + ": expected a number, got '" +
                          text + "'");
    }
    return value;
}

}  // namespace

void write_trace_csv(const std::string& path, const Trace& trace) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write trace file: " + path);

    out << "time";
    for (const auto& name : trace.names) out << ',' << name;
    out << '\n';

    char buf[32];
    const size_t rows = trace.rows();
    for (size_t i = 0; i < rows; ++i) {
        std::snprintf(buf, sizeof(buf), "%.6f", trace.t[i]);
        out << buf;
        for (const auto& column : trace.data) {
            std::snprintf(buf, sizeof(buf), "%.12g", column[i]);
            out << ',' << buf;
        }
        out << '\n';
    }
    if (!out) throw ConfigError("write failed for trace file: " + path);
}

Trace read_trace_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open trace file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw ConfigError("empty trace file: " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();

    std::vector<std::string> header = split_csv_line(line);
    if (header.size() < 2 || header.front() != "time") {
        throw ConfigError(path + ": trace header must start with 'time' and name at least one channel");
    }

    Trace trace;
    trace.names.assign(header.begin() + 1, header.end());
    trace.data.assign(trace.names.size(), {});

    size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::vector<std::string> cells = split_csv_line(line);
        if (cells.size() != header.size()) {
            throw ConfigError(path + ":" + std::to_string(line_no) + ": expected " +
                              std::to_string(header.size()) + " columns, got " +
                              std::to_string(cells.size()));
        }
        trace.t.push_back(parse_double(cells[0], path, line_no));
        for (size_t c = 1; c < cells.size(); ++c) {
            trace.data[c - 1].push_back(parse_double(cells[c], path, line_no));
        }
    }
    return trace;
}

void write_csv_row(const std::string& path, const std::vector<std::string>& header,
                   const std::vector<std::string>& cells) {
    if (header.size() != cells.size()) {
        throw ConfigError("csv row has " + std::to_string(cells.size()) + " cells for " +
                          std::to_string(header.size()) + " headers");
    }
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write csv file: " + path);
    for (size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << '\n';
    for (size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << '\n';
    if (!out) throw ConfigError("write failed for csv file: " + path);
}

}  // namespace gridfreq
