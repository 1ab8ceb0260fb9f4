#include "branchfinder/dataset_io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

#include "branchfinder/error.hpp"

namespace branchfinder {
namespace {

std::string fmt17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

double parse_double(const std::string& field, int line_no, const char* what) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(field.c_str(), &end);
    if (end == field.c_str() || *end != '\0' || errno == ERANGE ||
        !std::isfinite(v))
        fail(ErrorKind::parse_error, std::string("line ") +
                                         std::to_string(line_no) + ": bad " +
                                         what + " value '" + field + "'");
    return v;
}

}  // namespace

void write_csv(const std::string& path, const Dataset& data) {
    std::ofstream out(path, std::ios::binary);  // binary: keep LF endings
    if (!out) fail(ErrorKind::io_error, "cannot open for writing: " + path);
    out << "x1";
    for (int j = 2; j <= data.input_dim; ++j) out << ",x" << j;
    out << ",y,branch\n";
    for (const Sample& s : data.samples) {
        for (int j = 0; j < data.input_dim; ++j) {
            if (j > 0) out << ',';
            out << fmt17(s.x[j]);
        }
        out << ',' << fmt17(s.y) << ',';
        if (s.true_branch.has_value())
            out << *s.true_branch;
        else
            out << "NA";
        out << '\n';
    }
    if (!out) fail(ErrorKind::io_error, "write failed: " + path);
}

Dataset read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::io_error, "cannot open for reading: " + path);

    std::string line;
    if (!std::getline(in, line))
        fail(ErrorKind::parse_error, "line 1: missing header in " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();

    auto header = split_fields(line);
    const int cols = static_cast<int>(header.size());
    if (cols < 3 || header[cols - 2] != "y" || header[cols - 1] != "branch")
        fail(ErrorKind::parse_error,
             "line 1: expected header x1,...,xd,y,branch");
    const int d = cols - 2;
    for (int j = 0; j < d; ++j) {
        if (header[j] != "x" + std::to_string(j + 1))
            fail(ErrorKind::parse_error,
                 "line 1: expected column x" + std::to_string(j + 1));
    }

    Dataset data;
    data.input_dim = d;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split_fields(line);
        if (static_cast<int>(fields.size()) != cols)
            fail(ErrorKind::parse_error,
                 "line " + std::to_string(line_no) + ": expected " +
                     std::to_string(cols) + " fields, got " +
                     std::to_string(fields.size()));
        Sample s;
        s.x.resize(d);
        for (int j = 0; j < d; ++j) s.x[j] = parse_double(fields[j], line_no, "x");
        s.y = parse_double(fields[d], line_no, "y");
        const std::string& br = fields[d + 1];
        if (br == "NA") {
            s.true_branch.reset();
        } else {
            errno = 0;
            char* end = nullptr;
            const long b = std::strtol(br.c_str(), &end, 10);
            if (end == br.c_str() || *end != '\0' || errno == ERANGE || b < 0)
                fail(ErrorKind::parse_error,
                     "line " + std::to_string(line_no) + ": bad branch '" + br +
                         "' (non-negative integer or NA)");
            s.true_branch = static_cast<int>(b);
        }
        data.samples.push_back(std::move(s));
    }
    return data;
}

}  // namespace branchfinder
