#include "slr/ingest.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <string>
#include <unordered_set>

#include "slr/errors.hpp"

namespace slr {

namespace {

std::string_view trim(std::string_view s) {
    const auto ws = " \t\r";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
        const std::size_t b = i;
        while (i < s.size() && !(s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
        if (i > b) out.push_back(s.substr(b, i - b));
    }
    return out;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    return out;
}

void append_double(std::string& out, double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    out.append(buf, ptr);
}

}  // namespace

DenseMatrix InteractionMatrix::densified() const {
    DenseMatrix d(num_rows, num_cols);
    for (const auto& e : entries) d(e.row, e.col) = e.value;
    return d;
}

InteractionMatrix parse_coordinate(std::istream& in, Feedback feedback) {
    InteractionMatrix m;
    m.feedback = feedback;
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    std::unordered_set<std::uint64_t> seen;

    while (std::getline(in, line)) {
        ++line_no;
        const auto fields = split_ws(line);
        if (fields.empty()) continue;
        if (!have_header) {
            if (fields.size() != 2 || !parse_number(fields[0], m.num_rows) || !parse_number(fields[1], m.num_cols)) {
                throw ParseError("expected header \"num_rows num_cols\"", line_no);
            }
            have_header = true;
            continue;
        }
        MatrixEntry e{};
        if (fields.size() != 3 || !parse_number(fields[0], e.row) || !parse_number(fields[1], e.col) ||
            !parse_number(fields[2], e.value) || !std::isfinite(e.value)) {
            throw ParseError("expected \"row col value\"", line_no);
        }
        if (e.row >= m.num_rows || e.col >= m.num_cols) {
            throw IndexRangeError("entry (" + std::to_string(e.row) + ", " + std::to_string(e.col) +
                                      ") outside " + std::to_string(m.num_rows) + "x" + std::to_string(m.num_cols),
                                  line_no);
        }
        if (feedback == Feedback::Implicit && !(e.value > 0.0)) {
            throw ParseError("implicit feedback values must be strictly positive", line_no);
        }
        if (!seen.insert(static_cast<std::uint64_t>(e.row) * m.num_cols + e.col).second) {
            throw DuplicateEntryError(
                "duplicate entry (" + std::to_string(e.row) + ", " + std::to_string(e.col) + ")", line_no);
        }
        m.entries.push_back(e);
    }
    if (in.bad()) throw IoError("read error");
    if (!have_header) throw ParseError("missing header line", 0);
    return m;
}

InteractionMatrix load_coordinate(const std::filesystem::path& path, Feedback feedback) {
    auto in = open_in(path);
    return parse_coordinate(in, feedback);
}

void write_coordinate(std::ostream& out, const InteractionMatrix& m) {
    std::string buf = std::to_string(m.num_rows) + " " + std::to_string(m.num_cols) + "\n";
    for (const auto& e : m.entries) {
        buf += std::to_string(e.row);
        buf += ' ';
        buf += std::to_string(e.col);
        buf += ' ';
        append_double(buf, e.value);
        buf += '\n';
    }
    out << buf;
}

void save_coordinate(const InteractionMatrix& m, const std::filesystem::path& path) {
    auto out = open_out(path);
    write_coordinate(out, m);
    if (!out) throw IoError("write failed: " + path.string());
}

DenseMatrix parse_dense(std::istream& in) {
    DenseMatrix m;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto text = trim(line);
        if (text.empty()) continue;
        std::size_t fields = 0;
        std::size_t pos = 0;
        while (true) {
            const auto comma = text.find(',', pos);
            const auto field = trim(text.substr(pos, comma == std::string_view::npos ? text.npos : comma - pos));
            double v = 0.0;
            if (!parse_number(field, v) || !std::isfinite(v)) {
                throw ParseError("row " + std::to_string(m.rows + 1) + ": non-numeric field \"" +
                                     std::string(field) + "\"",
                                 line_no);
            }
            m.data.push_back(v);
            ++fields;
            if (comma == std::string_view::npos) break;
            pos = comma + 1;
        }
        if (m.rows == 0) {
            m.cols = fields;
        } else if (fields != m.cols) {
            throw ParseError("row " + std::to_string(m.rows + 1) + " has " + std::to_string(fields) +
                                 " fields, expected " + std::to_string(m.cols),
                             line_no);
        }
        ++m.rows;
    }
    if (in.bad()) throw IoError("read error");
    return m;
}

DenseMatrix load_dense(const std::filesystem::path& path) {
    auto in = open_in(path);
    return parse_dense(in);
}

void write_dense(std::ostream& out, const DenseMatrix& m) {
    std::string buf;
    for (std::size_t i = 0; i < m.rows; ++i) {
        for (std::size_t j = 0; j < m.cols; ++j) {
            if (j) buf += ',';
            append_double(buf, m(i, j));
        }
        buf += '\n';
    }
    out << buf;
}

void save_dense(const DenseMatrix& m, const std::filesystem::path& path) {
    auto out = open_out(path);
    write_dense(out, m);
    if (!out) throw IoError("write failed: " + path.string());
}

std::string_view to_string(ValueTransform t) noexcept {
    switch (t) {
        case ValueTransform::None: return "none";
        case ValueTransform::Log: return "log";
        case ValueTransform::Log1p: return "log1p";
    }
    return "unknown";
}

InteractionMatrix transform_values(InteractionMatrix m, ValueTransform t) {
    if (t == ValueTransform::None) return m;
    for (auto& e : m.entries) {
        if (e.value > 0.0) e.value = t == ValueTransform::Log ? std::log(e.value) : std::log1p(e.value);
    }
    return m;
}

}  // namespace slr
