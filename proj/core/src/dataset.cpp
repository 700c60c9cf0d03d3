#include "lle/dataset.hpp"

#include "lle/error.hpp"
#include "lle/numlin.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <vector>

namespace lle::dataset {

double Rng::normal() {
    if (has_cached_) {
        has_cached_ = false;
        return cached_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    cached_ = r * std::sin(a);
    has_cached_ = true;
    return r * std::cos(a);
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

double parse_real(const std::string& field, std::size_t line_no) {
    const std::string t = trim(field);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc() || ptr != t.data() + t.size())
        throw ParseError("csv line " + std::to_string(line_no) +
                         ": field '" + field + "' is not a number");
    return value;
}

struct RawCsv {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> header;
};

RawCsv read_rows(const std::string& path, bool has_header) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    RawCsv raw;
    std::string line;
    std::size_t line_no = 0;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() && in.peek() == EOF) break;  // trailing newline
        auto fields = split_fields(line);
        if (has_header && raw.header.empty() && raw.rows.empty()) {
            raw.header = fields;
            width = fields.size();
            continue;
        }
        if (width == 0) width = fields.size();
        if (fields.size() != width)
            throw ParseError("csv line " + std::to_string(line_no) +
                             ": expected " + std::to_string(width) +
                             " fields, got " + std::to_string(fields.size()));
        raw.rows.push_back(std::move(fields));
    }
    if (raw.rows.empty()) throw ParseError("'" + path + "' holds no data rows");
    return raw;
}

}  // namespace

Matrix load_csv(const std::string& path, bool has_header) {
    RawCsv raw = read_rows(path, has_header);
    const Index n = static_cast<Index>(raw.rows.size());
    const Index d = static_cast<Index>(raw.rows.front().size());
    Matrix x(d, n);
    const std::size_t offset = has_header ? 2 : 1;
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < d; ++j)
            x(j, i) = parse_real(raw.rows[i][j], i + offset);
    numlin::require_finite(x, "load_csv('" + path + "')");
    return x;
}

LabeledDataset load_labeled_csv(const std::string& path, bool has_header) {
    RawCsv raw = read_rows(path, has_header);
    const Index n = static_cast<Index>(raw.rows.size());
    const Index cols = static_cast<Index>(raw.rows.front().size());
    require(cols >= 2, "labeled csv needs at least one feature column");
    const Index d = cols - 1;
    const std::size_t offset = has_header ? 2 : 1;

    Matrix x(d, n);
    std::vector<std::optional<int>> given(n);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < d; ++j)
            x(j, i) = parse_real(raw.rows[i][j], i + offset);
        const std::string t = trim(raw.rows[i][d]);
        if (t.empty()) continue;  // unlabeled point
        int value = 0;
        auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
        if (ec != std::errc() || ptr != t.data() + t.size())
            throw ParseError("csv line " + std::to_string(i + offset) +
                             ": label '" + t + "' is not an integer");
        given[i] = value;
    }

    std::map<int, int> remap;
    for (const auto& l : given)
        if (l) remap.emplace(*l, 0);
    int next = 0;
    for (auto& [raw_label, id] : remap) id = next++;

    LabeledDataset ds;
    ds.data = std::move(x);
    ds.labels.resize(n);
    for (Index i = 0; i < n; ++i)
        if (given[i]) ds.labels[i] = remap.at(*given[i]);
    ds.classes = next;
    return ds;
}

void save_csv(const Matrix& points, const std::string& path) {
    numlin::require_finite(points, "save_csv");
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw Error("cannot write '" + tmp + "'");
        char buf[64];
        for (Index i = 0; i < points.cols(); ++i) {
            for (Index j = 0; j < points.rows(); ++j) {
                std::snprintf(buf, sizeof(buf), "%.17g", points(j, i));
                out << buf;
                if (j + 1 < points.rows()) out << ',';
            }
            out << '\n';
        }
        if (!out) throw Error("write failed for '" + tmp + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw Error("cannot rename '" + tmp + "' to '" + path + "'");
}

namespace {

std::pair<Matrix, Matrix> generate_surface(Index n, double noise_sd,
                                           std::uint64_t seed, bool swiss) {
    require(n >= 4, "generator needs n >= 4");
    require(noise_sd >= 0.0, "noise_sd must be >= 0");
    Rng rng(seed);

    Matrix params(2, n);
    for (Index i = 0; i < n; ++i) {
        const double u = rng.uniform();
        const double v = rng.uniform();
        if (swiss) {
            params(0, i) = 1.5 * std::numbers::pi * (1.0 + 2.0 * u);
            params(1, i) = 21.0 * v;
        } else {
            params(0, i) = 1.5 * std::numbers::pi * (2.0 * u - 1.0);
            params(1, i) = 2.0 * v;
        }
    }

    Matrix x(3, n);
    for (Index i = 0; i < n; ++i) {
        const double t = params(0, i);
        const double h = params(1, i);
        if (swiss) {
            x(0, i) = t * std::cos(t);
            x(1, i) = h;
            x(2, i) = t * std::sin(t);
        } else {
            x(0, i) = std::sin(t);
            x(1, i) = h;
            x(2, i) = (t >= 0.0 ? 1.0 : -1.0) * (std::cos(t) - 1.0);
        }
    }
    if (noise_sd > 0.0)
        for (Index i = 0; i < n; ++i)
            for (Index j = 0; j < 3; ++j)
                x(j, i) += noise_sd * rng.normal();
    return {std::move(x), std::move(params)};
}

}  // namespace

std::pair<Matrix, Matrix> generate_swiss_roll(Index n, double noise_sd,
                                              std::uint64_t seed) {
    return generate_surface(n, noise_sd, seed, true);
}

std::pair<Matrix, Matrix> generate_s_curve(Index n, double noise_sd,
                                           std::uint64_t seed) {
    return generate_surface(n, noise_sd, seed, false);
}

Matrix center(const Matrix& x) {
    numlin::require_finite(x, "center");
    require(x.cols() >= 1, "center: empty data");
    return x.colwise() - x.rowwise().mean();
}

}  // namespace lle::dataset
