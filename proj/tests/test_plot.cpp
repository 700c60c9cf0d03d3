#include "lle/plot.hpp"

#include "lle/dataset.hpp"
#include "lle/error.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

using namespace lle;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::size_t count_occurrences(const std::string& text, const std::string& what) {
    std::size_t count = 0, pos = 0;
    while ((pos = text.find(what, pos)) != std::string::npos) {
        ++count;
        pos += what.size();
    }
    return count;
}

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name)
        : path((std::filesystem::temp_directory_path() / name).string()) {}
    ~TempFile() { std::filesystem::remove(path); }
};

}  // namespace

TEST_CASE("render_scatter emits one circle per point") {
    TempFile f("lle_plot_3pts.svg");
    Matrix pts(3, 2);
    pts << 0.0, 0.0, 1.0, 0.5, 2.0, -1.0;
    Vector color(3);
    color << 0.0, 0.5, 1.0;
    plot::render_scatter(pts, color, f.path);
    const std::string svg = read_file(f.path);
    CHECK(count_occurrences(svg, "<circle") == 3);
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);
}

TEST_CASE("render_scatter with no points keeps the axes") {
    TempFile f("lle_plot_empty.svg");
    plot::render_scatter(Matrix(0, 2), Vector(0), f.path);
    const std::string svg = read_file(f.path);
    CHECK(count_occurrences(svg, "<circle") == 0);
    CHECK(count_occurrences(svg, "<line") == 2);
    CHECK(svg.find("</svg>") != std::string::npos);
}

TEST_CASE("constant color range paints one color") {
    TempFile f("lle_plot_const.svg");
    dataset::Rng rng(5);
    const Matrix pts = oracle::random_matrix(6, 2, rng);
    plot::render_scatter(pts, Vector::Constant(6, 3.25), f.path);
    const std::string svg = read_file(f.path);
    // collect fill attributes of circles
    std::set<std::string> fills;
    std::size_t pos = 0;
    while ((pos = svg.find("fill=\"#", pos)) != std::string::npos) {
        fills.insert(svg.substr(pos + 6, 8));
        pos += 7;
    }
    CHECK(fills.size() == 1);
}

TEST_CASE("render_scatter validates its inputs") {
    Matrix narrow(3, 1);
    narrow << 1.0, 2.0, 3.0;
    CHECK_THROWS_AS(plot::render_scatter(narrow, Vector::Zero(3), "/tmp/x.svg"),
                    ContractViolation);
    Matrix ok(3, 2);
    ok.setZero();
    CHECK_THROWS_AS(plot::render_scatter(ok, Vector::Zero(2), "/tmp/x.svg"),
                    ContractViolation);
    CHECK_THROWS_AS(
        plot::render_scatter(ok, Vector::Zero(3), "/nonexistent_dir/x.svg"),
        Error);
}
