#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "optpart/io.hpp"

using namespace optpart;

namespace {

std::string tmp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("seventeen digits round-trip every double exactly") {
    for (double v : {1.0 / 3.0, std::numbers::pi, -6.02214076e23, 1e-300, 5e-324, 0.0, -0.125,
                     123456789.123456789}) {
        const std::string s = format_g17(v);
        CHECK(std::strtod(s.c_str(), nullptr) == v);
        CHECK(s.find(',') == std::string::npos);  // the list separator stays free
    }
    CHECK(format_g17(0.5) == "0.5");
    CHECK(format_g17(-2.0) == "-2");
}

TEST_CASE("plain table writer enforces the schema") {
    const std::string path = tmp_path("io_plain.csv");
    write_csv(path, {"a", "b"}, {{"1", "2"}, {"3", "4"}});
    auto lines = read_lines(path);
    REQUIRE(lines.size() == 3);
    CHECK(lines[0] == "a,b");
    CHECK(lines[1] == "1,2");
    CHECK(lines[2] == "3,4");

    CHECK_THROWS_AS(write_csv(path, {"a", "b"}, {{"1"}}), std::invalid_argument);
    CHECK_THROWS_AS(write_csv("/nonexistent_dir_for_tests/x.csv", {"a"}, {}),
                    std::invalid_argument);
    std::filesystem::remove(path);
}

TEST_CASE("curve table carries the full sample and is deterministic") {
    FucikCurve curve;
    FucikPoint p;
    p.r = 0.5;
    p.c = 1.0 / 3.0;
    p.lambda = p.c / p.r;
    p.mu = p.c;
    p.balance_gap = 1e-3;
    p.pde_residual = 2.5e-5;
    p.outer_iterations = 17;
    p.converged = true;
    curve.samples.push_back(p);
    p.r = 2.0;
    p.converged = false;
    curve.samples.push_back(p);

    const std::string path = tmp_path("io_curve.csv");
    write_curve_csv(path, curve);
    auto lines = read_lines(path);
    REQUIRE(lines.size() == 3);
    CHECK(lines[0] == "r,lambda,mu,c,balance_gap,pde_residual,outer_iterations,converged");
    auto row = split(lines[1]);
    REQUIRE(row.size() == 8);
    CHECK(std::strtod(row[0].c_str(), nullptr) == 0.5);
    CHECK(std::strtod(row[3].c_str(), nullptr) == 1.0 / 3.0);  // exact round-trip
    CHECK(row[6] == "17");
    CHECK(row[7] == "1");
    CHECK(split(lines[2])[7] == "0");

    // identical input produces byte-identical output
    const std::string again = tmp_path("io_curve2.csv");
    write_curve_csv(again, curve);
    CHECK(slurp(path) == slurp(again));
    std::filesystem::remove(path);
    std::filesystem::remove(again);
}

TEST_CASE("partition table labels every lattice point") {
    Grid g = build_grid(GridKind::interval, {1.0}, {11});
    PartitionResult part;
    part.masks = {mask_from_predicate(g, [](double x, double) { return x < 0.5; }),
                  mask_from_predicate(g, [](double x, double) { return x > 0.5; })};
    part.fields = {field_from_function(g, part.masks[0], [](double x, double) { return x; }),
                   field_from_function(g, part.masks[1], [](double x, double) { return 1 - x; })};

    const std::string path = tmp_path("io_part.csv");
    write_partition_csv(path, g, part);
    auto lines = read_lines(path);
    REQUIRE(lines.size() == static_cast<std::size_t>(g.num_points()) + 1);
    CHECK(lines[0] == "i,j,x,y,component,value");

    auto frame = split(lines[1]);  // boundary point: owned by nobody
    CHECK(frame[4] == "-1");
    CHECK(std::strtod(frame[5].c_str(), nullptr) == 0.0);
    auto owned = split(lines[3]);  // x = 0.2, inside the first mask
    CHECK(owned[4] == "0");
    CHECK(std::strtod(owned[5].c_str(), nullptr) == doctest::Approx(0.2));
    std::filesystem::remove(path);
}

TEST_CASE("functional table reports slopes and one shared classification") {
    PhiSeries s;
    s.radii = {0.1, 0.2, 0.3};
    s.values = {1.0, 2.0, 4.0};
    MonotoneReport rep;
    rep.monotone = true;
    rep.constant = false;

    const std::string path = tmp_path("io_phi.csv");
    write_phi_csv(path, s, rep);
    auto lines = read_lines(path);
    REQUIRE(lines.size() == 4);
    CHECK(lines[0] == "radius,phi,slope,classification");
    auto first = split(lines[1]);
    CHECK(std::strtod(first[2].c_str(), nullptr) == doctest::Approx(10.0));  // (2-1)/0.1
    CHECK(first[3] == "nondecreasing");
    CHECK(std::strtod(split(lines[3])[2].c_str(), nullptr) == 0.0);  // last row has no slope

    rep.constant = true;
    write_phi_csv(path, s, rep);
    CHECK(split(read_lines(path)[1])[3] == "constant");
    rep.constant = false;
    rep.monotone = false;
    write_phi_csv(path, s, rep);
    CHECK(split(read_lines(path)[1])[3] == "decreasing");
    std::filesystem::remove(path);
}

TEST_CASE("exponent table is keyed by the number of phases") {
    BetaReport rep;
    rep.values = {2.0, 3.0, 4.0};
    const std::string path = tmp_path("io_beta.csv");
    write_beta_csv(path, rep);
    auto lines = read_lines(path);
    REQUIRE(lines.size() == 4);
    CHECK(lines[0] == "k,beta");
    CHECK(split(lines[1])[0] == "2");
    CHECK(std::strtod(split(lines[3])[1].c_str(), nullptr) == 4.0);
    std::filesystem::remove(path);
}

}  // TEST_SUITE
