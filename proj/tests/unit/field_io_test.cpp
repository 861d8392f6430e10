#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <limits>
#include <string>
#include <variant>

#include "talenti/errors.hpp"
#include "talenti/field.hpp"
#include "talenti/field_io.hpp"
#include "talenti/rng.hpp"

using namespace talenti;

namespace {

std::string tmp_path(const char* name) {
    return std::string("/tmp/talenti_io_test_") + name + ".csv";
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("radial round trip is bitwise exact") {
    RadialGrid grid(1.25, 3, 41);
    Xoshiro256ss rng(7);
    RadialField f = RadialField::zeros(grid);
    for (double& v : f.values) v = rng.uniform(-3.0, 5.0);
    std::string path = tmp_path("radial_rt");
    save_field(f, path);
    RadialField g = load_radial_field(path);
    CHECK(g.grid.same_as(grid));
    CHECK(g.kind == f.kind);
    REQUIRE(g.values.size() == f.values.size());
    for (std::size_t i = 0; i < f.values.size(); ++i) CHECK(g.values[i] == f.values[i]);
    std::remove(path.c_str());
}

TEST_CASE("space-time round trip is bitwise exact and keeps the kind") {
    RadialGrid grid(0.75, 2, 9);
    TimeGrid tgrid(0.42, 5);
    Xoshiro256ss rng(11);
    SpaceTimeField f = SpaceTimeField::zeros(grid, tgrid, FieldKind::control);
    for (double& v : f.values) v = rng.uniform(0.0, 1.0);
    std::string path = tmp_path("st_rt");
    save_field(f, path);
    SpaceTimeField g = load_spacetime_field(path);
    CHECK(g.grid.same_as(grid));
    CHECK(g.tgrid.same_as(tgrid));
    CHECK(g.kind == FieldKind::control);
    for (std::size_t i = 0; i < f.values.size(); ++i) CHECK(g.values[i] == f.values[i]);

    auto loaded = load_field(path);
    CHECK(std::holds_alternative<SpaceTimeField>(loaded));
    std::remove(path.c_str());
}

TEST_CASE("saving twice produces identical bytes") {
    RadialGrid grid(1.0, 2, 17);
    RadialField f = RadialField::sample(grid, [](double r) { return 1.0 / (1.0 + r); });
    std::string a = tmp_path("bytes_a"), b = tmp_path("bytes_b");
    save_field(f, a);
    save_field(f, b);
    CHECK(slurp(a) == slurp(b));
    std::remove(a.c_str());
    std::remove(b.c_str());
}

TEST_CASE("malformed files are rejected with parse errors") {
    std::string path = tmp_path("bad");
    auto write = [&](const std::string& content) {
        std::ofstream out(path, std::ios::binary);
        out << content;
    };

    write("no header\n1,2\n");
    CHECK_THROWS_AS(load_field(path), ParseError);

    write("# R=1 d=2 T=0 n_t=0 n_r=3 kind=state\n1,2\n");
    CHECK_THROWS_AS(load_radial_field(path), ParseError);

    write("# R=1 d=2 T=0 n_t=0 n_r=2 kind=state\n1,2\n3,4\n");
    CHECK_THROWS_AS(load_radial_field(path), ParseError);

    write("# R=1 d=2 T=0 n_t=0 n_r=2 kind=state\n1,nope\n");
    CHECK_THROWS_AS(load_radial_field(path), ParseError);

    write("# R=1 d=2 T=0 n_t=0 n_r=2 kind=mystery\n1,2\n");
    CHECK_THROWS_AS(load_radial_field(path), ParseError);

    write("# R=1 d=2 T=1 n_t=2 n_r=2 kind=control\n0,0\n1,1\n");
    CHECK_THROWS_AS(load_spacetime_field(path), ParseError);

    std::remove(path.c_str());
}

TEST_CASE("non-finite values are refused on save") {
    RadialGrid grid(1.0, 2, 4);
    RadialField f = RadialField::zeros(grid);
    f.values[2] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(save_field(f, tmp_path("nan")), NumericalError);
}

TEST_CASE("unwritable destinations raise an i/o error") {
    RadialGrid grid(1.0, 2, 4);
    RadialField f = RadialField::zeros(grid);
    CHECK_THROWS_AS(save_field(f, "/nonexistent_dir_xyz/out.csv"), IoError);
}

TEST_CASE("loader rejects control fields outside [0, 1]") {
    std::string path = tmp_path("bounds");
    {
        std::ofstream out(path, std::ios::binary);
        out << "# R=1 d=2 T=1 n_t=1 n_r=2 kind=control\n0,0.5\n1,1.5\n";
    }
    CHECK_THROWS_AS(load_spacetime_field(path), ParseError);
    std::remove(path.c_str());
}
