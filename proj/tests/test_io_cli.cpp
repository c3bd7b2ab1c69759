#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "doctest.h"
#include "psaws/io.hpp"

namespace fs = std::filesystem;
using namespace psaws;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("psaws-test-" + std::to_string(std::rand()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const {
        return (path / name).string();
    }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void spit(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

std::string cli_path() {
    const char* p = std::getenv("PSAWS_CLI");
    REQUIRE_MESSAGE(p != nullptr, "PSAWS_CLI must point at the CLI binary");
    return p;
}

int run_cli(const std::string& args, const std::string& log) {
    const std::string cmd = cli_path() + " " + args + " > " + log + " 2>&1";
    const int status = std::system(cmd.c_str());
    return status < 0 ? status : WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("csv tables") {
    TempDir tmp;
    io::Table t;
    t.columns = {"index", "value"};
    t.add_row({0, 1.0 / 3.0});
    t.add_row({1, -2.5e-17});
    t.add_row({2, 123456789.123456});
    const auto path = tmp.file("t.csv");
    io::write_csv(path, t);
    auto back = io::read_csv(path);
    CHECK(back.columns == t.columns);
    REQUIRE(back.rows.size() == t.rows.size());
    for (std::size_t r = 0; r < t.rows.size(); ++r)
        for (std::size_t c = 0; c < t.columns.size(); ++c)
            CHECK(back.rows[r][c] == t.rows[r][c]);  // value-identical

    CHECK(back.column_index("value") == 1);
    CHECK(back.column("value")[0] == 1.0 / 3.0);
    SUBCASE("a missing column is named in the error") {
        try {
            back.column_index("wavelength");
            FAIL("expected an error");
        } catch (const std::exception& e) {
            CHECK(std::string(e.what()).find("wavelength") != std::string::npos);
        }
    }
    SUBCASE("malformed numbers carry the line number") {
        const auto bad = tmp.file("bad.csv");
        spit(bad, "a,b\n1,2\n3,oops\n");
        try {
            io::read_csv(bad);
            FAIL("expected an error");
        } catch (const std::exception& e) {
            CHECK(std::string(e.what()).find("3") != std::string::npos);
        }
    }
    SUBCASE("ragged rows are rejected") {
        const auto bad = tmp.file("ragged.csv");
        spit(bad, "a,b\n1,2\n3\n");
        CHECK_THROWS(io::read_csv(bad));
    }
    CHECK_THROWS(io::read_csv(tmp.file("absent.csv")));
}

TEST_CASE("matrix csv") {
    TempDir tmp;
    io::Matrix m;
    m.rows = 2;
    m.cols = 3;
    m.values = {1, 2, 3, 0.1, -0.2, 4e9};
    const auto path = tmp.file("m.csv");
    io::write_matrix_csv(path, m);
    auto back = io::read_matrix_csv(path);
    CHECK(back.rows == 2);
    CHECK(back.cols == 3);
    CHECK(back.values == m.values);
    CHECK(back.at(1, 2) == 4e9);

    const auto bad = tmp.file("bad.csv");
    spit(bad, "1,2,3\n4,5\n");
    try {
        io::read_matrix_csv(bad);
        FAIL("expected an error");
    } catch (const std::exception& e) {
        CHECK(std::string(e.what()).find("2") != std::string::npos);
    }
}

TEST_CASE("pgm images") {
    TempDir tmp;
    io::Matrix m;
    m.rows = 3;
    m.cols = 4;
    m.values = {0.0, 1.0, 0.5, 0.25, 0.75, 0.1, 0.9, 0.3,
                0.6, 0.2, 0.8, 0.4};
    SUBCASE("16-bit round trip") {
        const auto path = tmp.file("a.pgm");
        io::write_pgm(path, m, 0.0, 1.0);
        auto back = io::read_pgm(path, 0.0, 1.0);
        CHECK(back.rows == 3);
        CHECK(back.cols == 4);
        for (std::size_t i = 0; i < m.values.size(); ++i)
            CHECK(back.values[i] ==
                  doctest::Approx(m.values[i]).epsilon(1.0 / 65535));
        // endpoints map exactly
        CHECK(back.values[0] == 0.0);
        CHECK(back.values[1] == 1.0);
        // a second write/read is a fixed point
        io::write_pgm(path, back, 0.0, 1.0);
        auto twice = io::read_pgm(path, 0.0, 1.0);
        CHECK(twice.values == back.values);
    }
    SUBCASE("8-bit with a shifted range") {
        const auto path = tmp.file("b.pgm");
        io::write_pgm(path, m, -2.0, 2.0, 255);
        auto back = io::read_pgm(path, -2.0, 2.0);
        const double half_step = 0.5 * 4.0 / 255;
        for (std::size_t i = 0; i < m.values.size(); ++i)
            CHECK(std::abs(back.values[i] - m.values[i]) <= half_step + 1e-12);
    }
    SUBCASE("header comments are skipped") {
        const auto path = tmp.file("c.pgm");
        spit(path, "P5\n# a comment\n2 1\n255\n" + std::string("\x00\xff", 2));
        auto img = io::read_pgm(path, 0.0, 1.0);
        CHECK(img.values[0] == 0.0);
        CHECK(img.values[1] == 1.0);
    }
    SUBCASE("truncated payloads are rejected") {
        const auto path = tmp.file("d.pgm");
        spit(path, "P5\n4 4\n255\nxy");
        CHECK_THROWS(io::read_pgm(path, 0.0, 1.0));
    }
    SUBCASE("only P5 is understood") {
        const auto path = tmp.file("e.pgm");
        spit(path, "P2\n1 1\n255\n0\n");
        CHECK_THROWS(io::read_pgm(path, 0.0, 1.0));
    }
}

TEST_CASE("atomic writes") {
    TempDir tmp;
    const auto path = tmp.file("out.txt");
    io::atomic_write(path, "hello\n");
    CHECK(slurp(path) == "hello\n");
    io::atomic_write(path, "replaced\n");
    CHECK(slurp(path) == "replaced\n");
    // no temporary remnants
    for (const auto& entry : fs::directory_iterator(tmp.path))
        CHECK(entry.path().extension() != ".tmp");
}

TEST_CASE("double formatting round-trips") {
    for (double v : {1.0 / 3.0, 0.1, -2.5e-17, 4e300, 123456789.123456, 0.0})
        CHECK(std::stod(io::format_double(v)) == v);
}

TEST_CASE("cli behavior") {
    TempDir tmp;
    const auto log = tmp.file("log.txt");
    SUBCASE("usage errors exit 1") {
        CHECK(run_cli("", log) == 1);
        CHECK(run_cli("smooth --no-such-flag", log) == 1);
        CHECK(run_cli("verify --check bogus", log) == 1);
        CHECK(run_cli("--help", log) == 0);
    }
    SUBCASE("data errors exit 2") {
        CHECK(run_cli("smooth --input " + tmp.file("absent.csv") +
                          " --output " + tmp.file("o.csv"),
                      log) == 2);
    }
    SUBCASE("a failed verification exits 3") {
        // tiny lambda: weights collapse, the accuracy event never holds
        CHECK(run_cli("verify --check localprop --scenario-n 100 "
                      "--theta-right 18 --jump-at 50 --kprime 5 --lambda 0.01 "
                      "--epsilon 1e-4 --reps 50 --kappa-interval -2 20",
                      log) == 3);
    }
    SUBCASE("repeated runs are byte-identical") {
        const auto a = tmp.file("a.json");
        const auto b = tmp.file("b.json");
        CHECK(run_cli("families", a) == 0);
        CHECK(run_cli("families", b) == 0);
        CHECK(slurp(a) == slurp(b));

        const auto da = tmp.file("da.csv");
        const auto db = tmp.file("db.csv");
        const auto ma = tmp.file("ma.csv");
        CHECK(run_cli("demo --name theta2 --output " + da + " --mse " + ma,
                      log) == 0);
        CHECK(run_cli("demo --name theta2 --output " + db + " --mse " +
                          tmp.file("mb.csv"),
                      log) == 0);
        CHECK(slurp(da) == slurp(db));
        CHECK(slurp(ma) == slurp(tmp.file("mb.csv")));

        // smoothing an explicit input is reproducible as well
        io::Table t;
        t.columns = {"y"};
        for (int i = 0; i < 40; ++i) t.add_row({i < 20 ? 0.5 : 2.5});
        io::write_csv(tmp.file("in.csv"), t);
        const auto sa = tmp.file("sa.csv");
        const auto sb = tmp.file("sb.csv");
        const std::string args = "smooth --family poisson --lambda 10 "
                                 "--kstar 4 --input " +
                                 tmp.file("in.csv");
        CHECK(run_cli(args + " --output " + sa, log) == 0);
        CHECK(run_cli(args + " --output " + sb, log) == 0);
        CHECK(slurp(sa) == slurp(sb));
        auto est = io::read_csv(sa);
        CHECK(est.column_index("theta") < est.columns.size());
        CHECK(est.rows.size() == 40);
    }
}
