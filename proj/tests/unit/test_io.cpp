#include <doctest.h>

#include <limits>
#include <stdexcept>
#include <string>

#include "qboost/io.hpp"
#include "qboost/random.hpp"
#include "support.hpp"

using namespace qboost;

TEST_SUITE("io") {
  TEST_CASE("format_double round-trips") {
    for (double v : {0.0, 1.0, -2.5, 0.1, 1.0 / 3.0, 6.02214076e23, -1e-300}) {
      CHECK(std::stod(format_double(v)) == v);
    }
    CHECK(format_double(0.5) == "0.5");
  }

  TEST_CASE("csv write/read round trip") {
    test_support::TempDir dir;
    CsvTable t{{"a", "b"}, {{"1", "x"}, {"2", "y"}}};
    write_csv(dir.file("t.csv"), t);
    auto back = read_csv(dir.file("t.csv"));
    CHECK(back.header == t.header);
    CHECK(back.rows == t.rows);
  }

  TEST_CASE("json syntax errors carry line and column") {
    try {
      parse_json_text("{\n  \"a\": 1,\n  \"b\": ]\n}", "cfg.json");
      FAIL("expected a parse error");
    } catch (const std::runtime_error& e) {
      const std::string msg = e.what();
      CHECK(msg.find("cfg.json") != std::string::npos);
      CHECK(msg.find("line 3") != std::string::npos);
    }
  }

  TEST_CASE("unknown keys are rejected") {
    Json j = {{"a", 1}, {"zzz", 2}};
    CHECK_THROWS_WITH_AS(reject_unknown_keys(j, {"a"}, "thing"), doctest::Contains("zzz"), std::runtime_error);
    CHECK_NOTHROW(reject_unknown_keys(Json{{"a", 1}}, {"a"}, "thing"));
  }

  TEST_CASE("derived seeds separate streams and indices") {
    CHECK(derive_seed(1, "a", 0) == derive_seed(1, "a", 0));
    CHECK(derive_seed(1, "a", 0) != derive_seed(1, "b", 0));
    CHECK(derive_seed(1, "a", 0) != derive_seed(1, "a", 1));
    CHECK(derive_seed(1, "a", 0) != derive_seed(2, "a", 0));
  }
}
