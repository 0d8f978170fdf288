// Copyright 2026 The qksvm Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "qksvm/csv.hpp"
#include "qksvm/matrix.hpp"
#include "qksvm/util.hpp"

using namespace qksvm;

TEST_CASE("format_double emits 17 significant digits and round-trips") {
    CHECK(csv::format_double(1.0) == "1");
    CHECK(csv::format_double(0.5) == "0.5");
    CHECK(csv::format_double(0.1) == "0.10000000000000001");
    CHECK(csv::format_double(-2.0) == "-2");

    Rng rng(314);
    for (int trial = 0; trial < 200; ++trial) {
        const double scale = std::pow(10.0, rng.uniform(-12.0, 12.0));
        const double v = rng.uniform(-1.0, 1.0) * scale;
        CAPTURE(v);
        CHECK(csv::parse_double(csv::format_double(v)) == v);
    }
    CHECK(csv::parse_double(csv::format_double(kPi)) == kPi);
    CHECK(csv::parse_double(csv::format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("quote_field wraps only the fields that need it") {
    CHECK(csv::quote_field("plain") == "plain");
    CHECK(csv::quote_field("") == "");
    CHECK(csv::quote_field("has,comma") == "\"has,comma\"");
    CHECK(csv::quote_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(csv::quote_field("two\nlines") == "\"two\nlines\"");
}

TEST_CASE("join_row separates with commas and adds no trailing newline") {
    CHECK(csv::join_row({"a", "b,c", "d"}) == "a,\"b,c\",d");
    CHECK(csv::join_row({"x"}) == "x");
    CHECK(csv::join_row({}) == "");
    const std::string line = csv::join_row({"k0", "k1"});
    CHECK(line.back() != '\n');
}

TEST_CASE("parse splits rows and fields and honors quoting rules") {
    const auto rows = csv::parse("a,b\nc,d\n");
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] == std::vector<std::string>{"a", "b"});
    CHECK(rows[1] == std::vector<std::string>{"c", "d"});

    // CRLF and a missing final newline both parse the same way.
    CHECK(csv::parse("a,b\r\nc,d\r\n") == rows);
    CHECK(csv::parse("a,b\nc,d") == rows);

    const auto quoted = csv::parse("\"x,y\",z\n\"he said \"\"hi\"\"\",w\n");
    REQUIRE(quoted.size() == 2);
    CHECK(quoted[0][0] == "x,y");
    CHECK(quoted[0][1] == "z");
    CHECK(quoted[1][0] == "he said \"hi\"");

    const auto multiline = csv::parse("\"line one\nline two\",b\n");
    REQUIRE(multiline.size() == 1);
    CHECK(multiline[0][0] == "line one\nline two");

    const auto trailing = csv::parse("a,\n");
    REQUIRE(trailing.size() == 1);
    CHECK(trailing[0] == std::vector<std::string>{"a", ""});

    CHECK(csv::parse("").empty());
    CHECK_THROWS_AS(csv::parse("\"never closed\n"), std::runtime_error);
}

TEST_CASE("join_row output parses back to the original fields") {
    const std::vector<std::string> fields = {"plain", "comma,inside", "quote\"mark",
                                             "multi\nline", ""};
    const auto rows = csv::parse(csv::join_row(fields) + "\n");
    REQUIRE(rows.size() == 1);
    CHECK(rows[0] == fields);
}

TEST_CASE("parse_double is strict about non-numeric cells") {
    CHECK(csv::parse_double("1.5") == 1.5);
    CHECK(csv::parse_double("-2e3") == -2000.0);
    CHECK(csv::parse_double("0.10000000000000001") == 0.1);
    CHECK_THROWS_AS(csv::parse_double("1.5x"), std::runtime_error);
    CHECK_THROWS_AS(csv::parse_double(""), std::runtime_error);
    CHECK_THROWS_AS(csv::parse_double("abc"), std::runtime_error);
    CHECK_THROWS_AS(csv::parse_double("1,5"), std::runtime_error);
}

TEST_CASE("splitmix64 matches the reference sequence start") {
    // First output of the reference splitmix64 generator seeded with 0.
    CHECK(splitmix64(0) == 0xE220A8397B1DCDAFULL);
}

TEST_CASE("derive_seed separates streams and is order-sensitive") {
    CHECK(derive_seed(42, 1, 2) == derive_seed(42, 1, 2));
    CHECK(derive_seed(42, 1, 2) != derive_seed(42, 2, 1));
    CHECK(derive_seed(42, 1, 2) != derive_seed(43, 1, 2));
    CHECK(derive_seed(42, 1) == derive_seed(42, 1, 0));
    CHECK(derive_seed(42, 1) != derive_seed(42, 0, 1));
}

TEST_CASE("Rng reproduces the pinned mt19937_64 sequence") {
    // The standard fixes the 10000th output of mt19937_64 seeded with 5489.
    Rng rng(5489);
    std::uint64_t v = 0;
    for (int i = 0; i < 10000; ++i) {
        v = rng.next_u64();
    }
    CHECK(v == 9981545732273789042ULL);

    Rng a(7);
    Rng b(7);
    for (int i = 0; i < 16; ++i) {
        REQUIRE(a.next_u64() == b.next_u64());
    }
}

TEST_CASE("uniform draws stay in range and bounded covers all residues") {
    Rng rng(11);
    double sum = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double u = rng.next_double();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
    }
    CHECK(sum / 1000.0 == Catch::Approx(0.5).margin(0.05));

    for (int i = 0; i < 100; ++i) {
        const double u = rng.uniform(-2.0, 3.0);
        REQUIRE(u >= -2.0);
        REQUIRE(u < 3.0);
    }

    std::vector<int> seen(4, 0);
    for (int i = 0; i < 200; ++i) {
        const std::size_t k = rng.bounded(4);
        REQUIRE(k < 4);
        seen[k] += 1;
    }
    for (const int count : seen) {
        CHECK(count > 0);
    }
    CHECK(rng.bounded(1) == 0);
    CHECK_THROWS_AS(rng.bounded(0), std::invalid_argument);
}

TEST_CASE("next_gaussian has unit scale and deterministic pairs") {
    Rng rng(99);
    double sum = 0.0;
    double sum_sq = 0.0;
    const int n = 4000;
    for (int i = 0; i < n; ++i) {
        const double g = rng.next_gaussian();
        sum += g;
        sum_sq += g * g;
    }
    CHECK(sum / n == Catch::Approx(0.0).margin(0.08));
    CHECK(sum_sq / n == Catch::Approx(1.0).margin(0.1));

    Rng a(1234);
    Rng b(1234);
    for (int i = 0; i < 9; ++i) {
        REQUIRE(a.next_gaussian() == b.next_gaussian());
    }
}

TEST_CASE("shuffle permutes in place deterministically") {
    std::vector<int> values = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    std::vector<int> copy = values;
    Rng rng(5);
    rng.shuffle(values);
    CHECK(values != copy);  // seed 5 does move something
    std::vector<int> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted == copy);

    std::vector<int> again = copy;
    Rng rng2(5);
    rng2.shuffle(again);
    CHECK(again == values);

    std::vector<int> single = {42};
    rng.shuffle(single);
    CHECK(single == std::vector<int>{42});
    std::vector<int> empty;
    rng.shuffle(empty);
    CHECK(empty.empty());
}

TEST_CASE("fnv1a matches the published 64-bit test vectors") {
    CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(fnv1a("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("require_finite rejects NaN and infinities") {
    CHECK_NOTHROW(require_finite(0.0, "x"));
    CHECK_NOTHROW(require_finite(-1e300, "x"));
    CHECK_THROWS_AS(require_finite(std::nan(""), "x"), std::invalid_argument);
    CHECK_THROWS_AS(require_finite(std::numeric_limits<double>::infinity(), "x"),
                    std::invalid_argument);
}

TEST_CASE("RealMatrix stores row-major entries with checked access") {
    RealMatrix m(2, 3, 0.5);
    CHECK(m.rows() == 2);
    CHECK(m.cols() == 3);
    CHECK(m.data().size() == 6);
    for (const double v : m.data()) {
        CHECK(v == 0.5);
    }
    m(1, 2) = 7.0;
    CHECK(m(1, 2) == 7.0);
    CHECK(m.at(1, 2) == 7.0);
    CHECK(m.data()[5] == 7.0);
    CHECK_THROWS_AS(m.at(2, 0), std::out_of_range);
    CHECK_THROWS_AS(m.at(0, 3), std::out_of_range);

    const RealMatrix empty;
    CHECK(empty.rows() == 0);
    CHECK(empty.cols() == 0);
}

TEST_CASE("row, submatrix, and selections copy in the requested order") {
    RealMatrix m(3, 3);
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            m(i, j) = static_cast<double>(10 * i + j);
        }
    }
    CHECK(m.row(1) == std::vector<double>{10.0, 11.0, 12.0});
    CHECK_THROWS_AS(m.row(3), std::out_of_range);

    const RealMatrix sub = m.submatrix({2, 0}, {1, 2});
    REQUIRE(sub.rows() == 2);
    REQUIRE(sub.cols() == 2);
    CHECK(sub(0, 0) == 21.0);
    CHECK(sub(0, 1) == 22.0);
    CHECK(sub(1, 0) == 1.0);
    CHECK(sub(1, 1) == 2.0);
    CHECK_THROWS_AS(m.submatrix({5}, {0}), std::out_of_range);

    const RealMatrix rows = m.select_rows({1});
    REQUIRE(rows.rows() == 1);
    CHECK(rows.row(0) == m.row(1));

    const RealMatrix cols = m.select_columns({2, 0});
    REQUIRE(cols.cols() == 2);
    CHECK(cols(0, 0) == 2.0);
    CHECK(cols(0, 1) == 0.0);
    CHECK(cols(2, 0) == 22.0);
}

TEST_CASE("RealMatrix equality compares shape and every entry") {
    RealMatrix a(2, 2, 1.0);
    RealMatrix b(2, 2, 1.0);
    CHECK(a == b);
    b(0, 1) = 2.0;
    CHECK(a != b);
    const RealMatrix wide(2, 3, 1.0);
    CHECK(a != wide);
}

TEST_CASE("csv files write and read back unchanged") {
    const std::string path = "build/test_roundtrip.csv";
    const std::string content = "h0,h1\n0.5,\"a,b\"\n";
    csv::write_file(path, content);
    const auto rows = csv::read_file(path);
    REQUIRE(rows.size() == 2);
    CHECK(rows[1][1] == "a,b");
    CHECK_THROWS_AS(csv::read_file("build/does_not_exist_12345.csv"),
                    std::runtime_error);
    std::remove(path.c_str());
}
