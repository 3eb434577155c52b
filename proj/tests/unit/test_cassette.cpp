#include <doctest.h>

#include <thread>

#include "oracles.hpp"
#include "overton/cassette.hpp"
#include "overton/errors.hpp"

using namespace overton;
using nlohmann::json;

TEST_CASE("append is idempotent per kind and id") {
    testutil::TempDir dir;
    auto path = dir / "c.ndjson";
    {
        Cassette c(path);
        CHECK(c.append(kKindEssay, "r1", {{"response", "one"}}));
        CHECK_FALSE(c.append(kKindEssay, "r1", {{"response", "two"}}));
        CHECK(c.append(kKindAssessment, "r1", {{"rating", "agree"}}));
        CHECK(c.size() == 2);
        CHECK(c.find(kKindEssay, "r1")->at("response") == "one");
        CHECK_FALSE(c.find(kKindEssay, "r2").has_value());
    }
    auto text = testutil::read_file(path);
    CHECK(std::count(text.begin(), text.end(), '\n') == 2);
    CHECK(text.starts_with(R"({"kind":"essay","payload":{"response":"one"},"record_id":"r1"})"));

    Cassette reloaded(path);
    CHECK(reloaded.size() == 2);
    CHECK(reloaded.contains(kKindAssessment, "r1"));
    CHECK_FALSE(reloaded.append(kKindEssay, "r1", {{"response", "three"}}));
    CHECK(testutil::read_file(path) == text);
}

TEST_CASE("a corrupted final line is dropped and truncated") {
    testutil::TempDir dir;
    auto path = dir / "c.ndjson";
    {
        Cassette c(path);
        c.append(kKindEssay, "a", {{"x", 1}});
        c.append(kKindEssay, "b", {{"x", 2}});
    }
    auto good = testutil::read_file(path);
    testutil::write_file(path, good + R"({"kind":"essay","payload":{"x":)");

    Cassette c(path);
    CHECK(c.dropped_corrupt_tail());
    CHECK(c.size() == 2);
    CHECK(testutil::read_file(path) == good);
    CHECK(c.append(kKindEssay, "c", {{"x", 3}}));

    Cassette again(path);
    CHECK_FALSE(again.dropped_corrupt_tail());
    CHECK(again.size() == 3);
    CHECK(again.find(kKindEssay, "c")->at("x") == 3);
}

TEST_CASE("a final line without newline is kept") {
    testutil::TempDir dir;
    auto path = dir / "c.ndjson";
    testutil::write_file(path, R"({"kind":"essay","payload":{},"record_id":"a"})");
    Cassette c(path);
    CHECK(c.size() == 1);
    CHECK_FALSE(c.dropped_corrupt_tail());
    c.append(kKindEssay, "b", json::object());
    CHECK(Cassette(path).size() == 2);
}

TEST_CASE("corruption before the end is an error") {
    testutil::TempDir dir;
    auto path = dir / "c.ndjson";
    testutil::write_file(path, "{\"kind\":\"essay\",\"payload\":{},\"record_id\":\"a\"}\nnot json\n"
                               "{\"kind\":\"essay\",\"payload\":{},\"record_id\":\"b\"}\n");
    CHECK_THROWS_AS(Cassette{path}, ConfigError);

    testutil::write_file(path, "{\"kind\":\"essay\",\"payload\":[],\"record_id\":\"a\"}\n{}\n");
    CHECK_THROWS_AS(Cassette{path}, ConfigError);
}

TEST_CASE("in-memory cassette and concurrent appends") {
    Cassette c;
    std::vector<std::jthread> threads;
    for (int t = 0; t < 8; ++t)
        threads.emplace_back([&c, t] {
            for (int i = 0; i < 100; ++i) c.append(kKindEssay, std::to_string(i % 50), {{"t", t}});
        });
    threads.clear();
    CHECK(c.size() == 50);
    CHECK_FALSE(c.path().has_value());
}
