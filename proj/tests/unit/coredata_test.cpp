#include <algorithm>
#include <set>

#include "leiad/coredata.hpp"
#include "leiad/error.hpp"
#include "leiad/random.hpp"
#include "support.hpp"

using namespace leiad;

TEST_CASE("parse_dataset reads one labeled series") {
    const auto d = parse_dataset("series_id,timestamp,value,label\na,1,0.5,0\na,2,0.7,0\na,3,9.0,1\n");
    REQUIRE(d.series.size() == 1);
    CHECK(d.series[0].size() == 3);
    CHECK(d.series[0].has_truth());
    CHECK(d.series[0].truth == std::vector<std::int8_t>{0, 0, 1});
}

TEST_CASE("parse_dataset sorts by timestamp and keeps unlabeled files unlabeled") {
    const auto d = parse_dataset("series_id,timestamp,value\nb,5,1\nb,2,2\na,1,3\n");
    REQUIRE(d.series.size() == 2);
    const auto& b = d.find("b");
    CHECK(b.timestamps == std::vector<std::int64_t>{2, 5});
    CHECK(b.values == std::vector<double>{2, 1});
    CHECK_FALSE(d.has_truth());
}

TEST_CASE("parse_dataset names the row of a duplicate timestamp") {
    try {
        parse_dataset("series_id,timestamp,value\na,1,0\na,1,2\n");
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::parse);
        CHECK(std::string(e.what()).find("row 3") != std::string::npos);
    }
}

TEST_CASE("parse_dataset rejects bad cells") {
    CHECK_THROWS_AS(parse_dataset("series_id,timestamp,value,label\na,1,nan,0\n"), Error);
    CHECK_THROWS_AS(parse_dataset("series_id,timestamp,value,label\na,1,1,2\n"), Error);
    CHECK_THROWS_AS(parse_dataset("series_id,timestamp,value\na,x,1\n"), Error);
    CHECK_THROWS_AS(parse_dataset("timestamp,value\n1,1\n"), Error);
    CHECK_THROWS_AS(load_dataset("/nonexistent/leiad.csv"), Error);
}

TEST_CASE("format_dataset round-trips") {
    Rng rng(3);
    Dataset d;
    for (int s = 0; s < 4; ++s) {
        Series series;
        series.id = "s" + std::to_string(s);
        std::int64_t t = -5;
        for (int i = 0; i < 50; ++i) {
            t += 1 + static_cast<std::int64_t>(rng.index(3));
            series.timestamps.push_back(t);
            series.values.push_back(rng.normal() * 1e3);
            series.truth.push_back(rng.uniform() < 0.1 ? 1 : 0);
        }
        d.series.push_back(series);
    }
    const auto back = parse_dataset(format_dataset(d));
    REQUIRE(back.series.size() == d.series.size());
    for (const auto& s : d.series) {
        const auto& t = back.find(s.id);
        CHECK(t.timestamps == s.timestamps);
        CHECK(t.values == s.values);
        CHECK(t.truth == s.truth);
    }
}

namespace {
Dataset n_series(int n) {
    Dataset d;
    for (int i = 0; i < n; ++i) d.series.push_back(testing::make_series("s" + std::to_string(i), {1, 2, 3}));
    return d;
}

std::vector<std::string> ids(const Dataset& d) {
    std::vector<std::string> out;
    for (const auto& s : d.series) out.push_back(s.id);
    return out;
}
}  // namespace

TEST_CASE("split_train_test sizes and determinism") {
    auto [train, test] = split_train_test(n_series(4), 0.25, 1);
    CHECK(train.series.size() == 3);
    CHECK(test.series.size() == 1);

    const auto a = split_train_test(n_series(2), 0.5, 9);
    const auto b = split_train_test(n_series(2), 0.5, 9);
    CHECK(ids(a.first) == ids(b.first));
    CHECK(ids(a.second) == ids(b.second));

    auto [tr, te] = split_train_test(n_series(100), 0.5, 4);
    CHECK(tr.series.size() == 50);
    CHECK(te.series.size() == 50);

    CHECK_THROWS_AS(split_train_test(n_series(1), 0.5, 1), Error);
    CHECK_THROWS_AS(split_train_test(n_series(4), 1.0, 1), Error);
}

TEST_CASE("split_train_test is a partition") {
    for (int n = 2; n < 40; n += 3) {
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            const auto d = n_series(n);
            auto [train, test] = split_train_test(d, 0.3, seed);
            CHECK(train.series.size() + test.series.size() == d.series.size());
            CHECK_FALSE(train.series.empty());
            CHECK_FALSE(test.series.empty());
            std::set<std::string> all;
            for (const auto& id : ids(train)) all.insert(id);
            for (const auto& id : ids(test)) CHECK(all.insert(id).second);
            CHECK(all.size() == d.series.size());
        }
    }
}

TEST_CASE("extract_segment examples") {
    const auto s = testing::make_series("a", std::vector<double>(1000, 0.0));
    auto seg = extract_segment(s, 500, 100);
    CHECK(seg.start_index == 450);
    CHECK(seg.end_index == 549);
    seg = extract_segment(s, 0, 100);
    CHECK(seg.start_index == 0);
    CHECK(seg.end_index == 99);
    const auto shorter = testing::make_series("b", std::vector<double>(50, 0.0));
    seg = extract_segment(shorter, 25, 400);
    CHECK(seg.start_index == 0);
    CHECK(seg.end_index == 49);
    CHECK_THROWS_AS(extract_segment(shorter, 50, 10), Error);
}

TEST_CASE("extract_segment contains its center and respects the length") {
    Rng rng(11);
    for (int trial = 0; trial < 2000; ++trial) {
        const auto n = 1 + rng.index(300);
        const auto s = testing::make_series("a", std::vector<double>(n, 1.0));
        const auto center = rng.index(n);
        const auto length = 1 + rng.index(400);
        const auto seg = extract_segment(s, center, length);
        CHECK(seg.contains(center));
        CHECK(seg.length() <= length);
        CHECK(seg.length() == std::min<std::size_t>(length, n));
        CHECK(seg.end_index < n);
    }
}

TEST_CASE("PointIndex maps flat indices to series positions") {
    Dataset d;
    d.series.push_back(testing::make_series("a", {1, 2, 3}));
    d.series.push_back(testing::make_series("b", {4, 5}));
    const PointIndex idx(d);
    CHECK(idx.size() == 5);
    CHECK(idx.locate(3) == std::pair<std::size_t, std::size_t>{1, 0});
    CHECK(idx.global(1, 1) == 4);
}
