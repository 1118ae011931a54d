#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <random>
#include <thread>
#include <unistd.h>

#include <tiersim/streamops.hpp>

#include "oracles.hpp"

using namespace tiersim;
namespace fs = std::filesystem;

namespace {

StreamTuple tup(double ts, std::initializer_list<std::pair<std::string, Value>> attrs) {
    StreamTuple t;
    t.timestamp = ts;
    for (auto& [k, v] : attrs) t.attributes[k] = v;
    return t;
}

fs::path temp_dir() {
    fs::path dir = fs::temp_directory_path() /
                   ("tiersim-test-" + std::to_string(::getpid()));
    fs::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("tuples serialize to a stable typed text form", "[streamops]") {
    StreamTuple t = tup(120.0, {{"count", Value(5LL)},
                                {"speed", Value(5.0)},
                                {"label", Value(std::string("5"))},
                                {"grade", Value('x')},
                                {"city", Value(std::string("metz"))}});
    std::string line = serialize_tuple(t);
    // Attributes come out name-sorted and each type keeps its own spelling.
    CHECK(line == "120,city=\"metz\";count=5;grade='x';label=\"5\";speed=5.0");
    CHECK(parse_tuple(line) == t);
}

TEST_CASE("integer-looking floats stay floats across a round trip", "[streamops]") {
    StreamTuple t = tup(1.0, {{"v", Value(3.0)}});
    std::string line = serialize_tuple(t);
    CHECK(line == "1,v=3.0");
    StreamTuple back = parse_tuple(line);
    CHECK(std::holds_alternative<double>(back.attributes.at("v")));
    CHECK(back == t);

    StreamTuple i = tup(1.0, {{"v", Value(3LL)}});
    CHECK(serialize_tuple(i) == "1,v=3");
    CHECK(std::holds_alternative<long long>(parse_tuple("1,v=3").attributes.at("v")));

    CHECK(serialize_tuple(tup(0.5, {{"v", Value(0.25)}})) == "0.5,v=0.25");
}

TEST_CASE("bare words parse as text", "[streamops]") {
    StreamTuple t = parse_tuple("7,name=neubot");
    CHECK(std::get<std::string>(t.attributes.at("name")) == "neubot");
}

TEST_CASE("reserved characters and malformed lines are rejected", "[streamops]") {
    CHECK_THROWS_AS(serialize_tuple(tup(0, {{"a;b", Value(1LL)}})), ValidationError);
    CHECK_THROWS_AS(serialize_tuple(tup(0, {{"a", Value(std::string("x,y"))}})),
                    ValidationError);
    CHECK_THROWS_AS(serialize_tuple(tup(0, {{"", Value(1LL)}})), ValidationError);
    CHECK_THROWS_AS(serialize_tuple(tup(0, {{"a", Value(std::nan(""))}})), ValidationError);

    CHECK_THROWS_AS(parse_tuple("no timestamp here"), ParseError);
    CHECK_THROWS_AS(parse_tuple("abc,v=1"), ParseError);
    CHECK_THROWS_AS(parse_tuple("5,novalue"), ParseError);
    CHECK_THROWS_AS(parse_tuple("5,=1"), ParseError);
}

TEST_CASE("window bounds match their textbook definitions", "[streamops]") {
    // Sliding: everything within the trailing width, endpoints included.
    TimeInterval s = window_bounds({WindowKind::sliding, 180.0, 60.0, 0.0}, 300.0);
    CHECK(s == TimeInterval{120.0, 300.0, true});
    CHECK(s.contains(120.0));
    CHECK(s.contains(300.0));
    CHECK_FALSE(s.contains(119.9));

    // Landmark: from the origin to now, inclusive.
    TimeInterval l = window_bounds({WindowKind::landmark, 0.0, 0.0, 10.0}, 25.0);
    CHECK(l == TimeInterval{10.0, 25.0, true});
    CHECK_THROWS_AS(window_bounds({WindowKind::landmark, 0.0, 0.0, 10.0}, 9.0), WindowError);

    // Tumbling: the most recently completed aligned slot, half-open.
    TimeInterval m = window_bounds({WindowKind::tumbling, 3.0, 0.0, 0.0}, 7.0);
    CHECK(m == TimeInterval{3.0, 6.0, false});
    CHECK_FALSE(m.contains(6.0));
    CHECK(m.contains(3.0));
    CHECK(window_bounds({WindowKind::tumbling, 3.0, 0.0, 0.0}, 3.0) ==
          TimeInterval{0.0, 3.0, false});
    CHECK_THROWS_AS(window_bounds({WindowKind::tumbling, 3.0, 0.0, 0.0}, 2.9), WindowError);

    CHECK_THROWS_AS(window_bounds({WindowKind::sliding, 0.0, 0.0, 0.0}, 1.0),
                    ValidationError);
    CHECK_THROWS_AS(window_bounds({WindowKind::tumbling, -1.0, 0.0, 0.0}, 1.0),
                    ValidationError);
}

TEST_CASE("tumbling slots agree with the brute-force walk", "[streamops]") {
    std::mt19937 rng(7);
    for (int i = 0; i < 300; ++i) {
        double origin = oracle::uniform_int(rng, 0, 20);
        double width = oracle::uniform_int(rng, 1, 7);
        double now = origin + oracle::uniform_int(rng, 0, 40);
        auto slot = oracle::naive_tumbling_slot(origin, width, now);
        WindowSpec spec{WindowKind::tumbling, width, 0.0, origin};
        if (!slot) {
            CHECK_THROWS_AS(window_bounds(spec, now), WindowError);
        } else {
            TimeInterval got = window_bounds(spec, now);
            CAPTURE(origin, width, now);
            CHECK(got == TimeInterval{slot->first, slot->second, false});
        }
    }
}

TEST_CASE("aggregates compute the expected values", "[streamops]") {
    std::vector<StreamTuple> two = {tup(1, {{"v", Value(2.0)}}), tup(2, {{"v", Value(4.0)}})};
    CHECK(aggregate(two, "v", AggregateKind::mean) == 3.0);
    CHECK(aggregate(two, "v", AggregateKind::min) == 2.0);
    CHECK(aggregate(two, "v", AggregateKind::max) == 4.0);
    CHECK(aggregate(two, "v", AggregateKind::count) == 2.0);

    std::vector<StreamTuple> one = {tup(9, {{"v", Value(5LL)}})};
    CHECK(aggregate(one, "v", AggregateKind::max) == 5.0);

    std::vector<StreamTuple> none;
    CHECK_FALSE(aggregate(none, "v", AggregateKind::mean).has_value());
    CHECK_FALSE(aggregate(none, "v", AggregateKind::min).has_value());
    CHECK(aggregate(none, "v", AggregateKind::count) == 0.0);

    CHECK_THROWS_AS(aggregate(two, "missing", AggregateKind::mean), ValidationError);
    std::vector<StreamTuple> text = {tup(1, {{"v", Value(std::string("fast"))}})};
    CHECK_THROWS_AS(aggregate(text, "v", AggregateKind::min), ValidationError);
}

TEST_CASE("aggregate names round-trip", "[streamops]") {
    for (AggregateKind k : {AggregateKind::min, AggregateKind::max, AggregateKind::mean,
                            AggregateKind::count})
        CHECK(parse_aggregate(aggregate_name(k)) == k);
    CHECK_THROWS_AS(parse_aggregate("median"), ParseError);
}

TEST_CASE("stores enforce time order and answer inclusive range queries", "[streamops]") {
    HistoricStore store("speeds");
    for (int i = 1; i <= 10; ++i) store.append(tup(i, {{"v", Value(double(i))}}));
    CHECK(store.size() == 10);
    CHECK_THROWS_AS(store.append(tup(5, {{"v", Value(1.0)}})), ValidationError);
    store.append(tup(10, {{"v", Value(99.0)}})); // equal timestamps are fine
    CHECK(store.size() == 11);

    std::vector<StreamTuple> mid = store.range_query({3.0, 7.0, true});
    REQUIRE(mid.size() == 5);
    CHECK(mid.front().timestamp == 3.0);
    CHECK(mid.back().timestamp == 7.0);

    std::vector<StreamTuple> open = store.range_query({3.0, 7.0, false});
    REQUIRE(open.size() == 4);
    CHECK(open.back().timestamp == 6.0);
}

TEST_CASE("range queries agree with a linear scan", "[streamops]") {
    std::mt19937 rng(11);
    HistoricStore store("rand");
    double ts = 0.0;
    for (int i = 0; i < 200; ++i) {
        ts += oracle::uniform_int(rng, 0, 3);
        store.append(tup(ts, {{"v", Value(oracle::uniform(rng, 0.0, 1.0))}}));
    }
    std::vector<StreamTuple> all = store.all();
    for (int i = 0; i < 50; ++i) {
        TimeInterval b{double(oracle::uniform_int(rng, -5, 200)),
                       double(oracle::uniform_int(rng, -5, 200)),
                       i % 2 == 0};
        std::vector<StreamTuple> expect;
        for (const StreamTuple& t : all)
            if (oracle::in_bounds(t.timestamp, b)) expect.push_back(t);
        CHECK(store.range_query(b) == expect);
    }
}

TEST_CASE("file-backed stores persist and reload", "[streamops]") {
    fs::path dir = temp_dir();
    fs::path file = dir / "speeds.csv";
    fs::remove(file);
    {
        HistoricStore store("speeds", file);
        store.append(tup(100, {{"download_speed", Value(42.25)}}));
        store.append(tup(160, {{"download_speed", Value(17.5)}}));
    }
    {
        std::ifstream in(file);
        std::string l1, l2;
        std::getline(in, l1);
        std::getline(in, l2);
        CHECK(l1 == "100,download_speed=42.25");
        CHECK(l2 == "160,download_speed=17.5");
    }
    HistoricStore again("speeds", file);
    CHECK(again.size() == 2);
    again.append(tup(200, {{"download_speed", Value(3.0)}})); // appends after reload
    HistoricStore third("speeds", file);
    CHECK(third.size() == 3);
    fs::remove(file);
}

TEST_CASE("corrupt store files fail with the offending line", "[streamops]") {
    fs::path dir = temp_dir();
    fs::path bad = dir / "bad.csv";
    std::ofstream(bad) << "1,v=1\nnot a tuple\n";
    try {
        HistoricStore store("bad", bad);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find(":2:") != std::string::npos);
    }

    fs::path unordered = dir / "unordered.csv";
    std::ofstream(unordered) << "5,v=1\n3,v=1\n";
    CHECK_THROWS_AS(HistoricStore("u", unordered), ParseError);
    fs::remove(bad);
    fs::remove(unordered);
}

TEST_CASE("load_store_file reads logs without touching them", "[streamops]") {
    fs::path src = fs::path(TIERSIM_SOURCE_DIR) / "data" / "speed_store.csv";
    auto before = fs::last_write_time(src);
    HistoricStore store("neubot speedtests");
    load_store_file(store, src);
    CHECK(store.size() == 10);
    CHECK(store.all().front().timestamp == 100.0);
    CHECK(store.all().back().timestamp == 640.0);
    CHECK(fs::last_write_time(src) == before);

    HistoricStore none("nope");
    CHECK_THROWS_AS(load_store_file(none, fs::path("/does/not/exist.csv")), IoError);
}

TEST_CASE("the bounded buffer spills its oldest tuples losslessly", "[streamops]") {
    CHECK_THROWS_AS(BoundedBuffer(0, nullptr), ValidationError);

    for (std::size_t cap : {std::size_t{1}, std::size_t{2}, std::size_t{7}, std::size_t{64}}) {
        HistoricStore store("spill");
        BoundedBuffer buf(cap, &store);
        std::vector<std::string> pushed;
        for (int i = 0; i < 100; ++i) {
            StreamTuple t = tup(i, {{"v", Value(double(i) / 4.0)}});
            pushed.push_back(serialize_tuple(t));
            buf.push(t);
        }
        CHECK(buf.size() == std::min<std::size_t>(cap, 100));
        // Store prefix + buffer suffix reassemble the original sequence.
        std::vector<std::string> together;
        for (const StreamTuple& t : store.all()) together.push_back(serialize_tuple(t));
        for (const StreamTuple& t : buf.snapshot()) together.push_back(serialize_tuple(t));
        CHECK(together == pushed);
    }
}

TEST_CASE("the buffer rejects disorder and overflow without a store", "[streamops]") {
    BoundedBuffer buf(4, nullptr);
    buf.push(tup(5, {}));
    CHECK_THROWS_AS(buf.push(tup(4, {})), ValidationError);
    buf.push(tup(5, {})); // equal timestamps are allowed

    BoundedBuffer tiny(1, nullptr);
    tiny.push(tup(1, {}));
    CHECK_THROWS_AS(tiny.push(tup(2, {})), ValidationError);
}

TEST_CASE("evaluation merges history with the live tail", "[streamops]") {
    HistoricStore store("speeds");
    BoundedBuffer buf(8, &store);
    for (int i = 0; i <= 9; ++i) store.append(tup(i, {{"download_speed", Value(double(i))}}));
    for (int i = 10; i <= 14; ++i) buf.push(tup(i, {{"download_speed", Value(double(i))}}));

    ContinuousQuery q;
    q.period_s = 1.0;
    q.attribute = "download_speed";
    q.window = {WindowKind::sliding, 5.0, 1.0, 0.0};

    q.aggregate = AggregateKind::mean;
    auto mean = evaluate(q, store, buf, 14.0); // window [9, 14]
    REQUIRE(mean.has_value());
    CHECK(mean->timestamp == 14.0);
    CHECK(std::get<double>(mean->attributes.at("value")) == 11.5);

    q.aggregate = AggregateKind::max;
    CHECK(std::get<double>(evaluate(q, store, buf, 14.0)->attributes.at("value")) == 14.0);

    q.aggregate = AggregateKind::count;
    auto count = evaluate(q, store, buf, 14.0);
    CHECK(std::get<long long>(count->attributes.at("value")) == 6);

    // A window over silent time: count says 0, mean says nothing.
    auto zero = evaluate(q, store, buf, 25.0); // [20, 25]
    CHECK(std::get<long long>(zero->attributes.at("value")) == 0);
    q.aggregate = AggregateKind::mean;
    CHECK_FALSE(evaluate(q, store, buf, 25.0).has_value());
}

TEST_CASE("tuples seen both in the store and the buffer count once", "[streamops]") {
    HistoricStore store("dup");
    BoundedBuffer buf(8, &store);
    StreamTuple shared = tup(5, {{"v", Value(1.25)}});
    store.append(shared);
    buf.push(shared);
    buf.push(tup(6, {{"v", Value(2.0)}}));

    ContinuousQuery q;
    q.attribute = "v";
    q.aggregate = AggregateKind::count;
    q.window = {WindowKind::landmark, 0.0, 0.0, 0.0};
    CHECK(std::get<long long>(evaluate(q, store, buf, 10.0)->attributes.at("value")) == 2);
    q.aggregate = AggregateKind::mean;
    CHECK(std::get<double>(evaluate(q, store, buf, 10.0)->attributes.at("value")) == 1.625);
}

TEST_CASE("evaluation matches the naive oracle on random streams", "[streamops]") {
    std::mt19937 rng(20240818);
    for (int trial = 0; trial < 300; ++trial) {
        HistoricStore store("rand");
        BoundedBuffer buf(size_t(oracle::uniform_int(rng, 1, 12)), &store);
        int n = oracle::uniform_int(rng, 0, 40);
        double ts = 0.0;
        std::vector<StreamTuple> everything;
        for (int i = 0; i < n; ++i) {
            ts += oracle::uniform_int(rng, 0, 3);
            StreamTuple t = tup(ts, {});
            if (rng() % 2 == 0)
                t.attributes["v"] = Value(double(oracle::uniform_int(rng, 0, 100)) / 8.0);
            else
                t.attributes["v"] = Value(static_cast<long long>(oracle::uniform_int(rng, 0, 100)));
            if (rng() % 4 == 0) t.attributes["tag"] = Value('a');
            everything.push_back(t);
            buf.push(t);
        }

        ContinuousQuery q;
        q.attribute = "v";
        q.aggregate = static_cast<AggregateKind>(oracle::uniform_int(rng, 0, 3));
        int kind = oracle::uniform_int(rng, 0, 2);
        double width = oracle::uniform_int(rng, 1, 15);
        double origin = oracle::uniform_int(rng, 0, 10);
        double now = oracle::uniform_int(rng, 10, 60);
        if (kind == 0)
            q.window = {WindowKind::sliding, width, 1.0, 0.0};
        else if (kind == 1)
            q.window = {WindowKind::tumbling, width, 0.0, origin};
        else
            q.window = {WindowKind::landmark, 0.0, 0.0, origin};

        TimeInterval bounds;
        try {
            bounds = window_bounds(q.window, now);
        } catch (const WindowError&) {
            CHECK_THROWS_AS(evaluate(q, store, buf, now), WindowError);
            continue;
        }
        auto expect = oracle::naive_window_aggregate(store.all(), buf.snapshot(), bounds,
                                                     "v", q.aggregate);
        auto got = evaluate(q, store, buf, now);
        CAPTURE(trial, n, kind, width, origin, now, int(q.aggregate));
        if (q.aggregate == AggregateKind::count) {
            REQUIRE(got.has_value());
            CHECK(double(std::get<long long>(got->attributes.at("value"))) == *expect);
        } else if (!expect) {
            CHECK_FALSE(got.has_value());
        } else {
            REQUIRE(got.has_value());
            CHECK(std::get<double>(got->attributes.at("value")) == *expect);
        }
    }
}

TEST_CASE("a producer and an evaluator can run concurrently", "[streamops]") {
    HistoricStore store("live");
    BoundedBuffer buf(16, &store);
    ContinuousQuery q;
    q.attribute = "v";
    q.aggregate = AggregateKind::count;
    q.window = {WindowKind::sliding, 5000.0, 1.0, 0.0};

    std::thread producer([&] {
        for (int i = 0; i < 5000; ++i) buf.push(tup(i, {{"v", Value(double(i))}}));
    });
    long long last_seen = 0;
    for (int i = 0; i < 200; ++i) {
        auto r = evaluate(q, store, buf, 5000.0);
        REQUIRE(r.has_value());
        long long c = std::get<long long>(r->attributes.at("value"));
        CHECK(c >= last_seen); // nothing is ever lost mid-flight
        last_seen = c;
    }
    producer.join();
    CHECK(std::get<long long>(evaluate(q, store, buf, 5000.0)->attributes.at("value")) == 5000);
}

TEST_CASE("the synthetic feed is reproducible and bounded", "[streamops]") {
    std::vector<StreamTuple> a = synthetic_speed_stream(50, 100.0, 30.0, 42);
    std::vector<StreamTuple> b = synthetic_speed_stream(50, 100.0, 30.0, 42);
    CHECK(a == b);
    REQUIRE(a.size() == 50);
    CHECK(a.front().timestamp == 100.0);
    CHECK(a.back().timestamp == 100.0 + 49 * 30.0);
    for (const StreamTuple& t : a) {
        double down = std::get<double>(t.attributes.at("download_speed"));
        double up = std::get<double>(t.attributes.at("upload_speed"));
        CHECK(down >= 1.0);
        CHECK(down < 96.0);
        CHECK(up >= 0.5);
        CHECK(up < 20.5);
    }
    CHECK(synthetic_speed_stream(50, 100.0, 30.0, 43) != a);
    CHECK_THROWS_AS(synthetic_speed_stream(-1, 0.0, 1.0, 1), ValidationError);
}
