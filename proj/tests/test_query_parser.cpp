#include <catch2/catch_amalgamated.hpp>

#include <tiersim/query_parser.hpp>

using namespace tiersim;

namespace {

// The three reference queries, whitespace and case preserved exactly as they
// appear in the field deployment they were lifted from.
const char* kMaxDownload =
    "EVERY 60 seconds compute the max value of download_speed \n"
    "of the last 3 minutes \n"
    "FROM \tcassandra database neubot series speedtests and streaming \n"
    "RabbitMQ queue neubotspeed";

const char* kMeanDownload =
    "EVERY \t5 minutes compute the mean of the download_speed \n"
    "of the last 120 days \n"
    "FROM \tcassandra database neubot series speedtests and streaming \n"
    "rabbitmq queue neubotspeed";

const char* kMeanUpload =
    "EVERY 30 seconds compute the mean value of upload_speed \n"
    " starting 10 days ago \n"
    "FROM \tcassandra database neubot series speedtests and streaming\n"
    "rabbitmq queue neubotspeed";

} // namespace

TEST_CASE("the max-download query parses field for field", "[query]") {
    ContinuousQuery q = parse_query(kMaxDownload);
    CHECK(q.period_s == 60.0);
    CHECK(q.aggregate == AggregateKind::max);
    CHECK(q.attribute == "download_speed");
    CHECK(q.window.kind == WindowKind::sliding);
    CHECK(q.window.width_s == 180.0);
    CHECK(q.window.slide_s == 60.0);
    CHECK(q.historic_source == "cassandra database neubot series speedtests");
    CHECK(q.live_source == "RabbitMQ queue neubotspeed");
}

TEST_CASE("the long-history mean query tolerates the article form", "[query]") {
    ContinuousQuery q = parse_query(kMeanDownload);
    CHECK(q.period_s == 300.0);
    CHECK(q.aggregate == AggregateKind::mean);
    CHECK(q.attribute == "download_speed");
    CHECK(q.window.kind == WindowKind::sliding);
    CHECK(q.window.width_s == 120.0 * 86400.0);
    CHECK(q.window.slide_s == 300.0);
    CHECK(q.live_source == "rabbitmq queue neubotspeed");
}

TEST_CASE("the landmark query records its backward offset", "[query]") {
    ContinuousQuery q = parse_query(kMeanUpload);
    CHECK(q.period_s == 30.0);
    CHECK(q.aggregate == AggregateKind::mean);
    CHECK(q.attribute == "upload_speed");
    CHECK(q.window.kind == WindowKind::landmark);
    CHECK(q.starting_ago_s == 10.0 * 86400.0);
    CHECK(q.window.origin == 0.0); // not anchored yet

    anchor_query(q, 2'000'000.0);
    CHECK(q.window.origin == 2'000'000.0 - 864000.0);
    // Re-anchoring a sliding query is a no-op.
    ContinuousQuery s = parse_query(kMaxDownload);
    anchor_query(s, 500.0);
    CHECK(s.window.origin == 0.0);
}

TEST_CASE("rendering produces one canonical spelling", "[query]") {
    CHECK(render_query(parse_query(kMaxDownload)) ==
          "EVERY 1 minute compute the max value of download_speed of the last 3 minutes "
          "FROM cassandra database neubot series speedtests "
          "and streaming RabbitMQ queue neubotspeed");
    CHECK(render_query(parse_query(kMeanDownload)) ==
          "EVERY 5 minutes compute the mean value of download_speed of the last 120 days "
          "FROM cassandra database neubot series speedtests "
          "and streaming rabbitmq queue neubotspeed");
    CHECK(render_query(parse_query(kMeanUpload)) ==
          "EVERY 30 seconds compute the mean value of upload_speed starting 10 days ago "
          "FROM cassandra database neubot series speedtests "
          "and streaming rabbitmq queue neubotspeed");
}

TEST_CASE("parse of render is the identity", "[query]") {
    for (const char* text : {kMaxDownload, kMeanDownload, kMeanUpload}) {
        ContinuousQuery q = parse_query(text);
        CHECK(parse_query(render_query(q)) == q);
    }
    // Mixed units survive because rendering picks the largest exact one.
    ContinuousQuery q = parse_query(
        "EVERY 90 seconds compute the count value of x of the last 36 hours "
        "FROM a and streaming b");
    CHECK(render_query(q) ==
          "EVERY 90 seconds compute the count value of x of the last 36 hours "
          "FROM a and streaming b");
    CHECK(parse_query(render_query(q)) == q);

    ContinuousQuery day = parse_query(
        "EVERY 86400 seconds compute the min value of x starting 120 minutes ago "
        "FROM a and streaming b");
    CHECK(render_query(day) ==
          "EVERY 1 day compute the min value of x starting 2 hours ago "
          "FROM a and streaming b");
    CHECK(parse_query(render_query(day)) == day);

    ContinuousQuery tumbling;
    tumbling.period_s = 5.0;
    tumbling.window = {WindowKind::tumbling, 10.0, 0.0, 0.0};
    CHECK_THROWS_AS(render_query(tumbling), ValidationError); // no text form exists
}

TEST_CASE("parse errors carry character positions", "[query]") {
    auto message = [](const char* text) {
        try {
            parse_query(text);
        } catch (const ParseError& e) {
            return std::string(e.what());
        }
        return std::string("(no error)");
    };

    CHECK(message("EVERY 0 seconds compute the max value of x of the last 3 minutes "
                  "FROM a and streaming b")
              .find("position 7") != std::string::npos);
    CHECK(message("EVERY -5 seconds compute the max value of x of the last 3 minutes "
                  "FROM a and streaming b")
              .find("must be positive") != std::string::npos);

    std::string unknown_agg =
        message("EVERY 5 seconds compute the median value of x of the last 2 seconds "
                "FROM a and streaming b");
    CHECK(unknown_agg.find("median") != std::string::npos);
    CHECK(unknown_agg.find("position 29") != std::string::npos);

    CHECK(message("EVERY 5 fortnights compute the max value of x of the last 2 seconds "
                  "FROM a and streaming b")
              .find("unknown time unit 'fortnights'") != std::string::npos);
    CHECK(message("EVERY five seconds compute the max value of x of the last 2 seconds "
                  "FROM a and streaming b")
              .find("expected a number") != std::string::npos);

    CHECK(message("") != "(no error)");
    CHECK(message("EVERY 5 seconds compute the max value of x FROM a and streaming b")
              .find("'of the last' or 'starting'") != std::string::npos);
    CHECK(message("EVERY 5 seconds compute the max value of x of the last 2 seconds "
                  "FROM and streaming b")
              .find("store reference") != std::string::npos);
    CHECK(message("EVERY 5 seconds compute the max value of x of the last 2 seconds "
                  "FROM a and streaming")
              .find("stream reference") != std::string::npos);
    CHECK(message("EVERY 5 seconds compute the max value of x of the last 2 seconds "
                  "FROM a b c")
              .find("unexpected end") != std::string::npos);
}

TEST_CASE("durations render with the largest exact unit", "[query]") {
    using tiersim::detail::render_duration;
    CHECK(render_duration(1.0) == "1 second");
    CHECK(render_duration(45.0) == "45 seconds");
    CHECK(render_duration(60.0) == "1 minute");
    CHECK(render_duration(180.0) == "3 minutes");
    CHECK(render_duration(3600.0) == "1 hour");
    CHECK(render_duration(7200.0) == "2 hours");
    CHECK(render_duration(86400.0) == "1 day");
    CHECK(render_duration(10368000.0) == "120 days");
    CHECK(render_duration(90.0) == "90 seconds");
    CHECK(render_duration(0.5) == "0.5 seconds");
}

TEST_CASE("singular and plural units both parse", "[query]") {
    ContinuousQuery q = parse_query(
        "EVERY 1 minute compute the max value of x of the last 1 hour "
        "FROM a and streaming b");
    CHECK(q.period_s == 60.0);
    CHECK(q.window.width_s == 3600.0);
    ContinuousQuery d = parse_query(
        "EVERY 2 day compute the max value of x starting 1 days ago "
        "FROM a and streaming b");
    CHECK(d.period_s == 172800.0);
    CHECK(d.starting_ago_s == 86400.0);
}
