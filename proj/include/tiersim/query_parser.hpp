#pragma once

#include <cctype>
#include <charconv>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "tiersim/errors.hpp"
#include "tiersim/format.hpp"
#include "tiersim/streamops.hpp"

namespace tiersim {

// Continuous-query text:
//   EVERY <n> <unit> compute the <agg> [value] of [the] <attr>
//     ( of the last <n> <unit> | starting <n> <unit> ago )
//   FROM <store-ref...> and streaming <stream-ref...>
// Tokens are separated by any whitespace (spaces, tabs, newlines). Store and
// stream references may span several words. "of the last W" yields a sliding
// window of width W sliding by the query period; "starting T ago" yields a
// landmark window whose origin is fixed at registration (see anchor_query).

namespace detail {

struct QueryToken {
    std::string text;
    std::size_t pos = 0; // 1-based character position in the query text
};

inline std::vector<QueryToken> tokenize_query(std::string_view text) {
    std::vector<QueryToken> out;
    std::size_t i = 0;
    while (i < text.size()) {
        if (std::isspace(static_cast<unsigned char>(text[i]))) {
            ++i;
            continue;
        }
        std::size_t start = i;
        while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        out.push_back({std::string(text.substr(start, i - start)), start + 1});
    }
    return out;
}

class QueryCursor {
public:
    QueryCursor(std::vector<QueryToken> tokens, std::size_t text_size)
        : tokens_(std::move(tokens)), end_pos_(text_size + 1) {}

    bool done() const { return i_ >= tokens_.size(); }

    std::size_t position() const { return done() ? end_pos_ : tokens_[i_].pos; }

    const QueryToken& peek() const {
        if (done()) throw ParseError("query: unexpected end of text at position " +
                                     std::to_string(end_pos_));
        return tokens_[i_];
    }

    QueryToken take() {
        QueryToken t = peek();
        ++i_;
        return t;
    }

    void expect(std::string_view keyword) {
        const QueryToken& t = peek();
        if (t.text != keyword)
            throw ParseError("query: expected '" + std::string(keyword) + "' at position " +
                             std::to_string(t.pos) + ", found '" + t.text + "'");
        ++i_;
    }

    bool try_take(std::string_view keyword) {
        if (!done() && tokens_[i_].text == keyword) {
            ++i_;
            return true;
        }
        return false;
    }

    bool next_is(std::string_view keyword) const {
        return i_ + 1 < tokens_.size() && tokens_[i_ + 1].text == keyword;
    }

private:
    std::vector<QueryToken> tokens_;
    std::size_t i_ = 0;
    std::size_t end_pos_;
};

inline double unit_multiplier(const QueryToken& t) {
    const std::string& u = t.text;
    if (u == "second" || u == "seconds") return 1.0;
    if (u == "minute" || u == "minutes") return 60.0;
    if (u == "hour" || u == "hours") return 3600.0;
    if (u == "day" || u == "days") return 86400.0;
    throw ParseError("query: unknown time unit '" + u + "' at position " +
                     std::to_string(t.pos));
}

inline double parse_duration(QueryCursor& cur) {
    QueryToken n = cur.take();
    double count = 0.0;
    auto [p, ec] = std::from_chars(n.text.data(), n.text.data() + n.text.size(), count);
    if (ec != std::errc() || p != n.text.data() + n.text.size())
        throw ParseError("query: expected a number at position " + std::to_string(n.pos) +
                         ", found '" + n.text + "'");
    double seconds = count * unit_multiplier(cur.take());
    if (!(seconds > 0))
        throw ParseError("query: duration must be positive at position " +
                         std::to_string(n.pos));
    return seconds;
}

// Longest unit that divides the duration exactly, e.g. 86400 -> "1 day".
inline std::string render_duration(double seconds) {
    struct Unit {
        double mult;
        const char* singular;
        const char* plural;
    };
    static constexpr Unit units[] = {{86400.0, "day", "days"},
                                     {3600.0, "hour", "hours"},
                                     {60.0, "minute", "minutes"},
                                     {1.0, "second", "seconds"}};
    for (const Unit& u : units) {
        double n = seconds / u.mult;
        if (n == std::floor(n) && n >= 1.0)
            return format_double(n) + ' ' + (n == 1.0 ? u.singular : u.plural);
    }
    return format_double(seconds) + " seconds";
}

} // namespace detail

inline ContinuousQuery parse_query(std::string_view text) {
    detail::QueryCursor cur(detail::tokenize_query(text), text.size());
    ContinuousQuery q;

    cur.expect("EVERY");
    q.period_s = detail::parse_duration(cur);

    cur.expect("compute");
    cur.expect("the");
    detail::QueryToken agg = cur.take();
    try {
        q.aggregate = parse_aggregate(agg.text);
    } catch (const ParseError&) {
        throw ParseError("query: unknown aggregate '" + agg.text + "' at position " +
                         std::to_string(agg.pos));
    }
    cur.try_take("value");
    cur.expect("of");
    cur.try_take("the");
    q.attribute = cur.take().text;

    if (cur.try_take("of")) {
        cur.expect("the");
        cur.expect("last");
        q.window.kind = WindowKind::sliding;
        q.window.width_s = detail::parse_duration(cur);
        q.window.slide_s = q.period_s;
    } else if (cur.try_take("starting")) {
        q.window.kind = WindowKind::landmark;
        q.starting_ago_s = detail::parse_duration(cur);
        cur.expect("ago");
    } else {
        throw ParseError("query: expected 'of the last' or 'starting' at position " +
                         std::to_string(cur.position()));
    }

    cur.expect("FROM");
    std::string store;
    while (!cur.done() && !(cur.peek().text == "and" && cur.next_is("streaming"))) {
        if (!store.empty()) store += ' ';
        store += cur.take().text;
    }
    if (store.empty())
        throw ParseError("query: expected a store reference at position " +
                         std::to_string(cur.position()));
    cur.expect("and");
    cur.expect("streaming");
    std::string stream;
    while (!cur.done()) {
        if (!stream.empty()) stream += ' ';
        stream += cur.take().text;
    }
    if (stream.empty())
        throw ParseError("query: expected a stream reference at position " +
                         std::to_string(cur.position()));
    q.historic_source = std::move(store);
    q.live_source = std::move(stream);
    return q;
}

// Canonical text form; parse_query(render_query(q)) == q for any query a
// parse can produce.
inline std::string render_query(const ContinuousQuery& q) {
    std::string out = "EVERY " + detail::render_duration(q.period_s) + " compute the " +
                      aggregate_name(q.aggregate) + " value of " + q.attribute + ' ';
    switch (q.window.kind) {
        case WindowKind::sliding:
            out += "of the last " + detail::render_duration(q.window.width_s);
            break;
        case WindowKind::landmark:
            out += "starting " + detail::render_duration(q.starting_ago_s) + " ago";
            break;
        case WindowKind::tumbling:
            throw ValidationError("tumbling windows have no query text form");
    }
    out += " FROM " + q.historic_source + " and streaming " + q.live_source;
    return out;
}

} // namespace tiersim
