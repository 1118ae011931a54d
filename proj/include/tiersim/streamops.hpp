#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "tiersim/errors.hpp"
#include "tiersim/format.hpp"

namespace tiersim {

// Atomic attribute value: integer, float, text, or char.
using Value = std::variant<long long, double, std::string, char>;

// A timestamped record on a stream. Timestamps are assigned on arrival and
// sources are monotone, so consumers may rely on time order.
struct StreamTuple {
    double timestamp = 0.0;
    std::map<std::string, Value> attributes;

    friend bool operator==(const StreamTuple&, const StreamTuple&) = default;
};

// ---------------------------------------------------------------------------
// Tuple text form: `timestamp,attr=value;attr=value` (attributes name-sorted).
// Text is double-quoted and chars single-quoted so that "5", 5 and 5.0 stay
// distinct across a round trip.

namespace detail {

inline bool parses_as_integer(std::string_view s) {
    long long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    return ec == std::errc() && ptr == s.data() + s.size();
}

inline void check_plain_text(std::string_view s, const char* what) {
    for (char c : s)
        if (c == ',' || c == ';' || c == '=' || c == '"' || c == '\'' || c == '\n' || c == '\r')
            throw ValidationError(std::string(what) + " contains a reserved character: " +
                                  std::string(s));
}

} // namespace detail

inline std::string serialize_value(const Value& v) {
    if (const auto* i = std::get_if<long long>(&v)) return std::to_string(*i);
    if (const auto* d = std::get_if<double>(&v)) {
        if (!std::isfinite(*d)) throw ValidationError("non-finite attribute value");
        std::string s = format_double(*d);
        if (detail::parses_as_integer(s)) s += ".0"; // keep the float/integer distinction
        return s;
    }
    if (const auto* c = std::get_if<char>(&v)) return std::string("'") + *c + "'";
    const std::string& s = std::get<std::string>(v);
    detail::check_plain_text(s, "text value");
    return '"' + s + '"';
}

inline Value parse_value(std::string_view s) {
    if (s.size() == 3 && s.front() == '\'' && s.back() == '\'') return s[1];
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"')
        return std::string(s.substr(1, s.size() - 2));
    long long i = 0;
    if (auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), i);
        ec == std::errc() && p == s.data() + s.size())
        return i;
    double d = 0.0;
    if (auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), d);
        ec == std::errc() && p == s.data() + s.size())
        return d;
    return std::string(s); // bare word: tolerated as text on input
}

inline std::string serialize_tuple(const StreamTuple& t) {
    std::string out = format_double(t.timestamp);
    out += ',';
    bool first = true;
    for (const auto& [name, value] : t.attributes) {
        if (name.empty()) throw ValidationError("empty attribute name");
        detail::check_plain_text(name, "attribute name");
        if (!first) out += ';';
        first = false;
        out += name;
        out += '=';
        out += serialize_value(value);
    }
    return out;
}

inline StreamTuple parse_tuple(std::string_view line) {
    std::size_t comma = line.find(',');
    if (comma == std::string_view::npos)
        throw ParseError("tuple line is missing the timestamp separator: " + std::string(line));
    std::string_view ts = line.substr(0, comma);
    StreamTuple t;
    if (auto [p, ec] = std::from_chars(ts.data(), ts.data() + ts.size(), t.timestamp);
        ec != std::errc() || p != ts.data() + ts.size())
        throw ParseError("bad tuple timestamp: " + std::string(ts));
    std::string_view rest = line.substr(comma + 1);
    while (!rest.empty()) {
        std::size_t semi = rest.find(';');
        std::string_view field = rest.substr(0, semi);
        rest = semi == std::string_view::npos ? std::string_view{} : rest.substr(semi + 1);
        std::size_t eq = field.find('=');
        if (eq == std::string_view::npos || eq == 0)
            throw ParseError("bad attribute field: " + std::string(field));
        t.attributes[std::string(field.substr(0, eq))] = parse_value(field.substr(eq + 1));
    }
    return t;
}

// ---------------------------------------------------------------------------
// Windows

enum class WindowKind { tumbling, sliding, landmark };

struct WindowSpec {
    WindowKind kind = WindowKind::sliding;
    double width_s = 0.0;  // tumbling/sliding
    double slide_s = 0.0;  // sliding
    double origin = 0.0;   // landmark start / tumbling alignment

    friend bool operator==(const WindowSpec&, const WindowSpec&) = default;
};

struct TimeInterval {
    double begin = 0.0;
    double end = 0.0;
    bool end_inclusive = true;

    bool contains(double ts) const {
        return ts >= begin && (ts < end || (end_inclusive && ts == end));
    }

    friend bool operator==(const TimeInterval&, const TimeInterval&) = default;
};

// Concrete bounds of the window at evaluation time `now`. Tumbling windows
// are half-open aligned slots; the most recently completed one is returned.
inline TimeInterval window_bounds(const WindowSpec& spec, double now) {
    switch (spec.kind) {
        case WindowKind::sliding:
            if (spec.width_s <= 0) throw ValidationError("sliding window width must be > 0");
            return {now - spec.width_s, now, true};
        case WindowKind::landmark:
            if (now < spec.origin)
                throw WindowError("landmark window: now precedes the origin");
            return {spec.origin, now, true};
        case WindowKind::tumbling: {
            if (spec.width_s <= 0) throw ValidationError("tumbling window width must be > 0");
            double slots = std::floor((now - spec.origin) / spec.width_s);
            if (slots < 1.0)
                throw WindowError("tumbling window: no completed window before now");
            double begin = spec.origin + (slots - 1.0) * spec.width_s;
            return {begin, begin + spec.width_s, false};
        }
    }
    throw ValidationError("unknown window kind");
}

// ---------------------------------------------------------------------------
// Aggregation

enum class AggregateKind { min, max, mean, count };

inline std::string aggregate_name(AggregateKind k) {
    switch (k) {
        case AggregateKind::min: return "min";
        case AggregateKind::max: return "max";
        case AggregateKind::mean: return "mean";
        case AggregateKind::count: return "count";
    }
    throw ValidationError("unknown aggregate kind");
}

inline AggregateKind parse_aggregate(std::string_view name) {
    if (name == "min") return AggregateKind::min;
    if (name == "max") return AggregateKind::max;
    if (name == "mean") return AggregateKind::mean;
    if (name == "count") return AggregateKind::count;
    throw ParseError("unknown aggregate: " + std::string(name));
}

namespace detail {

inline double numeric_attribute(const StreamTuple& t, const std::string& attribute) {
    auto it = t.attributes.find(attribute);
    if (it == t.attributes.end())
        throw ValidationError("tuple is missing attribute '" + attribute + "'");
    if (const auto* i = std::get_if<long long>(&it->second)) return static_cast<double>(*i);
    if (const auto* d = std::get_if<double>(&it->second)) return *d;
    throw ValidationError("attribute '" + attribute + "' is not numeric");
}

} // namespace detail

// Empty input means "no data in the window" for min/max/mean -> nullopt;
// count of an empty window is 0. The mean sums values in ascending numeric
// order, which makes the result independent of tuple arrival order.
inline std::optional<double> aggregate(const std::vector<StreamTuple>& tuples,
                                       const std::string& attribute, AggregateKind kind) {
    if (kind == AggregateKind::count) return static_cast<double>(tuples.size());
    if (tuples.empty()) return std::nullopt;
    std::vector<double> values;
    values.reserve(tuples.size());
    for (const StreamTuple& t : tuples) values.push_back(detail::numeric_attribute(t, attribute));
    if (kind == AggregateKind::min) return *std::min_element(values.begin(), values.end());
    if (kind == AggregateKind::max) return *std::max_element(values.begin(), values.end());
    std::sort(values.begin(), values.end());
    double acc = 0.0;
    for (double v : values) acc += v;
    return acc / static_cast<double>(values.size());
}

// Deterministic processing order for tuple sets: ascending timestamp, ties
// broken by the serialized text form.
inline void canonical_sort(std::vector<StreamTuple>& rows) {
    std::vector<std::pair<std::string, StreamTuple>> keyed;
    keyed.reserve(rows.size());
    for (StreamTuple& t : rows) {
        std::string key = serialize_tuple(t);
        keyed.emplace_back(std::move(key), std::move(t));
    }
    std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
        if (a.second.timestamp != b.second.timestamp)
            return a.second.timestamp < b.second.timestamp;
        return a.first < b.first;
    });
    for (std::size_t i = 0; i < keyed.size(); ++i) rows[i] = std::move(keyed[i].second);
}

// ---------------------------------------------------------------------------
// Historic store: append-only, time-ordered, optionally file-backed.
// Concurrency: many readers, one appender.

class HistoricStore {
public:
    explicit HistoricStore(std::string name) : name_(std::move(name)) {}

    // File-backed store: loads any existing log, appends to it afterwards.
    HistoricStore(std::string name, std::filesystem::path path)
        : name_(std::move(name)), path_(std::move(path)) {
        if (std::filesystem::exists(path_)) load();
        file_.open(path_, std::ios::app);
        if (!file_) throw IoError("cannot open store file: " + path_.string());
    }

    HistoricStore(const HistoricStore&) = delete;
    HistoricStore& operator=(const HistoricStore&) = delete;

    const std::string& name() const { return name_; }

    void append(const StreamTuple& t) {
        std::unique_lock lock(mutex_);
        if (!tuples_.empty() && t.timestamp < tuples_.back().timestamp)
            throw ValidationError("store append would break time order: " +
                                  format_double(t.timestamp) + " after " +
                                  format_double(tuples_.back().timestamp));
        std::string line = serialize_tuple(t); // validates before any state changes
        tuples_.push_back(t);
        if (file_.is_open()) {
            file_ << line << '\n';
            file_.flush();
            if (!file_) throw IoError("store append failed: " + path_.string());
        }
    }

    // One-shot range query; binary search keeps it from touching
    // out-of-range data.
    std::vector<StreamTuple> range_query(const TimeInterval& bounds) const {
        std::shared_lock lock(mutex_);
        auto lo = std::lower_bound(tuples_.begin(), tuples_.end(), bounds.begin,
                                   [](const StreamTuple& t, double ts) { return t.timestamp < ts; });
        std::vector<StreamTuple> out;
        for (auto it = lo; it != tuples_.end(); ++it) {
            if (!bounds.contains(it->timestamp)) break;
            out.push_back(*it);
        }
        return out;
    }

    std::size_t size() const {
        std::shared_lock lock(mutex_);
        return tuples_.size();
    }

    std::vector<StreamTuple> all() const {
        std::shared_lock lock(mutex_);
        return tuples_;
    }

private:
    void load() {
        std::ifstream in(path_);
        if (!in) throw IoError("cannot read store file: " + path_.string());
        std::string line;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            StreamTuple t;
            try {
                t = parse_tuple(line);
            } catch (const ParseError& e) {
                throw ParseError(path_.string() + ":" + std::to_string(line_no) + ": " + e.what());
            }
            if (!tuples_.empty() && t.timestamp < tuples_.back().timestamp)
                throw ParseError(path_.string() + ":" + std::to_string(line_no) +
                                 ": timestamps must be non-decreasing");
            tuples_.push_back(std::move(t));
        }
    }

    std::string name_;
    std::filesystem::path path_;
    std::ofstream file_;
    mutable std::shared_mutex mutex_;
    std::vector<StreamTuple> tuples_;
};

// ---------------------------------------------------------------------------
// Bounded buffer with spill-to-store: holds the newest `capacity` tuples;
// overflow pushes the oldest into the store, so nothing is ever dropped.
// Concurrency: one producer and one evaluator may run concurrently.

class BoundedBuffer {
public:
    BoundedBuffer(std::size_t capacity, HistoricStore* spill_target)
        : capacity_(capacity), spill_(spill_target) {
        if (capacity_ == 0) throw ValidationError("buffer capacity must be >= 1");
    }

    void push(StreamTuple t) {
        std::lock_guard lock(mutex_);
        if (seen_any_ && t.timestamp < last_ts_)
            throw ValidationError("out-of-order tuple pushed to buffer: " +
                                  format_double(t.timestamp));
        last_ts_ = t.timestamp;
        seen_any_ = true;
        contents_.push_back(std::move(t));
        while (contents_.size() > capacity_) {
            if (!spill_) throw ValidationError("buffer overflow with no spill store");
            spill_->append(contents_.front());
            contents_.pop_front();
        }
    }

    std::vector<StreamTuple> snapshot_range(const TimeInterval& bounds) const {
        std::lock_guard lock(mutex_);
        std::vector<StreamTuple> out;
        for (const StreamTuple& t : contents_)
            if (bounds.contains(t.timestamp)) out.push_back(t);
        return out;
    }

    std::vector<StreamTuple> snapshot() const {
        std::lock_guard lock(mutex_);
        return {contents_.begin(), contents_.end()};
    }

    std::size_t size() const {
        std::lock_guard lock(mutex_);
        return contents_.size();
    }

    std::size_t capacity() const { return capacity_; }

private:
    std::size_t capacity_;
    HistoricStore* spill_;
    mutable std::mutex mutex_;
    std::deque<StreamTuple> contents_;
    double last_ts_ = 0.0;
    bool seen_any_ = false;
};

inline void buffer_push(BoundedBuffer& buffer, StreamTuple t) { buffer.push(std::move(t)); }

// Reads a store log into an existing (typically in-memory) store without
// keeping the file open, so read-only inputs stay untouched.
inline void load_store_file(HistoricStore& store, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read store file: " + path.string());
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            store.append(parse_tuple(line));
        } catch (const IoError&) {
            throw;
        } catch (const std::runtime_error& e) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
}

// ---------------------------------------------------------------------------
// Continuous queries

struct ContinuousQuery {
    double period_s = 0.0;
    AggregateKind aggregate = AggregateKind::count;
    std::string attribute;
    WindowSpec window;
    double starting_ago_s = 0.0; // landmark: offset behind registration time
    std::string historic_source;
    std::string live_source;

    friend bool operator==(const ContinuousQuery&, const ContinuousQuery&) = default;
};

// Landmark origins are fixed once, when the query is registered; later
// evaluations keep the same origin.
inline void anchor_query(ContinuousQuery& query, double registration_now) {
    if (query.window.kind == WindowKind::landmark)
        query.window.origin = registration_now - query.starting_ago_s;
}

// One evaluation tick: one-shot range query on the store, merged with the
// in-range live tuples (exact duplicates collapse), then aggregated.
// nullopt propagates the empty-window signal of min/max/mean.
inline std::optional<StreamTuple> evaluate(const ContinuousQuery& query,
                                           const HistoricStore& store,
                                           const BoundedBuffer& live, double now) {
    TimeInterval bounds = window_bounds(query.window, now);
    // Read the live side first: a tuple spilled mid-evaluation then shows up
    // in both snapshots (and collapses below) instead of in neither.
    std::vector<StreamTuple> rows = live.snapshot_range(bounds);
    std::vector<StreamTuple> aged = store.range_query(bounds);
    rows.insert(rows.end(), std::make_move_iterator(aged.begin()),
                std::make_move_iterator(aged.end()));
    canonical_sort(rows);
    rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
    std::optional<double> value = aggregate(rows, query.attribute, query.aggregate);
    if (!value) return std::nullopt;
    StreamTuple out;
    out.timestamp = now;
    if (query.aggregate == AggregateKind::count)
        out.attributes["value"] = static_cast<long long>(*value);
    else
        out.attributes["value"] = *value;
    return out;
}

// ---------------------------------------------------------------------------
// Synthetic stand-in for a network-measurement feed: tuples with
// download_speed / upload_speed attributes at a fixed cadence. Values are
// derived from raw engine words so runs are reproducible everywhere.

inline std::vector<StreamTuple> synthetic_speed_stream(int count, double start_ts, double step_s,
                                                       std::uint32_t seed) {
    if (count < 0) throw ValidationError("stream length must be >= 0");
    std::mt19937 rng(seed);
    std::vector<StreamTuple> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        StreamTuple t;
        t.timestamp = start_ts + i * step_s;
        t.attributes["download_speed"] = 1.0 + static_cast<double>(rng() % 9500u) / 100.0;
        t.attributes["upload_speed"] = 0.5 + static_cast<double>(rng() % 2000u) / 100.0;
        out.push_back(std::move(t));
    }
    return out;
}

} // namespace tiersim
