#include "predmm/event_log.hpp"

#include <sstream>

namespace predmm {

MalformedLog::MalformedLog(std::size_t line, const std::string& what)
    : std::runtime_error("malformed event log at line " + std::to_string(line) + ": " + what), line_(line) {}

nlohmann::json TradeEvent::to_json() const {
    return {{"seq", seq}, {"ts_ms", ts_ms}, {"session", session}, {"kind", kind}, {"payload", payload}};
}

TradeEvent TradeEvent::from_json(const nlohmann::json& j) {
    TradeEvent e;
    e.seq = j.at("seq").get<std::uint64_t>();
    e.ts_ms = j.at("ts_ms").get<std::int64_t>();
    e.session = j.at("session").get<std::string>();
    e.kind = j.at("kind").get<std::string>();
    e.payload = j.at("payload");
    return e;
}

EventLog::EventLog(std::string session) : session_(std::move(session)) {}

EventLog::EventLog(std::string session, const std::filesystem::path& file) : session_(std::move(session)) {
    if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
    sink_ = std::make_unique<std::ofstream>(file, std::ios::app);
    if (!*sink_) throw std::runtime_error("cannot open event log " + file.string());
}

void EventLog::attach_file(const std::filesystem::path& file, std::size_t already_written) {
    if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
    sink_ = std::make_unique<std::ofstream>(file, std::ios::app);
    if (!*sink_) throw std::runtime_error("cannot open event log " + file.string());
    for (std::size_t i = already_written; i < events_.size(); ++i) *sink_ << to_line(events_[i]) << '\n';
    sink_->flush();
}

const TradeEvent& EventLog::append(std::int64_t ts_ms, std::string kind, nlohmann::json payload) {
    TradeEvent e;
    e.seq = events_.empty() ? 1 : events_.back().seq + 1;
    e.ts_ms = std::max(ts_ms, last_ts());
    e.session = session_;
    e.kind = std::move(kind);
    e.payload = std::move(payload);
    events_.push_back(std::move(e));
    const auto& stored = events_.back();
    if (sink_) {
        *sink_ << to_line(stored) << '\n';
        sink_->flush();
    }
    if (listener_) listener_(stored);
    return stored;
}

std::string to_line(const TradeEvent& event) { return event.to_json().dump(); }

std::vector<TradeEvent> read_log(std::istream& in) {
    std::vector<TradeEvent> events;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        TradeEvent e;
        try {
            e = TradeEvent::from_json(nlohmann::json::parse(line));
        } catch (const nlohmann::json::exception& ex) {
            throw MalformedLog(line_no, ex.what());
        }
        if (!events.empty() && e.seq <= events.back().seq)
            throw MalformedLog(line_no, "sequence number does not increase");
        if (!events.empty() && e.ts_ms < events.back().ts_ms)
            throw MalformedLog(line_no, "timestamp goes backwards");
        events.push_back(std::move(e));
    }
    return events;
}

std::vector<TradeEvent> read_log(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open event log " + path.string());
    return read_log(in);
}

void write_log(std::ostream& out, const std::vector<TradeEvent>& events) {
    for (const auto& e : events) out << to_line(e) << '\n';
}

}  // namespace predmm
