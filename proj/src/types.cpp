#include "ctilm/types.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ctilm/csvio.hpp"
#include "ctilm/errors.hpp"

namespace ctilm {

const char* framework_name(Framework f) { return f == Framework::SIR ? "SIR" : "SINR"; }

void EventHistory::sort_and_validate() {
    std::sort(records.begin(), records.end(), [](const Record& a, const Record& b) {
        if (a.infection_time != b.infection_time) return a.infection_time < b.infection_time;
        return a.id < b.id;
    });

    const int n = static_cast<int>(records.size());
    if (n == 0) throw Error(ErrorCode::InconsistentDimensions, "empty event history");

    std::vector<char> seen(static_cast<std::size_t>(n) + 1, 0);
    m_ = 0;
    t_obs_ = -kInfinity;
    for (const Record& r : records) {
        if (r.id < 1 || r.id > n)
            throw Error(ErrorCode::InconsistentDimensions,
                        "individual ids must form a permutation of 1..n");
        if (seen[r.id]) throw Error(ErrorCode::DuplicateId, "duplicate id " + std::to_string(r.id));
        seen[r.id] = 1;

        if (r.infected()) {
            ++m_;
            if (std::isnan(r.infection_time) || std::isnan(r.removal_time) || std::isnan(r.notify_time))
                throw Error(ErrorCode::OrderingViolation, "NaN event time");
            if (!(r.removal_time < kInfinity))
                throw Error(ErrorCode::OrderingViolation,
                            "infected individual " + std::to_string(r.id) + " has no removal time");
            if (framework == Framework::SINR) {
                if (!(r.notify_time < kInfinity))
                    throw Error(ErrorCode::OrderingViolation,
                                "infected individual " + std::to_string(r.id) + " has no notification time");
                if (r.notify_time < r.infection_time || r.removal_time < r.notify_time)
                    throw Error(ErrorCode::OrderingViolation,
                                "times of individual " + std::to_string(r.id) + " violate I <= N <= R");
            } else if (r.removal_time < r.infection_time) {
                throw Error(ErrorCode::OrderingViolation,
                            "times of individual " + std::to_string(r.id) + " violate I <= R");
            }
            t_obs_ = std::max(t_obs_, r.removal_time);
        } else {
            if (r.removal_time < kInfinity || r.notify_time < kInfinity)
                throw Error(ErrorCode::OrderingViolation,
                            "uninfected individual " + std::to_string(r.id) + " has finite event times");
        }
    }
}

const Record& EventHistory::record_of(int id) const {
    for (const Record& r : records)
        if (r.id == id) return r;
    throw Error(ErrorCode::InconsistentDimensions, "unknown id " + std::to_string(id));
}

EventHistory build_event_history(Framework framework, const std::vector<int>& ids,
                                 const std::vector<double>& infection_times,
                                 const std::vector<double>& removal_times,
                                 const std::vector<double>& notify_times) {
    const std::size_t n = ids.size();
    if (infection_times.size() != n || removal_times.size() != n)
        throw Error(ErrorCode::InconsistentDimensions, "event-time vectors have unequal lengths");
    if (framework == Framework::SINR && notify_times.size() != n)
        throw Error(ErrorCode::InconsistentDimensions, "SINR requires notification times for all individuals");
    if (framework == Framework::SIR && !notify_times.empty() && notify_times.size() != n)
        throw Error(ErrorCode::InconsistentDimensions, "notification-time vector has wrong length");

    EventHistory h;
    h.framework = framework;
    h.records.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        Record& r = h.records[k];
        r.id = ids[k];
        r.infection_time = infection_times[k];
        r.removal_time = removal_times[k];
        if (framework == Framework::SINR) r.notify_time = notify_times[k];
    }
    h.sort_and_validate();
    return h;
}

EpidemicStats epidemic_statistics(const EventHistory& history) {
    const int m = history.infected_count();
    if (m == 0) throw Error(ErrorCode::NoInfected, "history contains no infected individuals");
    EpidemicStats s;
    s.infected = m;
    double sum = 0.0;
    double min_inf = kInfinity;
    double max_rem = -kInfinity;
    for (int k = 0; k < m; ++k) {
        const Record& r = history.records[static_cast<std::size_t>(k)];
        sum += r.removal_time;
        min_inf = std::min(min_inf, r.infection_time);
        max_rem = std::max(max_rem, r.removal_time);
    }
    s.mean_removal = sum / m;
    if (m > 1) {
        double ss = 0.0;
        for (int k = 0; k < m; ++k) {
            const double d = history.records[static_cast<std::size_t>(k)].removal_time - s.mean_removal;
            ss += d * d;
        }
        s.var_removal = ss / (m - 1);
    }
    s.length = max_rem - min_inf;
    return s;
}

std::string event_history_to_csv(const EventHistory& history) {
    std::ostringstream out;
    if (history.framework == Framework::SIR) {
        out << "id,rem.time,inf.period,inf.time\n";
        for (const Record& r : history.records) {
            const double period = r.infected() ? r.removal_time - r.infection_time : 0.0;
            out << r.id << ',' << format_double(r.removal_time) << ',' << format_double(period)
                << ',' << format_double(r.infection_time) << '\n';
        }
    } else {
        out << "id,rem.time,delay.period,not.time,inc.period,inf.time\n";
        for (const Record& r : history.records) {
            const double delay = r.infected() ? r.removal_time - r.notify_time : 0.0;
            const double inc = r.infected() ? r.notify_time - r.infection_time : 0.0;
            out << r.id << ',' << format_double(r.removal_time) << ',' << format_double(delay)
                << ',' << format_double(r.notify_time) << ',' << format_double(inc) << ','
                << format_double(r.infection_time) << '\n';
        }
    }
    return out.str();
}

EventHistory event_history_from_csv_text(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorCode::Io, "empty event-history file");
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();

    Framework framework;
    if (line == "id,rem.time,inf.period,inf.time") {
        framework = Framework::SIR;
    } else if (line == "id,rem.time,delay.period,not.time,inc.period,inf.time") {
        framework = Framework::SINR;
    } else {
        throw Error(ErrorCode::Io, "unrecognized event-history header '" + line + "'");
    }

    std::vector<int> ids;
    std::vector<double> inf, rem, notif;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        const auto fields = split_csv_line(line);
        const std::size_t expected = framework == Framework::SIR ? 4u : 6u;
        if (fields.size() != expected)
            throw Error(ErrorCode::Io, "event-history row has wrong field count");
        const double id_raw = parse_double(fields[0]);
        ids.push_back(static_cast<int>(id_raw));
        rem.push_back(parse_double(fields[1]));
        if (framework == Framework::SIR) {
            inf.push_back(parse_double(fields[3]));
        } else {
            notif.push_back(parse_double(fields[3]));
            inf.push_back(parse_double(fields[5]));
        }
        // period columns are redundant with the stored times; check consistency
        auto check_period = [&](double period, double derived) {
            if (std::isfinite(period) && std::isfinite(derived) &&
                std::abs(derived - period) > 1e-6 * (1.0 + std::abs(derived)))
                throw Error(ErrorCode::OrderingViolation,
                            "period column inconsistent with event times for id " + fields[0]);
        };
        if (framework == Framework::SIR) {
            check_period(parse_double(fields[2]), rem.back() - inf.back());
        } else {
            check_period(parse_double(fields[2]), rem.back() - notif.back());
            check_period(parse_double(fields[4]), notif.back() - inf.back());
        }
    }
    return build_event_history(framework, ids, inf, rem, notif);
}

void write_event_history(const std::string& path, const EventHistory& history) {
    write_text_file(path, event_history_to_csv(history));
}

EventHistory read_event_history(const std::string& path) {
    return event_history_from_csv_text(read_text_file(path));
}

} // namespace ctilm
