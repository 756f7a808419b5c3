#pragma once

#include <limits>
#include <string>
#include <vector>

namespace ctilm {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class Framework { SIR, SINR };

const char* framework_name(Framework f);

// Gamma distribution of an infectious / incubation / delay period:
// fixed shape, rate. shape == 1 gives the exponential special case.
struct PeriodSpec {
    double shape = 1.0;
    double rate = 1.0;
};

// Per-individual transition times. Uninfected individuals carry +Inf event
// times. For SIR records notify_time is unused and stays +Inf.
struct Record {
    int id = 0; // external 1-based id; matrices are indexed by id-1
    double infection_time = kInfinity;
    double notify_time = kInfinity;
    double removal_time = kInfinity;

    bool infected() const { return infection_time < kInfinity; }
};

// Full epidemic event history. Records are kept sorted by infection time
// (ties by id), uninfected individuals last; the time-period identities
// R = I + D (SIR) and N = I + D_inc, R = N + D_delay (SINR) hold by
// construction since periods are derived from the stored times.
class EventHistory {
public:
    Framework framework = Framework::SIR;
    std::vector<Record> records;

    std::size_t size() const { return records.size(); }
    int infected_count() const { return m_; }
    double t_obs() const { return t_obs_; } // max removal time among infected

    // Sorts records and checks the invariants; throws OrderingViolation,
    // DuplicateId or InconsistentDimensions. Equal times within a record
    // (zero periods) are accepted on input; the simulator always produces
    // strictly positive periods.
    void sort_and_validate();

    const Record& record_of(int id) const; // by external id

private:
    int m_ = 0;
    double t_obs_ = -kInfinity;
};

// as.epidat role: assemble a sorted, validated history from raw vectors.
// notify_times must be supplied for SINR and omitted (empty) for SIR.
EventHistory build_event_history(Framework framework, const std::vector<int>& ids,
                                 const std::vector<double>& infection_times,
                                 const std::vector<double>& removal_times,
                                 const std::vector<double>& notify_times = {});

// Posterior-predictive summary statistics: infected count, mean and variance
// of the removal times, and epidemic length (max R - min I).
struct EpidemicStats {
    int infected = 0;
    double mean_removal = 0.0;
    double var_removal = 0.0; // sample variance, m-1 divisor; 0 for a single infected
    double length = 0.0;
};

EpidemicStats epidemic_statistics(const EventHistory& history);

// CSV serialization. SIR header: id,rem.time,inf.period,inf.time
// SINR header:           id,rem.time,delay.period,not.time,inc.period,inf.time
// Infinity is written as the literal Inf.
std::string event_history_to_csv(const EventHistory& history);
EventHistory event_history_from_csv_text(const std::string& text);
void write_event_history(const std::string& path, const EventHistory& history);
EventHistory read_event_history(const std::string& path);

} // namespace ctilm
