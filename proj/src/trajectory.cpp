#include "qtraj/trajectory.hpp"

#include "qtraj/csv.hpp"

#include <ostream>

namespace qtraj {

std::int64_t TrajectoryRecord::count_at(double tau) const {
    return std::upper_bound(jump_times.begin(), jump_times.end(), tau) - jump_times.begin();
}

void TrajectoryRecord::write_csv(std::ostream& out) const {
    out << "tau,m,photon_expectation\n";
    for (const auto& s : steps) {
        out << format_double(s.tau) << ',' << s.m << ',' << format_double(s.photon_expectation)
            << '\n';
    }
}

void StepControl::validate() const {
    if (!(tau_max >= 0.0)) throw ValidationError("step control: tau_max must be >= 0");
    if (!(dtau > 0.0)) throw ValidationError("step control: dtau must be > 0");
    if (!(max_step_probability > 0.0 && max_step_probability < 1.0))
        throw ValidationError("step control: max_step_probability must lie in (0, 1)");
    if (snapshot_every < 0) throw ValidationError("step control: snapshot_every must be >= 0");
    if (record_every < 1) throw ValidationError("step control: record_every must be >= 1");
}

}  // namespace qtraj
