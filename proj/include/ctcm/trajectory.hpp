#ifndef CTCM_TRAJECTORY_HPP
#define CTCM_TRAJECTORY_HPP

#include <vector>

#include "ctcm/model.hpp"

namespace ctcm {

// Piecewise-constant path: states[k] holds on [times[k], times[k+1]) and the
// last state holds through the horizon (paths are right-continuous).
// times[0] is always 0 and carries the initial state.
struct Trajectory {
    double horizon = 0.0;
    std::vector<double> times;
    std::vector<State> states;

    std::size_t jump_count() const { return times.empty() ? 0 : times.size() - 1; }
};

// Value of the path at time t in [0, horizon]; throws std::out_of_range
// outside that interval.
const State& state_at(const Trajectory& traj, double t);

} // namespace ctcm

#endif
