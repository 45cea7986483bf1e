#include "ctcm/trajectory.hpp"

#include <algorithm>
#include <stdexcept>

namespace ctcm {

const State& state_at(const Trajectory& traj, double t) {
    if (traj.times.empty()) throw std::out_of_range("state_at: empty trajectory");
    if (t < 0.0 || t > traj.horizon) throw std::out_of_range("state_at: time outside [0, horizon]");
    const auto it = std::upper_bound(traj.times.begin(), traj.times.end(), t);
    const std::size_t idx = static_cast<std::size_t>(it - traj.times.begin()) - 1;
    return traj.states[idx];
}

} // namespace ctcm
