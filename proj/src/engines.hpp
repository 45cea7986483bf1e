#ifndef CTCM_SRC_ENGINES_HPP
#define CTCM_SRC_ENGINES_HPP

// Engine cores shared by the path-recording and streaming-summary drivers.
// Observer protocol:
//   obs.hold(state, t0, t1, final)  constancy interval [t0, t1); the final
//                                   interval is closed at the end time
//   obs.jump(t, state)              called after the state update at time t
// Both engines return the effective end time (== horizon unless a jump cap
// cut the run short).

#include <cmath>
#include <cstdint>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "ctcm/model.hpp"
#include "ctcm/simulate.hpp"

namespace ctcm::detail {

class JumpAuditor {
  public:
    JumpAuditor(const ModelParams& p, const SimOptions& opt)
        : enabled_(opt.audit), tol_(opt.audit_tol), radius_(p.eta_radius),
          acc_(static_cast<std::size_t>(p.dim)) {}

    void reset(const State& s) {
        if (enabled_) g_cur_ = max_position_norm(s);
    }

    void after_jump(const State& s, std::uint64_t jump_index) {
        if (!enabled_) return;
        const int n = s.n(), d = s.dim();
        double g = 0.0;
        for (int j = 0; j < d; ++j) acc_[j] = 0.0;
        const double* v = s.positions.data();
        for (int i = 0; i < n; ++i, v += d) {
            if (s.attached[i]) {
                for (int j = 0; j < d; ++j) {
                    g = std::max(g, std::abs(v[j]));
                    acc_[j] += v[j] - s.centroid[j];
                }
            } else {
                for (int j = 0; j < d; ++j) g = std::max(g, std::abs(v[j]));
            }
        }
        double resid = 0.0;
        for (int j = 0; j < d; ++j) {
            g = std::max(g, std::abs(s.centroid[j]));
            resid = std::max(resid, std::abs(acc_[j]));
        }
        const double slack = tol_ * std::max(1.0, g);
        if (g > g_cur_ + radius_ + slack) fail("movement bound", g - g_cur_, jump_index);
        if (resid > slack) fail("centroid consistency", resid, jump_index);
        g_cur_ = g;
    }

  private:
    [[noreturn]] static void fail(const char* what, double value, std::uint64_t jump_index) {
        std::ostringstream msg;
        msg << "engine audit: " << what << " violated at jump " << jump_index
            << " (value " << value << ")";
        throw std::runtime_error(msg.str());
    }

    bool enabled_;
    double tol_;
    double radius_;
    double g_cur_ = 0.0;
    std::vector<double> acc_;
};

inline void renormalize_centroid(State& s) {
    const int n = s.n(), d = s.dim();
    int k = 0;
    std::vector<double> mean(static_cast<std::size_t>(d), 0.0);
    const double* v = s.positions.data();
    for (int i = 0; i < n; ++i, v += d) {
        if (!s.attached[i]) continue;
        ++k;
        for (int j = 0; j < d; ++j) mean[j] += v[j];
    }
    if (k == 0) return;
    for (int j = 0; j < d; ++j) s.centroid[j] = mean[j] / k;
}

template <class Observer>
double run_markov_engine(const ModelParams& p, State& s, double horizon, Rng& rng,
                         const SimOptions& opt, Observer& obs) {
    JumpAuditor audit(p, opt);
    audit.reset(s);
    std::vector<double> pert(static_cast<std::size_t>(p.dim));
    double t = 0.0;
    std::uint64_t jumps = 0;
    for (;;) {
        const int k = s.attach_count();
        const double c = p.theta_d * k + p.theta_a * (p.n - k);
        const double t_next = t + rng.exponential() / c;
        const bool capped = opt.max_jumps != 0 && jumps >= opt.max_jumps;
        if (capped || t_next >= horizon) {
            const double end = capped ? t : horizon;
            obs.hold(s, t, end, true);
            return end;
        }
        obs.hold(s, t, t_next, false);
        step_in_place(s, p, rng, pert);
        ++jumps;
        audit.after_jump(s, jumps);
        if (opt.renorm_interval != 0 && jumps % opt.renorm_interval == 0) {
            renormalize_centroid(s);
            audit.reset(s);
        }
        obs.jump(t_next, s);
        t = t_next;
    }
}

template <class Observer>
double run_semi_markov_engine(const ModelParams& p, const SemiMarkovConfig& waits, State& s,
                              double horizon, Rng& rng, const SimOptions& opt, Observer& obs) {
    JumpAuditor audit(p, opt);
    audit.reset(s);
    std::vector<double> pert(static_cast<std::size_t>(p.dim));

    using Event = std::pair<double, int>;
    std::priority_queue<Event, std::vector<Event>, std::greater<Event>> clocks;
    for (int i = 0; i < p.n; ++i) {
        const auto& w = s.attached[i] ? waits.detach_wait : waits.attach_wait;
        clocks.emplace(sample_wait(w, rng), i);
    }

    double t = 0.0;
    std::uint64_t jumps = 0;
    for (;;) {
        const auto [t_next, site] = clocks.top();
        const bool capped = opt.max_jumps != 0 && jumps >= opt.max_jumps;
        if (capped || t_next >= horizon) {
            const double end = capped ? t : horizon;
            obs.hold(s, t, end, true);
            return end;
        }
        clocks.pop();
        obs.hold(s, t, t_next, false);
        if (s.attached[site]) {
            detach_in_place(s, site);
            clocks.emplace(t_next + sample_wait(waits.attach_wait, rng), site);
        } else {
            sample_perturbation(p.eta, rng, pert);
            attach_in_place(s, site, pert);
            clocks.emplace(t_next + sample_wait(waits.detach_wait, rng), site);
        }
        ++jumps;
        audit.after_jump(s, jumps);
        if (opt.renorm_interval != 0 && jumps % opt.renorm_interval == 0) {
            renormalize_centroid(s);
            audit.reset(s);
        }
        obs.jump(t_next, s);
        t = t_next;
    }
}

struct PathRecorder {
    Trajectory traj;
    std::uint64_t limit;

    PathRecorder(const State& initial, std::uint64_t max_recorded_states) : limit(max_recorded_states) {
        traj.times.push_back(0.0);
        traj.states.push_back(initial);
    }
    void hold(const State&, double, double, bool) {}
    void jump(double t, const State& s) {
        if (traj.states.size() >= limit)
            throw std::length_error(
                "path recording exceeded max_recorded_states; use the ensemble driver");
        traj.times.push_back(t);
        traj.states.push_back(s);
    }
};

struct SummaryCollector {
    const std::vector<double>& probes;
    TrajectorySummary out;
    std::size_t next = 0;

    SummaryCollector(const std::vector<double>& probe_times, int n, int dim)
        : probes(probe_times) {
        out.probe_counts.reserve(probes.size());
        out.probe_centroids.reserve(probes.size() * static_cast<std::size_t>(dim));
        out.occupancy.assign(static_cast<std::size_t>(n) + 1, 0.0);
        out.final_centroid.assign(static_cast<std::size_t>(dim), 0.0);
    }

    void hold(const State& s, double t0, double t1, bool final_interval) {
        out.occupancy[static_cast<std::size_t>(s.attach_count())] += t1 - t0;
        while (next < probes.size() &&
               (probes[next] < t1 || (final_interval && probes[next] <= t1))) {
            out.probe_counts.push_back(s.attach_count());
            out.probe_centroids.insert(out.probe_centroids.end(), s.centroid.begin(),
                                       s.centroid.end());
            ++next;
        }
        if (final_interval) out.final_centroid = s.centroid;
    }
    void jump(double, const State&) { ++out.jump_count; }

    void finish(double end_time) {
        if (next != probes.size())
            throw std::runtime_error("ensemble run ended before reaching all probe times");
        if (end_time > 0.0)
            for (double& o : out.occupancy) o /= end_time;
    }
};

} // namespace ctcm::detail

#endif
