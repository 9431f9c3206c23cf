#pragma once

#include <cmath>

namespace tractionopt {

/// Ideal sinusoidal phase current `amplitude * cos(omega * t + phase)`.
struct PhaseCurrent {
    double amplitude = 0.0;  // A
    double omega = 0.0;      // rad/s
    double phase = 0.0;      // rad

    [[nodiscard]] double at(double t) const { return amplitude * std::cos(omega * t + phase); }

    /// Exact integral of i(t)^2 over [begin, end].
    [[nodiscard]] double square_integral(double begin, double end) const
    {
        const double a2 = amplitude * amplitude;
        if (omega == 0.0) {
            const double c = std::cos(phase);
            return a2 * c * c * (end - begin);
        }
        const double s = std::sin(2.0 * (omega * end + phase)) - std::sin(2.0 * (omega * begin + phase));
        return 0.5 * a2 * ((end - begin) + s / (2.0 * omega));
    }
};

struct Interval {
    double begin = 0.0;
    double end = 0.0;
};

/// One gate transition. Soft transitions carry zero switched voltage.
struct SwitchingEvent {
    double time = 0.0;
    double voltage = 0.0;  // V, switched voltage
    double current = 0.0;  // A, magnitude of the commutated current
    bool turn_on = false;
};

}  // namespace tractionopt
