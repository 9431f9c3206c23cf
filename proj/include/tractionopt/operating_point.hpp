#pragma once

namespace tractionopt {

/// Motor torque-speed point. `weight_s` is the time the cycle spends at the
/// point; envelope points carry 1.
struct OperatingPoint {
    double speed_rpm = 0.0;
    double torque = 0.0;  // Nm, negative when generating
    double weight_s = 1.0;
};

}  // namespace tractionopt
