#include "adaptid/excitation.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace adaptid {

Excitation Excitation::multisine(int n, double omega) {
    if (n < 0 || !(omega > 0.0)) {
        throw std::invalid_argument("Excitation::multisine: need n >= 0 and omega > 0");
    }
    std::vector<Tone> tones;
    tones.reserve(static_cast<std::size_t>(n + 1));
    for (int m = 1; m <= n + 1; ++m) {
        tones.push_back({m * omega, 1.0, 0.0});
    }
    return Excitation(std::move(tones));
}

Excitation Excitation::tone(double freq, double amp, double phase) { return Excitation({{freq, amp, phase}}); }

double Excitation::derivative(double t, int order) const {
    if (order < 0) {
        throw std::invalid_argument("Excitation::derivative: order must be >= 0");
    }
    // d^k/dt^k sin(w t + phi) = w^k sin(w t + phi + k pi/2)
    const double shift = order * std::numbers::pi / 2.0;
    double sum = 0.0;
    for (const auto& tone : tones_) {
        sum += tone.amp * std::pow(tone.freq, order) * std::sin(tone.freq * t + tone.phase + shift);
    }
    return sum;
}

}  // namespace adaptid
