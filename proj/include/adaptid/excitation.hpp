#pragma once

#include <vector>

namespace adaptid {

/// Sum of sinusoids u(t) = sum_i amp_i sin(freq_i t + phase_i), with
/// analytic time derivatives of any order.
class Excitation {
public:
    struct Tone {
        double freq;
        double amp = 1.0;
        double phase = 0.0;
    };

    Excitation() = default;
    explicit Excitation(std::vector<Tone> tones) : tones_(std::move(tones)) {}

    /// sum_{m=1}^{n+1} sin(m omega t), the identification input.
    static Excitation multisine(int n, double omega);
    static Excitation tone(double freq, double amp = 1.0, double phase = 0.0);
    static Excitation zero() { return Excitation{}; }

    [[nodiscard]] double value(double t) const { return derivative(t, 0); }
    [[nodiscard]] double derivative(double t, int order) const;
    [[nodiscard]] const std::vector<Tone>& tones() const { return tones_; }

private:
    std::vector<Tone> tones_;
};

}  // namespace adaptid
