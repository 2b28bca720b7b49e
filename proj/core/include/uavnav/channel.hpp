#pragma once

#include <cstdint>
#include <vector>

namespace uavnav::channel {

inline constexpr double kSpeedOfLightMps = 299792458.0;

// The path-loss formula is a far-field model; distances below this floor are
// clamped before evaluation.
inline constexpr double kMinPathDistanceM = 0.1;

/// Static link parameters: source transmit power and carrier frequency.
/// The carrier is used only to derive the Doppler frequency of the fading
/// process; the path-loss law itself is frequency-independent here.
struct ChannelParams {
    double tx_power_dbm = 0.0;
    double carrier_hz = 2.4e9;

    void validate() const;  // throws std::invalid_argument on bad fields
};

/// Log-distance path loss in dB: 128.1 + 37.6*log10(d/1km).
/// Strictly increasing in distance. Throws std::domain_error for
/// non-positive or non-finite input; clamps d < kMinPathDistanceM.
double path_loss_db(double distance_m);

/// One received-signal-strength observation.
struct RssSample {
    double time_s = 0.0;
    double rss_dbm = 0.0;
};

/// Temporally correlated Rayleigh fading as a Clarke-model sum of sinusoids
/// with uniformly random arrival angles and phases:
///
///   h(t) = 1/sqrt(N) * sum_n exp(j * (2*pi*fd*cos(angle_n)*t + phase_n))
///
/// The squared envelope |h(t)|^2 has unit mean, the envelope is
/// Rayleigh(1/sqrt(2)) distributed, and the normalized autocorrelation of
/// each quadrature follows J0(2*pi*fd*tau). Evaluation is a pure function
/// of t and is safe to call concurrently.
class FadingProcess {
public:
    static constexpr int kDefaultNumSinusoids = 64;
    static constexpr int kMinNumSinusoids = 8;

    /// doppler_hz >= 0, num_sinusoids >= 8. Angles and phases are drawn once
    /// from the given seed; equal (doppler, n, seed) gives equal traces.
    FadingProcess(double doppler_hz, int num_sinusoids, std::uint64_t seed);

    /// A process whose gain is identically 0 dB (fading switched off).
    static FadingProcess unit();

    double envelope2(double time_s) const;  ///< |h(t)|^2
    double gain_db(double time_s) const;    ///< 10*log10(|h(t)|^2)

    double doppler_hz() const { return doppler_hz_; }
    int num_sinusoids() const { return static_cast<int>(omega_.size()); }
    std::uint64_t seed() const { return seed_; }
    bool is_unit() const { return unit_; }

    /// Streams |h|^2 on the uniform grid t0, t0+dt, t0+2*dt, ... using a
    /// per-sinusoid phasor rotation. One complex multiply per sinusoid per
    /// sample instead of two transcendental calls; agrees with envelope2()
    /// to rounding error. Re-seed per epoch to keep drift bounded.
    class Sampler {
    public:
        Sampler(const FadingProcess& process, double t0_s, double dt_s);
        double next_envelope2();
    private:
        std::vector<double> re_, im_, step_re_, step_im_;
        double inv_n_ = 1.0;
        bool unit_ = true;
    };

    Sampler sampler(double t0_s, double dt_s) const { return Sampler(*this, t0_s, dt_s); }

private:
    FadingProcess() = default;

    std::vector<double> omega_;  // angular Doppler of each path, 2*pi*fd*cos(angle)
    std::vector<double> phase_;
    double doppler_hz_ = 0.0;
    std::uint64_t seed_ = 0;
    bool unit_ = false;
};

/// Builds the fading process for a UAV moving at `velocity_mps`:
/// fd = v * fc / c. Throws std::domain_error for negative velocity.
FadingProcess create_fading(double velocity_mps, const ChannelParams& params, std::uint64_t seed);

/// Instantaneous RSS in dBm: tx - PL(d) + gain_db(t). The fading gain is a
/// signed dB quantity; deep fades drive it far below zero.
double rss_instant(const ChannelParams& params, double distance_m,
                   const FadingProcess& process, double time_s);

}  // namespace uavnav::channel
