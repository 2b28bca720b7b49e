#include "uavnav/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "uavnav/rng.hpp"

namespace uavnav::channel {

void ChannelParams::validate() const {
    if (!std::isfinite(tx_power_dbm)) {
        throw std::invalid_argument("ChannelParams: tx_power_dbm must be finite");
    }
    if (!(carrier_hz > 0.0) || !std::isfinite(carrier_hz)) {
        throw std::invalid_argument("ChannelParams: carrier_hz must be positive and finite");
    }
}

double path_loss_db(double distance_m) {
    if (!std::isfinite(distance_m) || distance_m <= 0.0) {
        throw std::domain_error("path_loss_db: distance must be positive and finite");
    }
    const double d = std::max(distance_m, kMinPathDistanceM);
    return 128.1 + 37.6 * std::log10(d / 1000.0);
}

FadingProcess::FadingProcess(double doppler_hz, int num_sinusoids, std::uint64_t seed)
    : doppler_hz_(doppler_hz), seed_(seed) {
    if (!(doppler_hz >= 0.0) || !std::isfinite(doppler_hz)) {
        throw std::domain_error("FadingProcess: doppler_hz must be >= 0 and finite");
    }
    if (num_sinusoids < kMinNumSinusoids) {
        throw std::invalid_argument("FadingProcess: num_sinusoids must be >= 8");
    }
    omega_.resize(num_sinusoids);
    phase_.resize(num_sinusoids);
    Rng rng(seed);
    const double two_pi = 2.0 * std::numbers::pi;
    for (int n = 0; n < num_sinusoids; ++n) {
        const double arrival = two_pi * rng.u01();
        omega_[n] = two_pi * doppler_hz * std::cos(arrival);
        phase_[n] = two_pi * rng.u01();
    }
}

FadingProcess FadingProcess::unit() {
    FadingProcess p;
    p.unit_ = true;
    return p;
}

double FadingProcess::envelope2(double time_s) const {
    if (!std::isfinite(time_s)) {
        throw std::domain_error("FadingProcess: time must be finite");
    }
    if (unit_) {
        return 1.0;
    }
    double re = 0.0;
    double im = 0.0;
    const std::size_t n = omega_.size();
    for (std::size_t k = 0; k < n; ++k) {
        const double arg = omega_[k] * time_s + phase_[k];
        re += std::cos(arg);
        im += std::sin(arg);
    }
    return (re * re + im * im) / static_cast<double>(n);
}

double FadingProcess::gain_db(double time_s) const {
    return 10.0 * std::log10(envelope2(time_s));
}

FadingProcess::Sampler::Sampler(const FadingProcess& process, double t0_s, double dt_s) {
    unit_ = process.unit_;
    if (unit_) {
        return;
    }
    const std::size_t n = process.omega_.size();
    re_.resize(n);
    im_.resize(n);
    step_re_.resize(n);
    step_im_.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double arg = process.omega_[k] * t0_s + process.phase_[k];
        re_[k] = std::cos(arg);
        im_[k] = std::sin(arg);
        step_re_[k] = std::cos(process.omega_[k] * dt_s);
        step_im_[k] = std::sin(process.omega_[k] * dt_s);
    }
    inv_n_ = 1.0 / static_cast<double>(n);
}

double FadingProcess::Sampler::next_envelope2() {
    if (unit_) {
        return 1.0;
    }
    double sum_re = 0.0;
    double sum_im = 0.0;
    const std::size_t n = re_.size();
    for (std::size_t k = 0; k < n; ++k) {
        const double re = re_[k];
        const double im = im_[k];
        sum_re += re;
        sum_im += im;
        re_[k] = re * step_re_[k] - im * step_im_[k];
        im_[k] = re * step_im_[k] + im * step_re_[k];
    }
    return (sum_re * sum_re + sum_im * sum_im) * inv_n_;
}

FadingProcess create_fading(double velocity_mps, const ChannelParams& params, std::uint64_t seed) {
    if (!(velocity_mps >= 0.0) || !std::isfinite(velocity_mps)) {
        throw std::domain_error("create_fading: velocity must be >= 0 and finite");
    }
    params.validate();
    const double doppler_hz = velocity_mps * params.carrier_hz / kSpeedOfLightMps;
    return FadingProcess(doppler_hz, FadingProcess::kDefaultNumSinusoids, seed);
}

double rss_instant(const ChannelParams& params, double distance_m,
                   const FadingProcess& process, double time_s) {
    return params.tx_power_dbm - path_loss_db(distance_m) + process.gain_db(time_s);
}

}  // namespace uavnav::channel
