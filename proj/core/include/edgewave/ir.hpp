// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace edgewave {

// Time-binned signed pressure trace with per-bin second moments. Dirac path
// contributions are assigned to the nearest bin below (floor of delay * rate).
class ImpulseResponse {
  public:
    ImpulseResponse() = default;
    ImpulseResponse(double sample_rate, double length_seconds);

    double sample_rate() const { return sample_rate_; }
    size_t bin_count() const { return sum_.size(); }
    double bin_time(size_t i) const { return static_cast<double>(i) / sample_rate_; }

    // Adds one signed path amplitude at the given delay. Out-of-range delays
    // are dropped and counted.
    void accumulate(double amplitude, double delay_seconds);

    void set_sample_count(uint64_t n) { samples_ = n; }
    uint64_t sample_count() const { return samples_; }
    uint64_t dropped() const { return dropped_; }

    // Per-bin mean contribution (bin sum / sample count).
    double pressure(size_t i) const;
    // Standard error of the per-bin mean across the declared sample count.
    double standard_error(size_t i) const;
    double bin_sum(size_t i) const { return sum_[i]; }
    double bin_sum_sq(size_t i) const { return sum_sq_[i]; }

    // Pure fold; both sides must share rate and length.
    void merge(const ImpulseResponse& other);

    std::vector<double> pressures() const;

    std::string to_csv() const;  // header: time,pressure,variance (time in ms)
    void write_csv(const std::string& path) const;
    void write_wav(const std::string& path) const;  // peak-normalized 16-bit PCM

  private:
    double sample_rate_ = 48000.0;
    std::vector<double> sum_;
    std::vector<double> sum_sq_;
    uint64_t samples_ = 0;
    uint64_t dropped_ = 0;
};

// In-place radix-2 FFT (input zero-padded to a power of two).
std::vector<std::complex<double>> spectrum(const std::vector<double>& signal);

struct SnrResult {
    double band_average_db = 0.0;
    size_t bins_used = 0;
    size_t bins_excluded = 0;  // zero error-magnitude bins
};

// 10 log10(|F(f)| / |F(f_e)|) averaged over bins whose frequency lies in
// [20, 20000] Hz.
SnrResult snr(const std::vector<double>& ir_mean, const std::vector<double>& ir_error,
              double sample_rate);

// Protocol of the quality metric: mean of K independent IRs is the reference,
// per-IR deviation the error; returns the average band SNR over the K runs.
double snr_protocol(const std::vector<std::vector<double>>& irs, double sample_rate);

}  // namespace edgewave
