// SPDX-License-Identifier: Apache-2.0

#include "edgewave/ir.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "edgewave/math.hpp"

namespace edgewave {

ImpulseResponse::ImpulseResponse(double sample_rate, double length_seconds)
    : sample_rate_(sample_rate) {
    size_t bins = static_cast<size_t>(std::ceil(length_seconds * sample_rate));
    sum_.assign(bins, 0.0);
    sum_sq_.assign(bins, 0.0);
}

void ImpulseResponse::accumulate(double amplitude, double delay_seconds) {
    if (delay_seconds < 0.0) {
        dropped_++;
        return;
    }
    size_t bin = static_cast<size_t>(delay_seconds * sample_rate_);
    if (bin >= sum_.size()) {
        dropped_++;
        return;
    }
    sum_[bin] += amplitude;
    sum_sq_[bin] += amplitude * amplitude;
}

double ImpulseResponse::pressure(size_t i) const {
    return samples_ ? sum_[i] / static_cast<double>(samples_) : 0.0;
}

double ImpulseResponse::standard_error(size_t i) const {
    if (samples_ < 2) return 0.0;
    double n = static_cast<double>(samples_);
    double mean = sum_[i] / n;
    double var = (sum_sq_[i] / n - mean * mean) / (n - 1.0);
    return var > 0.0 ? std::sqrt(var) : 0.0;
}

void ImpulseResponse::merge(const ImpulseResponse& other) {
    if (other.sum_.size() != sum_.size() || other.sample_rate_ != sample_rate_) {
        throw std::invalid_argument("ImpulseResponse::merge: shape mismatch");
    }
    for (size_t i = 0; i < sum_.size(); ++i) {
        sum_[i] += other.sum_[i];
        sum_sq_[i] += other.sum_sq_[i];
    }
    samples_ += other.samples_;
    dropped_ += other.dropped_;
}

std::vector<double> ImpulseResponse::pressures() const {
    std::vector<double> out(sum_.size());
    for (size_t i = 0; i < sum_.size(); ++i) out[i] = pressure(i);
    return out;
}

std::string ImpulseResponse::to_csv() const {
    std::string out = "time,pressure,variance\n";
    char line[128];
    for (size_t i = 0; i < sum_.size(); ++i) {
        double se = standard_error(i);
        std::snprintf(line, sizeof(line), "%.6f,%.17g,%.17g\n", bin_time(i) * 1e3,
                      pressure(i), se * se);
        out += line;
    }
    return out;
}

void ImpulseResponse::write_csv(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path);
    f << to_csv();
}

void ImpulseResponse::write_wav(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path);
    double peak = 0.0;
    for (size_t i = 0; i < sum_.size(); ++i) peak = std::max(peak, std::abs(pressure(i)));
    double scale = peak > 0.0 ? 32000.0 / peak : 0.0;

    uint32_t rate = static_cast<uint32_t>(sample_rate_);
    uint32_t data_bytes = static_cast<uint32_t>(sum_.size() * 2);
    auto u32 = [&](uint32_t v) { f.write(reinterpret_cast<const char*>(&v), 4); };
    auto u16 = [&](uint16_t v) { f.write(reinterpret_cast<const char*>(&v), 2); };
    f.write("RIFF", 4);
    u32(36 + data_bytes);
    f.write("WAVE", 4);
    f.write("fmt ", 4);
    u32(16);
    u16(1);  // PCM
    u16(1);  // mono
    u32(rate);
    u32(rate * 2);
    u16(2);
    u16(16);
    f.write("data", 4);
    u32(data_bytes);
    for (size_t i = 0; i < sum_.size(); ++i) {
        double v = pressure(i) * scale;
        int16_t s = static_cast<int16_t>(clamp(v, -32767.0, 32767.0));
        f.write(reinterpret_cast<const char*>(&s), 2);
    }
}

namespace {

void fft_inplace(std::vector<std::complex<double>>& a) {
    size_t n = a.size();
    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (size_t len = 2; len <= n; len <<= 1) {
        double ang = -kTwoPi / static_cast<double>(len);
        std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0);
            for (size_t k = 0; k < len / 2; ++k) {
                auto u = a[i + k];
                auto v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

}  // namespace

std::vector<std::complex<double>> spectrum(const std::vector<double>& signal) {
    size_t n = 1;
    while (n < signal.size()) n <<= 1;
    std::vector<std::complex<double>> a(n);
    for (size_t i = 0; i < signal.size(); ++i) a[i] = signal[i];
    fft_inplace(a);
    return a;
}

SnrResult snr(const std::vector<double>& ir_mean, const std::vector<double>& ir_error,
              double sample_rate) {
    if (ir_mean.size() != ir_error.size()) {
        throw std::invalid_argument("snr: length mismatch");
    }
    auto fs = spectrum(ir_mean);
    auto fe = spectrum(ir_error);
    size_t n = fs.size();
    double df = sample_rate / static_cast<double>(n);
    SnrResult res;
    double acc = 0.0;
    for (size_t i = 1; i < n / 2; ++i) {
        double freq = df * static_cast<double>(i);
        if (freq < 20.0 || freq > 20000.0) continue;
        double em = std::abs(fe[i]);
        if (em == 0.0) {
            res.bins_excluded++;
            continue;
        }
        acc += 10.0 * std::log10(std::abs(fs[i]) / em);
        res.bins_used++;
    }
    res.band_average_db = res.bins_used ? acc / static_cast<double>(res.bins_used) : 0.0;
    return res;
}

double snr_protocol(const std::vector<std::vector<double>>& irs, double sample_rate) {
    if (irs.size() < 2) throw std::invalid_argument("snr_protocol: need >= 2 IRs");
    size_t len = irs[0].size();
    std::vector<double> mean(len, 0.0);
    for (const auto& ir : irs) {
        for (size_t i = 0; i < len; ++i) mean[i] += ir[i];
    }
    for (auto& v : mean) v /= static_cast<double>(irs.size());
    double acc = 0.0;
    for (const auto& ir : irs) {
        std::vector<double> err(len);
        for (size_t i = 0; i < len; ++i) err[i] = ir[i] - mean[i];
        acc += snr(mean, err, sample_rate).band_average_db;
    }
    return acc / static_cast<double>(irs.size());
}

}  // namespace edgewave
