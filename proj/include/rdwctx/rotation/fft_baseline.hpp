#pragma once
/**
 * @file fft_baseline.hpp
 * @brief Power-spectral-density resynthesis baseline.
 *
 * Fit: per channel and frequency bin, mean and std of the periodogram
 * P_k = |X_k|^2 / n over the input series, plus the signed series mean.
 * Generate: P_k ~ max(0, Normal(mean_k, std_k)), uniform random phase,
 * Hermitian symmetry, inverse FFT. Yaw is modelled unwrapped and wrapped
 * on output.
 */

#include "rdwctx/core/random.hpp"
#include "rdwctx/rotation/series.hpp"

#include <fftw3.h>
#include <json.hpp>

#include <cmath>
#include <complex>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

namespace rdwctx::rotation {

inline constexpr std::size_t kFftDefaultLength = 30000;

namespace detail {

struct FftwFree {
    void operator()(void* p) const { fftw_free(p); }
};

/// Forward real FFT, bins 0..n/2.
inline std::vector<std::complex<double>> rfft(const std::vector<double>& x)
{
    const int n = static_cast<int>(x.size());
    std::unique_ptr<double, FftwFree> in(fftw_alloc_real(x.size()));
    std::unique_ptr<fftw_complex, FftwFree> out(fftw_alloc_complex(x.size() / 2 + 1));
    // FFTW_ESTIMATE picks the plan without timing, so results are reproducible run to run
    fftw_plan plan = fftw_plan_dft_r2c_1d(n, in.get(), out.get(), FFTW_ESTIMATE);
    std::copy(x.begin(), x.end(), in.get());
    fftw_execute(plan);
    fftw_destroy_plan(plan);
    std::vector<std::complex<double>> X(x.size() / 2 + 1);
    for (std::size_t k = 0; k < X.size(); ++k)
        X[k] = {out.get()[k][0], out.get()[k][1]};
    return X;
}

/// Inverse of rfft for a series of length n (normalised).
inline std::vector<double> irfft(const std::vector<std::complex<double>>& X, std::size_t n)
{
    std::unique_ptr<fftw_complex, FftwFree> in(fftw_alloc_complex(n / 2 + 1));
    std::unique_ptr<double, FftwFree> out(fftw_alloc_real(n));
    fftw_plan plan = fftw_plan_dft_c2r_1d(static_cast<int>(n), in.get(), out.get(), FFTW_ESTIMATE);
    for (std::size_t k = 0; k < n / 2 + 1; ++k) {
        in.get()[k][0] = X[k].real();
        in.get()[k][1] = X[k].imag();
    }
    fftw_execute(plan);
    fftw_destroy_plan(plan);
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i)
        x[i] = out.get()[i] / static_cast<double>(n);
    return x;
}

} // namespace detail

struct PsdChannel {
    std::vector<double> mean; ///< bins 0..n/2; bin 0 unused (see dc_*)
    std::vector<double> std;
    double dc_mean{0.0}; ///< signed series mean
    double dc_std{0.0};
};

struct PsdModel {
    double rate{250.0};
    std::size_t length{0}; ///< series length the bins refer to
    std::size_t sources{0};
    std::vector<PsdChannel> channels; ///< yaw (unwrapped), pitch, roll
    std::vector<std::string> warnings;

    [[nodiscard]] nlohmann::json to_json() const
    {
        nlohmann::json ch = nlohmann::json::array();
        for (const auto& c : channels)
            ch.push_back({{"mean", c.mean}, {"std", c.std}, {"dc_mean", c.dc_mean}, {"dc_std", c.dc_std}});
        return {{"format", "rdwctx.psd_model"}, {"version", 1}, {"rate", rate}, {"length", length},
                {"sources", sources}, {"yaw", "unwrapped"}, {"channels", ch}};
    }

    static PsdModel from_json(const nlohmann::json& j)
    {
        if (j.value("format", "") != "rdwctx.psd_model" || j.value("version", 0) != 1)
            throw ConfigError("psd model: unsupported format or version");
        PsdModel m;
        m.rate = j.at("rate").get<double>();
        m.length = j.at("length").get<std::size_t>();
        m.sources = j.at("sources").get<std::size_t>();
        for (const auto& c : j.at("channels"))
            m.channels.push_back({c.at("mean").get<std::vector<double>>(), c.at("std").get<std::vector<double>>(),
                                  c.at("dc_mean").get<double>(), c.at("dc_std").get<double>()});
        for (const auto& c : m.channels)
            if (c.mean.size() != m.length / 2 + 1 || c.std.size() != c.mean.size())
                throw ConfigError("psd model: bin count does not match length");
        return m;
    }
};

/// Fit on raw series (wrapped degrees). Longer series are truncated to the shortest one.
inline PsdModel fft_baseline_fit(const std::vector<RotationSeries>& series)
{
    if (series.empty())
        throw ConfigError("fft baseline: no input series");
    PsdModel m;
    m.rate = series.front().rate;
    m.length = series.front().length();
    for (const auto& s : series) {
        s.validate();
        if (s.rate != m.rate)
            throw ConfigError("fft baseline: input series have different rates");
        m.length = std::min(m.length, s.length());
    }
    if (m.length < 4)
        throw DomainError("fft baseline: series too short");
    for (const auto& s : series)
        if (s.length() != m.length) {
            m.warnings.push_back("series truncated to " + std::to_string(m.length) + " samples");
            break;
        }
    if (series.size() < 2)
        m.warnings.push_back("single input series: std is zero, generation reproduces the mean PSD");
    m.sources = series.size();
    const std::size_t bins = m.length / 2 + 1;
    const auto n = static_cast<double>(m.length);
    const auto count = static_cast<double>(series.size());
    for (int c = 0; c < kChannels; ++c) {
        PsdChannel ch;
        ch.mean.assign(bins, 0.0);
        ch.std.assign(bins, 0.0);
        std::vector<double> sq(bins, 0.0);
        double dsum = 0.0, dsq = 0.0;
        for (const auto& s : series) {
            std::vector<double> x(s.channel(c).begin(), s.channel(c).begin() + static_cast<std::ptrdiff_t>(m.length));
            if (c == 0)
                x = unwrap_series(x);
            const auto X = detail::rfft(x);
            for (std::size_t k = 1; k < bins; ++k) {
                const double p = std::norm(X[k]) / n;
                ch.mean[k] += p;
                sq[k] += p * p;
            }
            const double dc = X[0].real() / n;
            dsum += dc;
            dsq += dc * dc;
        }
        for (std::size_t k = 1; k < bins; ++k) {
            ch.mean[k] /= count;
            ch.std[k] = count > 1 ? std::sqrt(std::max(0.0, (sq[k] - count * ch.mean[k] * ch.mean[k]) / (count - 1))) : 0.0;
        }
        ch.dc_mean = dsum / count;
        ch.dc_std = count > 1 ? std::sqrt(std::max(0.0, (dsq - count * ch.dc_mean * ch.dc_mean) / (count - 1))) : 0.0;
        m.channels.push_back(std::move(ch));
    }
    return m;
}

namespace detail {

/// Linear interpolation of a bin table in frequency when the requested length differs.
inline double interp_bins(const std::vector<double>& v, double freq, double df)
{
    const double pos = freq / df;
    const auto j = static_cast<std::size_t>(std::floor(pos));
    if (j + 1 >= v.size())
        return v.back();
    return v[j] + (pos - static_cast<double>(j)) * (v[j + 1] - v[j]);
}

} // namespace detail

inline RotationSeries fft_baseline_generate(const PsdModel& m, std::size_t length, Seed seed)
{
    require(m.channels.size() == static_cast<std::size_t>(kChannels), "fft baseline: model has no channels");
    if (length < 4)
        throw ConfigError("fft baseline: length must be >= 4");
    Rng rng(seed);
    const std::size_t bins = length / 2 + 1;
    const double df_model = m.rate / static_cast<double>(m.length);
    const double df_out = m.rate / static_cast<double>(length);
    RotationSeries out;
    out.rate = m.rate;
    for (int c = 0; c < kChannels; ++c) {
        const auto& ch = m.channels[static_cast<std::size_t>(c)];
        std::vector<std::complex<double>> X(bins);
        X[0] = ch.dc_mean + ch.dc_std * rng.normal();
        X[0] *= static_cast<double>(length);
        for (std::size_t k = 1; k < bins; ++k) {
            const double f = df_out * static_cast<double>(k);
            const double mu = length == m.length ? ch.mean[k] : detail::interp_bins(ch.mean, f, df_model);
            const double sd = length == m.length ? ch.std[k] : detail::interp_bins(ch.std, f, df_model);
            const double p = std::max(0.0, mu + sd * rng.normal());
            const double amp = std::sqrt(p * static_cast<double>(length));
            if (length % 2 == 0 && k == bins - 1) {
                X[k] = rng.uniform() < 0.5 ? -amp : amp; // Nyquist bin must be real
            } else {
                const double phase = 2.0 * std::numbers::pi * rng.uniform();
                X[k] = std::polar(amp, phase);
            }
        }
        auto x = detail::irfft(X, length);
        for (double& v : x) // angles leave wrapped, as on ingest
            v = wrap_angle(v);
        out.channel(c) = std::move(x);
    }
    return out;
}

} // namespace rdwctx::rotation
