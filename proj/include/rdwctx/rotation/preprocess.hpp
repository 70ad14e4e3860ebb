#pragma once
/**
 * @file preprocess.hpp
 * @brief Downsampling, quantile transform, windowing and the inverse path.
 *
 * Forward path for a 250 Hz wrapped series: unwrap yaw, low-pass and
 * decimate to the window rate, map each channel through a fitted quantile
 * transformer onto a standard normal, cut 25-sample windows. The inverse
 * maps windows back through the transformer and rewraps yaw.
 */

#include "rdwctx/core/angles.hpp"
#include "rdwctx/nn/tensor.hpp"
#include "rdwctx/rotation/normal.hpp"
#include "rdwctx/rotation/series.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace rdwctx::rotation {

enum class DownsampleFilter { windowed_sinc, moving_average };

inline std::string to_string(DownsampleFilter f) { return f == DownsampleFilter::windowed_sinc ? "windowed_sinc" : "moving_average"; }

inline DownsampleFilter parse_downsample_filter(const std::string& s)
{
    if (s == "windowed_sinc")
        return DownsampleFilter::windowed_sinc;
    if (s == "moving_average")
        return DownsampleFilter::moving_average;
    throw ConfigError("unknown downsample filter '" + s + "' (expected windowed_sinc|moving_average)");
}

struct DownsampleOptions {
    DownsampleFilter filter{DownsampleFilter::windowed_sinc};
    double cutoff_fraction{0.88}; ///< cutoff as a fraction of the output Nyquist frequency
    int taps_per_factor{30};      ///< sinc length = taps_per_factor * factor + 1
};

inline int decimation_factor(double from_rate, double to_rate)
{
    if (!(from_rate > 0.0) || !(to_rate > 0.0) || to_rate > from_rate)
        throw ConfigError("downsample: rates must be positive and to_rate <= from_rate");
    const double f = from_rate / to_rate;
    const double r = std::round(f);
    if (std::abs(f - r) > 1e-9)
        throw ConfigError("downsample: " + std::to_string(to_rate) + " Hz does not divide " + std::to_string(from_rate) + " Hz");
    return static_cast<int>(r);
}

/// Hamming-windowed sinc low-pass with unit DC gain.
inline std::vector<double> sinc_taps(int factor, const DownsampleOptions& o)
{
    const int half = o.taps_per_factor * factor / 2;
    const double fc = o.cutoff_fraction * 0.5 / factor; // cycles per input sample
    std::vector<double> h(static_cast<std::size_t>(2 * half + 1));
    double sum = 0.0;
    for (int k = -half; k <= half; ++k) {
        const double x = 2.0 * fc * k;
        const double sinc = k == 0 ? 1.0 : std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
        const double w = 0.54 + 0.46 * std::cos(std::numbers::pi * k / half);
        h[static_cast<std::size_t>(k + half)] = 2.0 * fc * sinc * w;
        sum += h[static_cast<std::size_t>(k + half)];
    }
    for (double& v : h)
        v /= sum;
    return h;
}

/// Index into x with mirror reflection at both ends (edge samples not repeated).
inline std::size_t reflect_index(long i, std::size_t n)
{
    if (n == 1)
        return 0;
    const long period = 2 * (static_cast<long>(n) - 1);
    long m = i % period;
    if (m < 0)
        m += period;
    return static_cast<std::size_t>(m < static_cast<long>(n) ? m : period - m);
}

/**
 * Output sample k summarises input block [k*f, (k+1)*f) and is centred on
 * its middle sample. Length is floor(n / f).
 */
inline std::vector<double> lowpass_downsample(std::span<const double> x, int factor, const DownsampleOptions& o = {})
{
    require(factor >= 1, "lowpass_downsample: factor must be >= 1");
    const std::size_t n = x.size();
    const auto f = static_cast<std::size_t>(factor);
    std::vector<double> out(n / f);
    if (factor == 1) {
        std::copy(x.begin(), x.end(), out.begin());
        return out;
    }
    if (o.filter == DownsampleFilter::moving_average) {
        for (std::size_t k = 0; k < out.size(); ++k) {
            double s = 0.0;
            for (std::size_t j = 0; j < f; ++j)
                s += x[k * f + j];
            out[k] = s / static_cast<double>(f);
        }
        return out;
    }
    const auto h = sinc_taps(factor, o);
    const long half = static_cast<long>(h.size() / 2);
    for (std::size_t k = 0; k < out.size(); ++k) {
        // centre of the block; for even factors the half-sample offset is dropped
        const long c = static_cast<long>(k * f + (f - 1) / 2);
        double s = 0.0;
        for (long j = -half; j <= half; ++j)
            s += h[static_cast<std::size_t>(j + half)] * x[reflect_index(c + j, n)];
        out[k] = s;
    }
    return out;
}

/// Series version: yaw is unwrapped before filtering and rewrapped afterwards.
inline RotationSeries lowpass_downsample(const RotationSeries& s, double to_rate, const DownsampleOptions& o = {})
{
    s.validate();
    const int f = decimation_factor(s.rate, to_rate);
    RotationSeries out;
    out.rate = to_rate;
    out.yaw = rewrap_series(lowpass_downsample(unwrap_series(s.yaw), f, o));
    out.pitch = lowpass_downsample(s.pitch, f, o);
    out.roll = lowpass_downsample(s.roll, f, o);
    return out;
}

// Quantile transformer.

class QuantileTransformer {
public:
    static constexpr double kClip = 1e-7;

    QuantileTransformer() = default;

    /// data[c] holds every fit sample of channel c.
    static QuantileTransformer fit(const std::vector<std::vector<double>>& data, int n_quantiles = 1000)
    {
        if (n_quantiles < 2)
            throw ConfigError("quantile transformer: n_quantiles must be >= 2");
        QuantileTransformer t;
        t.n_quantiles_ = n_quantiles;
        for (std::size_t c = 0; c < data.size(); ++c) {
            const auto& col = data[c];
            if (col.size() < static_cast<std::size_t>(n_quantiles))
                throw DomainError("quantile transformer: channel " + std::to_string(c) + " has " +
                                  std::to_string(col.size()) + " samples, need at least " + std::to_string(n_quantiles));
            std::vector<double> sorted(col);
            std::sort(sorted.begin(), sorted.end());
            if (!std::isfinite(sorted.front()) || !std::isfinite(sorted.back()))
                throw DomainError("quantile transformer: non-finite sample in channel " + std::to_string(c));
            if (sorted.front() == sorted.back())
                throw DomainError("quantile transformer: channel " + std::to_string(c) + " is constant");
            std::vector<double> knots(static_cast<std::size_t>(n_quantiles));
            for (int k = 0; k < n_quantiles; ++k) {
                const double pos = static_cast<double>(k) / (n_quantiles - 1) * static_cast<double>(sorted.size() - 1);
                const auto lo = static_cast<std::size_t>(std::floor(pos));
                const auto hi = std::min(lo + 1, sorted.size() - 1);
                knots[static_cast<std::size_t>(k)] = sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
            }
            for (std::size_t k = 1; k < knots.size(); ++k) // keep monotone under rounding
                knots[k] = std::max(knots[k], knots[k - 1]);
            t.knots_.push_back(std::move(knots));
        }
        return t;
    }

    [[nodiscard]] int channels() const { return static_cast<int>(knots_.size()); }
    [[nodiscard]] int n_quantiles() const { return n_quantiles_; }
    [[nodiscard]] const std::vector<double>& knots(int c) const { return knots_.at(static_cast<std::size_t>(c)); }
    [[nodiscard]] double lower(int c) const { return knots(c).front(); }
    [[nodiscard]] double upper(int c) const { return knots(c).back(); }

    /// Empirical CDF level of x, averaging the left and right interpolants across tied knots.
    [[nodiscard]] double cdf(int c, double x) const
    {
        const auto& k = knots(c);
        x = std::clamp(x, k.front(), k.back());
        const double step = 1.0 / (n_quantiles_ - 1);
        auto interp = [&](std::size_t j) { // knots[j] <= x <= knots[j+1]
            const double w = k[j + 1] > k[j] ? (x - k[j]) / (k[j + 1] - k[j]) : 0.0;
            return (static_cast<double>(j) + w) * step;
        };
        const auto up = static_cast<std::size_t>(std::upper_bound(k.begin(), k.end(), x) - k.begin());
        const double right = up >= k.size() ? 1.0 : interp(up - 1);
        const auto lo = static_cast<std::size_t>(std::lower_bound(k.begin(), k.end(), x) - k.begin());
        const double left = lo == 0 ? 0.0 : (k[lo] == x ? static_cast<double>(lo) * step : interp(lo - 1));
        return 0.5 * (left + right);
    }

    [[nodiscard]] double transform(int c, double x) const
    {
        return normal_quantile(std::clamp(cdf(c, x), kClip, 1.0 - kClip));
    }

    [[nodiscard]] double inverse(int c, double z) const
    {
        const auto& k = knots(c);
        const double q = std::clamp(normal_cdf(z), kClip, 1.0 - kClip);
        const double pos = q * (n_quantiles_ - 1);
        const auto j = std::min(static_cast<std::size_t>(std::floor(pos)), k.size() - 2);
        return k[j] + (pos - static_cast<double>(j)) * (k[j + 1] - k[j]);
    }

    [[nodiscard]] nlohmann::json to_json() const
    {
        return {{"format", "rdwctx.quantile_transformer"}, {"version", 1}, {"n_quantiles", n_quantiles_},
                {"output_distribution", "normal"}, {"clip", kClip}, {"knots", knots_}};
    }

    static QuantileTransformer from_json(const nlohmann::json& j)
    {
        if (j.value("format", "") != "rdwctx.quantile_transformer" || j.value("version", 0) != 1)
            throw ConfigError("quantile transformer: unsupported format or version");
        QuantileTransformer t;
        t.n_quantiles_ = j.at("n_quantiles").get<int>();
        t.knots_ = j.at("knots").get<std::vector<std::vector<double>>>();
        for (const auto& k : t.knots_)
            if (static_cast<int>(k.size()) != t.n_quantiles_ || !std::is_sorted(k.begin(), k.end()))
                throw ConfigError("quantile transformer: knots are malformed");
        return t;
    }

private:
    int n_quantiles_{1000};
    std::vector<std::vector<double>> knots_;
};

// Windows.

/// Rows [i*stride, i*stride + len) of a samples x channels matrix, order preserved.
inline std::vector<nn::Matrix> slide_windows(const nn::Matrix& seq, int len = 25, int stride = 1)
{
    if (len < 1 || stride < 1)
        throw ConfigError("slide_windows: len and stride must be >= 1");
    if (seq.rows() < len)
        throw DomainError("slide_windows: sequence of " + std::to_string(seq.rows()) + " samples is shorter than " +
                          std::to_string(len));
    std::vector<nn::Matrix> out;
    for (Eigen::Index s = 0; s + len <= seq.rows(); s += stride)
        out.emplace_back(seq.middleRows(s, len));
    return out;
}

struct PreprocessConfig {
    double window_rate{10.0};
    int window{25};
    int stride{1};
    int n_quantiles{1000};
    DownsampleOptions downsample;
};

/// Downsampled series as [n x 3] with yaw unwrapped.
inline nn::Matrix downsampled_matrix(const RotationSeries& s, const PreprocessConfig& cfg)
{
    s.validate();
    const int f = decimation_factor(s.rate, cfg.window_rate);
    const auto yaw = lowpass_downsample(unwrap_series(s.yaw), f, cfg.downsample);
    const auto pitch = lowpass_downsample(s.pitch, f, cfg.downsample);
    const auto roll = lowpass_downsample(s.roll, f, cfg.downsample);
    nn::Matrix m(static_cast<Eigen::Index>(yaw.size()), kChannels);
    for (std::size_t i = 0; i < yaw.size(); ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        m(r, 0) = yaw[i];
        m(r, 1) = pitch[i];
        m(r, 2) = roll[i];
    }
    return m;
}

inline QuantileTransformer fit_transformer(const std::vector<nn::Matrix>& sequences, int n_quantiles = 1000)
{
    std::vector<std::vector<double>> data(kChannels);
    for (const auto& m : sequences)
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            for (int c = 0; c < kChannels; ++c)
                data[static_cast<std::size_t>(c)].push_back(m(i, c));
    return QuantileTransformer::fit(data, n_quantiles);
}

inline nn::Matrix transform_matrix(const QuantileTransformer& t, const nn::Matrix& m)
{
    nn::Matrix out(m.rows(), m.cols());
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            out(i, c) = t.transform(static_cast<int>(c), m(i, c));
    return out;
}

/// Inverse transform, then rewrap yaw (column 0) to [-180, 180).
inline nn::Matrix postprocess_window(const QuantileTransformer& t, const nn::Matrix& w)
{
    nn::Matrix out(w.rows(), w.cols());
    for (Eigen::Index i = 0; i < w.rows(); ++i)
        for (Eigen::Index c = 0; c < w.cols(); ++c)
            out(i, c) = t.inverse(static_cast<int>(c), w(i, c));
    for (Eigen::Index i = 0; i < w.rows(); ++i)
        out(i, 0) = wrap_angle(out(i, 0));
    return out;
}

inline std::vector<nn::Matrix> postprocess(const std::vector<nn::Matrix>& windows, const QuantileTransformer& t)
{
    std::vector<nn::Matrix> out;
    out.reserve(windows.size());
    for (const auto& w : windows)
        out.push_back(postprocess_window(t, w));
    return out;
}

struct PreparedCorpus {
    QuantileTransformer transformer;
    std::vector<nn::Matrix> sequences;   ///< per session, downsampled, yaw unwrapped (degrees)
    std::vector<nn::Matrix> windows;     ///< transformed space
    std::vector<nn::Matrix> raw_windows; ///< degrees, yaw wrapped
    std::vector<std::size_t> session_of; ///< session index of each window
};

/// Windows never straddle two sessions. A transformer may be supplied to reuse an existing fit.
inline PreparedCorpus preprocess(const std::vector<RotationSeries>& corpus, const PreprocessConfig& cfg,
                                 const QuantileTransformer* reuse = nullptr)
{
    if (corpus.empty())
        throw ConfigError("preprocess: empty corpus");
    PreparedCorpus p;
    for (const auto& s : corpus)
        p.sequences.push_back(downsampled_matrix(s, cfg));
    p.transformer = reuse ? *reuse : fit_transformer(p.sequences, cfg.n_quantiles);
    for (std::size_t k = 0; k < p.sequences.size(); ++k) {
        if (p.sequences[k].rows() < cfg.window)
            continue;
        const nn::Matrix tm = transform_matrix(p.transformer, p.sequences[k]);
        for (auto& w : slide_windows(tm, cfg.window, cfg.stride)) {
            p.windows.push_back(std::move(w));
            p.session_of.push_back(k);
        }
        nn::Matrix wrapped = p.sequences[k];
        for (Eigen::Index i = 0; i < wrapped.rows(); ++i)
            wrapped(i, 0) = wrap_angle(wrapped(i, 0));
        for (auto& w : slide_windows(wrapped, cfg.window, cfg.stride))
            p.raw_windows.push_back(std::move(w));
    }
    if (p.windows.empty())
        throw DomainError("preprocess: no session is long enough for one window");
    return p;
}

} // namespace rdwctx::rotation
