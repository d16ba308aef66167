#include "mrdc/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mrdc {

namespace {

constexpr int kWindow = 11;
constexpr double kSigma = 1.5;
constexpr double kK1 = 0.01;
constexpr double kK2 = 0.03;

void check_pair(const ComplexImage& pred, const ComplexImage& ref,
                const std::vector<std::uint8_t>& roi) {
    if (pred.height != ref.height || pred.width != ref.width)
        throw std::invalid_argument("metrics: shape mismatch");
    if (!roi.empty() && roi.size() != ref.data.size())
        throw std::invalid_argument("metrics: roi size mismatch");
}

std::vector<double> magnitude(const ComplexImage& img) {
    std::vector<double> mag(img.data.size());
    for (std::size_t i = 0; i < mag.size(); ++i) mag[i] = std::abs(img.data[i]);
    return mag;
}

double peak_over_roi(const std::vector<double>& mag,
                     const std::vector<std::uint8_t>& roi) {
    double peak = 0.0;
    for (std::size_t i = 0; i < mag.size(); ++i)
        if (roi.empty() || roi[i]) peak = std::max(peak, mag[i]);
    return peak;
}

std::vector<double> gaussian_kernel() {
    std::vector<double> k(kWindow);
    const int half = kWindow / 2;
    double sum = 0.0;
    for (int i = 0; i < kWindow; ++i) {
        const double d = i - half;
        k[i] = std::exp(-d * d / (2.0 * kSigma * kSigma));
        sum += k[i];
    }
    for (auto& v : k) v /= sum;
    return k;
}

// separable Gaussian filtering, valid region only: output is
// (h - 10) x (w - 10), entry (y, x) centered at pixel (y + 5, x + 5)
std::vector<double> filter_valid(const std::vector<double>& img, int h, int w,
                                 const std::vector<double>& kernel) {
    const int half = kWindow / 2;
    const int vw = w - 2 * half;
    const int vh = h - 2 * half;
    std::vector<double> horiz(static_cast<std::size_t>(h) * vw);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < vw; ++x) {
            double acc = 0.0;
            for (int t = 0; t < kWindow; ++t)
                acc += kernel[t] * img[static_cast<std::size_t>(y) * w + x + t];
            horiz[static_cast<std::size_t>(y) * vw + x] = acc;
        }
    std::vector<double> out(static_cast<std::size_t>(vh) * vw);
    for (int y = 0; y < vh; ++y)
        for (int x = 0; x < vw; ++x) {
            double acc = 0.0;
            for (int t = 0; t < kWindow; ++t)
                acc += kernel[t] * horiz[static_cast<std::size_t>(y + t) * vw + x];
            out[static_cast<std::size_t>(y) * vw + x] = acc;
        }
    return out;
}

}  // namespace

double psnr(const ComplexImage& pred, const ComplexImage& ref,
            const std::vector<std::uint8_t>& roi) {
    check_pair(pred, ref, roi);
    const auto mag_pred = magnitude(pred);
    const auto mag_ref = magnitude(ref);

    const double peak = peak_over_roi(mag_ref, roi);
    if (peak <= 0.0) throw std::invalid_argument("psnr: reference is all zero on roi");

    double mse = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < mag_ref.size(); ++i) {
        if (!roi.empty() && !roi[i]) continue;
        const double diff = mag_pred[i] - mag_ref[i];
        mse += diff * diff;
        ++count;
    }
    mse /= static_cast<double>(count);
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(peak * peak / mse);
}

double ssim(const ComplexImage& pred, const ComplexImage& ref,
            const std::vector<std::uint8_t>& roi) {
    check_pair(pred, ref, roi);
    if (pred.height < kWindow || pred.width < kWindow)
        throw std::invalid_argument("ssim: frame smaller than the 11x11 window");

    const int h = pred.height;
    const int w = pred.width;
    const auto a = magnitude(pred);
    const auto b = magnitude(ref);

    const double peak = peak_over_roi(b, roi);
    if (peak <= 0.0) throw std::invalid_argument("ssim: reference is all zero on roi");
    const double c1 = (kK1 * peak) * (kK1 * peak);
    const double c2 = (kK2 * peak) * (kK2 * peak);

    std::vector<double> aa(a.size()), bb(a.size()), ab(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        aa[i] = a[i] * a[i];
        bb[i] = b[i] * b[i];
        ab[i] = a[i] * b[i];
    }

    const auto kernel = gaussian_kernel();
    const auto mu_a = filter_valid(a, h, w, kernel);
    const auto mu_b = filter_valid(b, h, w, kernel);
    const auto m_aa = filter_valid(aa, h, w, kernel);
    const auto m_bb = filter_valid(bb, h, w, kernel);
    const auto m_ab = filter_valid(ab, h, w, kernel);

    const int half = kWindow / 2;
    const int vw = w - 2 * half;
    const int vh = h - 2 * half;
    double total = 0.0;
    std::size_t count = 0;
    for (int y = 0; y < vh; ++y) {
        for (int x = 0; x < vw; ++x) {
            const std::size_t center =
                static_cast<std::size_t>(y + half) * w + (x + half);
            if (!roi.empty() && !roi[center]) continue;
            const std::size_t i = static_cast<std::size_t>(y) * vw + x;
            const double var_a = m_aa[i] - mu_a[i] * mu_a[i];
            const double var_b = m_bb[i] - mu_b[i] * mu_b[i];
            const double cov = m_ab[i] - mu_a[i] * mu_b[i];
            const double num = (2.0 * mu_a[i] * mu_b[i] + c1) * (2.0 * cov + c2);
            const double den =
                (mu_a[i] * mu_a[i] + mu_b[i] * mu_b[i] + c1) * (var_a + var_b + c2);
            total += num / den;
            ++count;
        }
    }
    if (count == 0) throw std::invalid_argument("ssim: roi has no interior pixels");
    return total / static_cast<double>(count);
}

}  // namespace mrdc
