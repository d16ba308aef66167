#include "mrdc/core.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <map>
#include <mutex>
#include <stdexcept>

namespace mrdc {

ComplexImage CoilStack::plane(int i) const {
    ComplexImage img(height, width);
    const auto src = coil(i);
    std::copy(src.begin(), src.end(), img.data.begin());
    return img;
}

void CoilStack::set_plane(int i, const ComplexImage& img) {
    if (img.height != height || img.width != width)
        throw std::invalid_argument("set_plane: shape mismatch");
    auto dst = coil(i);
    std::copy(img.data.begin(), img.data.end(), dst.begin());
}

CoilStack CoilStack::from_image(const ComplexImage& img) {
    CoilStack s(1, img.height, img.width);
    std::copy(img.data.begin(), img.data.end(), s.data.begin());
    return s;
}

namespace {

// FFTW plans are cached per (height, width, direction). Plan creation is not
// thread safe; execution via fftw_execute_dft is. FFTW_UNALIGNED lets the
// plans run on whatever buffers callers hand in.
class PlanCache {
public:
    fftw_plan get(int h, int w, int sign) {
        std::lock_guard<std::mutex> lock(mutex_);
        const auto key = std::make_tuple(h, w, sign);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        std::vector<cplx> in(static_cast<std::size_t>(h) * w);
        std::vector<cplx> out(in.size());
        fftw_plan plan = fftw_plan_dft_2d(
            h, w, reinterpret_cast<fftw_complex*>(in.data()),
            reinterpret_cast<fftw_complex*>(out.data()), sign,
            FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (!plan) throw std::runtime_error("fftw_plan_dft_2d failed");
        plans_.emplace(key, plan);
        return plan;
    }

private:
    std::mutex mutex_;
    std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

PlanCache& plan_cache() {
    static PlanCache cache;
    return cache;
}

// dst[y][x] = src[(y + dy) % H][(x + dx) % W]
void circshift_read(const cplx* src, cplx* dst, int h, int w, int dy, int dx) {
    for (int y = 0; y < h; ++y) {
        const int sy = (y + dy) % h;
        const cplx* src_row = src + static_cast<std::size_t>(sy) * w;
        cplx* dst_row = dst + static_cast<std::size_t>(y) * w;
        const int head = w - dx;
        std::memcpy(dst_row, src_row + dx, sizeof(cplx) * head);
        std::memcpy(dst_row + head, src_row, sizeof(cplx) * dx);
    }
}

ComplexImage centered_fft(const ComplexImage& img, int sign) {
    const int h = img.height;
    const int w = img.width;
    if (h < 1 || w < 1) throw std::invalid_argument("fft2c: dimensions must be >= 1");

    ComplexImage shifted(h, w);
    // ifftshift: move the center sample (H/2, W/2) to the origin
    circshift_read(img.data.data(), shifted.data.data(), h, w, h / 2, w / 2);

    ComplexImage transformed(h, w);
    fftw_plan plan = plan_cache().get(h, w, sign);
    fftw_execute_dft(plan,
                     reinterpret_cast<fftw_complex*>(shifted.data.data()),
                     reinterpret_cast<fftw_complex*>(transformed.data.data()));

    ComplexImage out(h, w);
    // fftshift: move the origin back to (H/2, W/2)
    circshift_read(transformed.data.data(), out.data.data(), h, w,
                   (h + 1) / 2, (w + 1) / 2);

    const double scale = 1.0 / std::sqrt(static_cast<double>(h) * w);
    for (auto& v : out.data) v *= scale;
    return out;
}

}  // namespace

ComplexImage fft2c(const ComplexImage& img) { return centered_fft(img, FFTW_FORWARD); }

ComplexImage ifft2c(const ComplexImage& ksp) { return centered_fft(ksp, FFTW_BACKWARD); }

namespace {

CoilStack per_coil_fft(const CoilStack& stack, int sign) {
    CoilStack out(stack.n_coil, stack.height, stack.width);
    for (int c = 0; c < stack.n_coil; ++c) {
        ComplexImage plane = centered_fft(stack.plane(c), sign);
        out.set_plane(c, plane);
    }
    return out;
}

}  // namespace

CoilStack fft2c(const CoilStack& stack) { return per_coil_fft(stack, FFTW_FORWARD); }

CoilStack ifft2c(const CoilStack& stack) { return per_coil_fft(stack, FFTW_BACKWARD); }

cplx inner_product(std::span<const cplx> a, std::span<const cplx> b) {
    if (a.size() != b.size()) throw std::invalid_argument("inner_product: shape mismatch");
    cplx acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
    return acc;
}

cplx inner_product(const ComplexImage& a, const ComplexImage& b) {
    if (a.height != b.height || a.width != b.width)
        throw std::invalid_argument("inner_product: shape mismatch");
    return inner_product(std::span<const cplx>(a.data), std::span<const cplx>(b.data));
}

cplx inner_product(const CoilStack& a, const CoilStack& b) {
    if (a.n_coil != b.n_coil || a.height != b.height || a.width != b.width)
        throw std::invalid_argument("inner_product: shape mismatch");
    return inner_product(std::span<const cplx>(a.data), std::span<const cplx>(b.data));
}

double norm2(std::span<const cplx> v) {
    double acc = 0.0;
    for (const auto& s : v) acc += std::norm(s);
    return std::sqrt(acc);
}

double norm2(const ComplexImage& img) { return norm2(std::span<const cplx>(img.data)); }

double norm2(const CoilStack& stack) { return norm2(std::span<const cplx>(stack.data)); }

}  // namespace mrdc
