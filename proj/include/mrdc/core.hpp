// Complex 2D tensors and the centered, orthonormal 2D Fourier transform.
// All k-space in this project is stored centered: the DC sample lives at
// index (H/2, W/2) and fft2c/ifft2c are exact unitary inverses of each other.
#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace mrdc {

using cplx = std::complex<double>;

struct ComplexImage {
    int height = 0;
    int width = 0;
    std::vector<cplx> data;  // row-major

    ComplexImage() = default;
    ComplexImage(int h, int w) : height(h), width(w), data(static_cast<std::size_t>(h) * w) {}

    cplx& at(int y, int x) { return data[static_cast<std::size_t>(y) * width + x]; }
    const cplx& at(int y, int x) const { return data[static_cast<std::size_t>(y) * width + x]; }
    std::size_t size() const { return data.size(); }
};

/// Coil-major stack of same-size complex planes. Serves as both
/// MultiCoilImage and MultiCoilKSpace; the domain is decided by use.
struct CoilStack {
    int n_coil = 0;
    int height = 0;
    int width = 0;
    std::vector<cplx> data;  // coil-major, row-major within each coil

    CoilStack() = default;
    CoilStack(int nc, int h, int w)
        : n_coil(nc), height(h), width(w), data(static_cast<std::size_t>(nc) * h * w) {}

    std::size_t plane_size() const { return static_cast<std::size_t>(height) * width; }
    std::span<cplx> coil(int i) { return {data.data() + i * plane_size(), plane_size()}; }
    std::span<const cplx> coil(int i) const {
        return {data.data() + i * plane_size(), plane_size()};
    }
    cplx& at(int c, int y, int x) {
        return data[c * plane_size() + static_cast<std::size_t>(y) * width + x];
    }
    const cplx& at(int c, int y, int x) const {
        return data[c * plane_size() + static_cast<std::size_t>(y) * width + x];
    }

    ComplexImage plane(int i) const;
    void set_plane(int i, const ComplexImage& img);
    static CoilStack from_image(const ComplexImage& img);
};

using MultiCoilImage = CoilStack;
using MultiCoilKSpace = CoilStack;

/// Centered orthonormal forward FFT: fftshift(DFT(ifftshift(x))) / sqrt(H*W).
ComplexImage fft2c(const ComplexImage& img);
/// Exact inverse of fft2c (also unitary).
ComplexImage ifft2c(const ComplexImage& ksp);

/// Per-coil fft2c / ifft2c.
CoilStack fft2c(const CoilStack& stack);
CoilStack ifft2c(const CoilStack& stack);

/// sum over all samples of conj(a) * b. Shapes must match.
cplx inner_product(std::span<const cplx> a, std::span<const cplx> b);
cplx inner_product(const ComplexImage& a, const ComplexImage& b);
cplx inner_product(const CoilStack& a, const CoilStack& b);

double norm2(std::span<const cplx> v);
double norm2(const ComplexImage& img);
double norm2(const CoilStack& stack);

}  // namespace mrdc
