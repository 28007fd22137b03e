#pragma once

#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

// Radix-2 complex FFT with cached twiddle tables. Grid sizes in this project
// are powers of two by construction, so no mixed-radix machinery is needed.

namespace kslab::fft {

using cplx = std::complex<double>;

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

namespace detail {

// w[j] = exp(-2 pi i j / n), j < n/2. Tabulated directly (no recurrence) so
// twiddles carry no accumulated rounding.
struct TwiddleTable {
    std::size_t n;
    std::vector<cplx> w;

    explicit TwiddleTable(std::size_t size) : n(size), w(size / 2) {
        for (std::size_t j = 0; j < n / 2; ++j) {
            const double ang = -2.0 * std::numbers::pi * double(j) / double(n);
            w[j] = cplx(std::cos(ang), std::sin(ang));
        }
    }
};

inline std::shared_ptr<const TwiddleTable> table_for(std::size_t n) {
    static std::mutex mu;
    static std::map<std::size_t, std::shared_ptr<const TwiddleTable>> cache;
    std::scoped_lock lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, std::make_shared<TwiddleTable>(n)).first;
    return it->second;
}

}  // namespace detail

// In-place transform. Forward uses the e^{-ikx} convention and is unnormalized;
// the inverse divides by n.
inline void transform(std::vector<cplx>& a, bool inverse) {
    const std::size_t n = a.size();
    if (!is_pow2(n)) throw std::invalid_argument("fft: size must be a power of two");
    if (n == 1) return;
    const auto table = detail::table_for(n);

    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t half = len / 2;
        const std::size_t stride = n / len;
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t k = 0; k < half; ++k) {
                cplx w = table->w[k * stride];
                if (inverse) w = std::conj(w);
                const cplx u = a[i + k];
                const cplx v = a[i + k + half] * w;
                a[i + k] = u + v;
                a[i + k + half] = u - v;
            }
        }
    }
    if (inverse) {
        const double scale = 1.0 / double(n);
        for (auto& z : a) z *= scale;
    }
}

inline std::vector<cplx> forward(const std::vector<double>& v) {
    std::vector<cplx> a(v.begin(), v.end());
    transform(a, false);
    return a;
}

inline std::vector<cplx> forward(const std::vector<cplx>& v) {
    std::vector<cplx> a(v);
    transform(a, false);
    return a;
}

// Inverse of a Hermitian-symmetric spectrum; the imaginary residue (pure
// roundoff for symmetric input) is dropped.
inline std::vector<double> inverse_real(std::vector<cplx> spectrum) {
    transform(spectrum, true);
    std::vector<double> out(spectrum.size());
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = spectrum[j].real();
    return out;
}

}  // namespace kslab::fft
