#pragma once

#include <complex>
#include <vector>

namespace pathlab {

using cplx = std::complex<double>;

/// In-place radix-2 FFT. Size must be a power of two.
/// Forward transform is unnormalised; the inverse divides by the size,
/// so fft(fft(a), inverse) == a up to rounding.
void fft_inplace(std::vector<cplx>& a, bool inverse);

/// Signed frequency index for FFT bin m of an n-point transform:
/// 0,1,...,n/2-1,-n/2,...,-1.
inline long fft_signed_index(std::size_t m, std::size_t n) {
    return m < n / 2 ? static_cast<long>(m) : static_cast<long>(m) - static_cast<long>(n);
}

} // namespace pathlab
