#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "micellar/xlattice.hpp"

namespace micellar {

// FFT workspace for one periodic lattice: c2c transforms, derivative
// wavenumbers, Leray projection, 2/3 dealiasing, staggered face sampling.
class SpectralWorkspace {
 public:
  explicit SpectralWorkspace(const XLattice& x);
  ~SpectralWorkspace();
  SpectralWorkspace(const SpectralWorkspace&) = delete;
  SpectralWorkspace& operator=(const SpectralWorkspace&) = delete;

  const XLattice& lattice() const { return *x_; }

  void forward(std::complex<double>* z) const;  // unnormalized, in place
  void inverse(std::complex<double>* z) const;  // scaled by 1/size, in place

  void to_spectrum(const double* f, std::complex<double>* zhat) const;
  void to_field(const std::complex<double>* zhat, double* out) const;  // real part

  // derivative wavenumber per axis (Nyquist zeroed) and |k|^2 (Nyquist kept)
  double kdiff(int axis, std::int64_t flat) const;
  double ksq(std::int64_t flat) const;

  // spectral gradient of a real scalar
  void gradient(const double* f, std::vector<std::vector<double>>& out) const;

  // divergence-free projection, in place on the component spectra;
  // zero mode (and modes with no derivative content) untouched
  void leray(std::vector<std::vector<std::complex<double>>>& uhat) const;

  // zero every mode with any axis index above 2/3 cutoff (mean preserved)
  void dealias(std::complex<double>* z) const;

  // sample u at staggered face midpoints (trig interpolation) and project so
  // the staggered divergence sum_a (uf_a(i) - uf_a(i - e_a))/h vanishes for
  // every mode; faces[a][i] is the face between cells i and i + e_a
  void face_velocities(const VelocityField& u, std::vector<std::vector<double>>& faces) const;

  // x-spectrum per q-node: out[m*nq + iq], unnormalized forward transform
  void spectrum_per_qnode(const double* f, std::int64_t nq, std::complex<double>* out) const;

 private:
  const XLattice* x_;
  int dim_, n_;
  std::int64_t size_;
  std::vector<double> kdiff_axis_, kfull_axis_;
  std::vector<char> keep_axis_;
  void* fwd_ = nullptr;
  void* bwd_ = nullptr;
  mutable std::vector<std::complex<double>> scratch_;
};

}  // namespace micellar
