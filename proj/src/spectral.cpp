#include "micellar/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>

#include "micellar/common.hpp"

namespace micellar {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

fftw_complex* fc(std::complex<double>* z) { return reinterpret_cast<fftw_complex*>(z); }
}  // namespace

SpectralWorkspace::SpectralWorkspace(const XLattice& x)
    : x_(&x), dim_(x.dim()), n_(x.n()), size_(x.size()) {
  kdiff_axis_.resize(n_);
  kfull_axis_.resize(n_);
  keep_axis_.resize(n_);
  const double base = kTwoPi / x.length();
  for (int j = 0; j < n_; ++j) {
    const int m = (j <= n_ / 2) ? j : j - n_;
    kfull_axis_[j] = base * m;
    const bool nyquist = (n_ % 2 == 0) && (j == n_ / 2);
    kdiff_axis_[j] = nyquist ? 0.0 : base * m;
    keep_axis_[j] = static_cast<char>(std::abs(m) <= n_ / 3 ? 1 : 0);
  }
  scratch_.resize(size_);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  if (dim_ == 1) {
    fwd_ = fftw_plan_dft_1d(n_, fc(scratch_.data()), fc(scratch_.data()), FFTW_FORWARD, flags);
    bwd_ = fftw_plan_dft_1d(n_, fc(scratch_.data()), fc(scratch_.data()), FFTW_BACKWARD, flags);
  } else {
    fwd_ = fftw_plan_dft_2d(n_, n_, fc(scratch_.data()), fc(scratch_.data()), FFTW_FORWARD, flags);
    bwd_ =
        fftw_plan_dft_2d(n_, n_, fc(scratch_.data()), fc(scratch_.data()), FFTW_BACKWARD, flags);
  }
  if (!fwd_ || !bwd_) throw InvariantError("fft plan creation failed");
}

SpectralWorkspace::~SpectralWorkspace() {
  if (fwd_) fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
  if (bwd_) fftw_destroy_plan(static_cast<fftw_plan>(bwd_));
}

void SpectralWorkspace::forward(std::complex<double>* z) const {
  fftw_execute_dft(static_cast<fftw_plan>(fwd_), fc(z), fc(z));
}

void SpectralWorkspace::inverse(std::complex<double>* z) const {
  fftw_execute_dft(static_cast<fftw_plan>(bwd_), fc(z), fc(z));
  const double s = 1.0 / static_cast<double>(size_);
  for (std::int64_t i = 0; i < size_; ++i) z[i] *= s;
}

void SpectralWorkspace::to_spectrum(const double* f, std::complex<double>* zhat) const {
  for (std::int64_t i = 0; i < size_; ++i) zhat[i] = f[i];
  forward(zhat);
}

void SpectralWorkspace::to_field(const std::complex<double>* zhat, double* out) const {
  std::memcpy(scratch_.data(), zhat, sizeof(std::complex<double>) * size_);
  inverse(scratch_.data());
  for (std::int64_t i = 0; i < size_; ++i) out[i] = scratch_[i].real();
}

double SpectralWorkspace::kdiff(int axis, std::int64_t flat) const {
  if (dim_ == 1) return kdiff_axis_[flat];
  return axis == 0 ? kdiff_axis_[flat / n_] : kdiff_axis_[flat % n_];
}

double SpectralWorkspace::ksq(std::int64_t flat) const {
  if (dim_ == 1) {
    const double k = kfull_axis_[flat];
    return k * k;
  }
  const double k0 = kfull_axis_[flat / n_];
  const double k1 = kfull_axis_[flat % n_];
  return k0 * k0 + k1 * k1;
}

void SpectralWorkspace::gradient(const double* f, std::vector<std::vector<double>>& out) const {
  std::vector<std::complex<double>> zhat(size_);
  to_spectrum(f, zhat.data());
  out.assign(dim_, std::vector<double>(size_));
  std::vector<std::complex<double>> tmp(size_);
  for (int a = 0; a < dim_; ++a) {
    for (std::int64_t i = 0; i < size_; ++i)
      tmp[i] = std::complex<double>(0.0, kdiff(a, i)) * zhat[i];
    inverse(tmp.data());
    for (std::int64_t i = 0; i < size_; ++i) out[a][i] = tmp[i].real();
    if (a + 1 < dim_) std::memcpy(tmp.data(), zhat.data(), sizeof(std::complex<double>) * size_);
  }
}

void SpectralWorkspace::leray(std::vector<std::vector<std::complex<double>>>& uhat) const {
  if (static_cast<int>(uhat.size()) != dim_)
    throw InvariantError("leray projection: component count mismatch");
  if (dim_ == 1) {
    // incompressible 1d flow has no non-constant divergence-free part
    for (std::int64_t i = 0; i < size_; ++i)
      if (kdiff(0, i) != 0.0) uhat[0][i] = 0.0;
    return;
  }
  for (std::int64_t i = 0; i < size_; ++i) {
    const double k0 = kdiff(0, i), k1 = kdiff(1, i);
    const double k2 = k0 * k0 + k1 * k1;
    if (k2 == 0.0) continue;
    const std::complex<double> kdotu = k0 * uhat[0][i] + k1 * uhat[1][i];
    uhat[0][i] -= k0 * kdotu / k2;
    uhat[1][i] -= k1 * kdotu / k2;
  }
}

void SpectralWorkspace::dealias(std::complex<double>* z) const {
  if (dim_ == 1) {
    for (std::int64_t i = 0; i < size_; ++i)
      if (!keep_axis_[i]) z[i] = 0.0;
    return;
  }
  for (std::int64_t i = 0; i < size_; ++i)
    if (!keep_axis_[i / n_] || !keep_axis_[i % n_]) z[i] = 0.0;
}

void SpectralWorkspace::face_velocities(const VelocityField& u,
                                        std::vector<std::vector<double>>& faces) const {
  const double h = x_->spacing();
  std::vector<std::vector<std::complex<double>>> vhat(dim_,
                                                      std::vector<std::complex<double>>(size_));
  for (int a = 0; a < dim_; ++a) to_spectrum(u.comp[a].data(), vhat[a].data());

  const bool even = (n_ % 2 == 0);
  for (std::int64_t i = 0; i < size_; ++i) {
    const int j0 = dim_ == 1 ? static_cast<int>(i) : static_cast<int>(i / n_);
    const int j1 = dim_ == 1 ? 0 : static_cast<int>(i % n_);
    const bool nyq = even && (j0 == n_ / 2 || (dim_ == 2 && j1 == n_ / 2));
    if (nyq) {  // drop modes whose face phase would break conjugate symmetry
      for (int a = 0; a < dim_; ++a) vhat[a][i] = 0.0;
      continue;
    }
    double sig[2] = {0.0, 0.0};
    double s2 = 0.0;
    for (int a = 0; a < dim_; ++a) {
      sig[a] = 2.0 * std::sin(0.5 * kdiff(a, i) * h) / h;  // staggered div symbol / i
      s2 += sig[a] * sig[a];
    }
    // project the cell-centered coefficients first: the face phase below
    // commutes with the divergence symbol only per axis, not across axes
    if (s2 != 0.0) {
      std::complex<double> sdotv = 0.0;
      for (int a = 0; a < dim_; ++a) sdotv += sig[a] * vhat[a][i];
      for (int a = 0; a < dim_; ++a) vhat[a][i] -= sig[a] * sdotv / s2;
    }
    for (int a = 0; a < dim_; ++a)
      vhat[a][i] *= std::polar(1.0, 0.5 * kdiff(a, i) * h);  // sample at face midpoint
  }

  faces.assign(dim_, std::vector<double>(size_));
  for (int a = 0; a < dim_; ++a) to_field(vhat[a].data(), faces[a].data());
}

void SpectralWorkspace::spectrum_per_qnode(const double* f, std::int64_t nq,
                                           std::complex<double>* out) const {
  std::vector<std::complex<double>> line(size_);
  for (std::int64_t iq = 0; iq < nq; ++iq) {
    for (std::int64_t ix = 0; ix < size_; ++ix) line[ix] = f[ix * nq + iq];
    forward(line.data());
    for (std::int64_t m = 0; m < size_; ++m) out[m * nq + iq] = line[m];
  }
}

}  // namespace micellar
