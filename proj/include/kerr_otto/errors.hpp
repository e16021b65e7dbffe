#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace kerr_otto {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A value violates a type invariant (e.g. omega <= 0, beta <= 0, T_c >= T_h).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Integer or floating-point overflow in level arithmetic.
class ComputationError : public Error {
 public:
  using Error::Error;
};

/// The certified tail bound did not reach the tolerance before the hard cap.
class TruncationNotConverged : public Error {
 public:
  TruncationNotConverged(double achieved_tail_bound, std::int64_t truncation)
      : Error("Gibbs truncation did not converge: tail bound " +
              std::to_string(achieved_tail_bound) + " at N_max = " +
              std::to_string(truncation)),
        achieved_tail_bound_(achieved_tail_bound),
        truncation_(truncation) {}

  double achieved_tail_bound() const noexcept { return achieved_tail_bound_; }
  std::int64_t truncation() const noexcept { return truncation_; }

 private:
  double achieved_tail_bound_;
  std::int64_t truncation_;
};

class SpectrumMismatch : public Error {
 public:
  using Error::Error;
};

class NotAnEngine : public Error {
 public:
  using Error::Error;
};

class NotARefrigerator : public Error {
 public:
  using Error::Error;
};

/// omega_h <= omega_c, so the harmonic refrigerator baseline is undefined.
class DegenerateFrequencySplit : public Error {
 public:
  using Error::Error;
};

/// No grid point in the search box satisfies the required regime.
class Infeasible : public Error {
 public:
  using Error::Error;
};

}  // namespace kerr_otto
