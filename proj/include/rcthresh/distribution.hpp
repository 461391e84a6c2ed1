#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "rcthresh/rng.hpp"

namespace rcthresh {

enum class DistKind { Rayleigh, Rice };

/// A unit-mean field-magnitude distribution. sigma and nu are expressed in
/// normalized field units (the chamber mean rectangular field is 1).
/// k_db = 10 log10(nu^2 / (2 sigma^2)); -infinity denotes Rayleigh.
struct DistributionSpec {
  DistKind kind = DistKind::Rayleigh;
  double sigma = 0.0;
  double nu = 0.0;
  double k_db = 0.0;
};

/// Unit-mean Rayleigh: sigma = sqrt(2/pi), nu = 0.
DistributionSpec unit_mean_rayleigh();

/// Unit-mean Rice with the given K-factor in dB. k_db = -infinity maps to
/// the exact Rayleigh spec; NaN or +infinity is a domain error.
DistributionSpec unit_mean_rice(double k_db);

/// Dispatch on kind. Rayleigh requires k_db to be absent; Rice requires it
/// to be present.
DistributionSpec unit_mean_spec(DistKind kind, std::optional<double> k_db = std::nullopt);

/// Density at x >= 0 (per normalized field unit). Zero at the origin.
double pdf(const DistributionSpec& spec, double x);

/// Cumulative distribution at x >= 0. The Rice branch evaluates
/// 1 - Q1(nu/sigma, x/sigma) to absolute accuracy 1e-9.
double cdf(const DistributionSpec& spec, double x);

/// Inverse CDF for 0 <= p < 1. Closed form for Rayleigh; bracketed
/// root-finding to |cdf(result) - p| <= 1e-9 for Rice.
double quantile(const DistributionSpec& spec, double p);

/// n samples from the distribution. Rayleigh uses the inverse transform on
/// (0,1] uniforms; Rice combines two Gaussians. Deterministic for a given
/// stream.
std::vector<double> sample_batch(const DistributionSpec& spec, std::size_t n,
                                 const RngStream& stream);

}  // namespace rcthresh
