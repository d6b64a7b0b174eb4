#pragma once

#include "neulap/profile.hpp"

namespace neulap::geometry {

enum class DomainVariant { DumbbellNeumann, ChannelMixed, DirichletOscillating };

// Base rectangle (-1,0) x (-h/2, h/2) plus an exterior channel attached on x = 0,
// or the oscillating-top Dirichlet domain (0,1) x (-1, a(1+sin(x/eps))).
struct PerturbedDomain {
  DomainVariant variant = DomainVariant::ChannelMixed;
  ChannelProfile channel;
  double height = 0.83;   // base rectangle height h (dumbbell)
  double amplitude = 0.0; // oscillating amplitude a
  double osc_eps = 0.0;

  static PerturbedDomain dumbbell(const ChannelProfile& profile, double h = 0.83);
  static PerturbedDomain channel_only(const ChannelProfile& profile);
  static PerturbedDomain oscillating(double a, double eps);
};

// |Omega_eps \ Omega_0|: 2*Int g for channel variants, Int a(1+sin(x/eps)) for the
// oscillating variant; adaptive Simpson, relative tolerance 1e-10.
double measure_excess(const PerturbedDomain& domain);

// sup over x in Omega_eps of dist(x, Omega_0)
double domain_distance(const PerturbedDomain& domain);

}  // namespace neulap::geometry
